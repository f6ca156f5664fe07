#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lamlab/birkhoff.hpp"
#include "lamlab/hull.hpp"
#include "lamlab/lattice.hpp"
#include "lamlab/model.hpp"

namespace lamlab {

struct ContinuationOptions {
    double tol = 1e-12;
    int max_iter = 200;
};

struct ContinuationResult {
    Configuration solution;      // x(eps) on the domain of x0; collar equals x0
    Configuration displacement;  // x(eps) - x0 kept separately at full precision
    int iterations = 0;
    double final_residual = 0;
    double contraction_rate = 0;  // largest ratio of successive sup-norm steps
    double max_displacement = 0;
    bool trust_radius_ok = true;
    double a_priori_bound = 0;  // delta0 2^-m
    std::vector<double> residual_history;
};

// Iterates X_i <- X_i - (V'(X_i) + eps R_i(X)) / V''(x0_i) on the interior of B, collar frozen.
// Throws refused (eps outside [0, eps0]), contraction-escape or no-convergence.
ContinuationResult quasi_newton_continue(const Model& model, double eps, const Configuration& x0, const Box& B,
                                         const ContinuationOptions& opt = {});
// Same with B = domain interior(r), i.e. the whole configuration is the window.
ContinuationResult continue_window(const Model& model, double eps, const Configuration& x0,
                                   const ContinuationOptions& opt = {});

// Sites of the window interior far enough from the frozen collar that truncation effects are
// below tie_tol according to the propagation bound.
Box core_box(const Model& model, const Box& window, double tie_tol = 1e-9);

struct TruncationReport {
    double difference = 0;  // sup over the L1 ball B_M1(0)
    double bound = 0;       // 2 delta0 2^-m
    int m = 0;              // floor((M2 - M1) / r)
    int reference_radius = 0;
};
// Window of radius M2 against a reference window of radius 2 M2 - M1, compared on B_M1(0).
// x0 must cover the reference window plus its collar.
TruncationReport truncation_consistency(const Model& model, double eps, const Configuration& x0, double tol, int M1,
                                        int M2);

struct Defect {
    double value = 0;
    Configuration minimizer_delta;
    int iterations = 0;
};
// D_B(z) = W_B(z + v) - W_B(z), v the constrained minimizer supported in the interior of B.
Defect defect(const Model& model, double eps, const Configuration& base, const Configuration& z, const Box& B,
              const ContinuationOptions& opt = {});

struct SubadditivityReport {
    bool holds = true;
    double lhs = 0;  // D_B
    double rhs = 0;  // sum of D_{B_i}
    std::vector<double> parts;
};
SubadditivityReport defect_subadditivity_check(const Model& model, double eps, const Configuration& base,
                                               const Configuration& z, const Box& B, std::span<const Box> parts,
                                               const ContinuationOptions& opt = {});

struct DefectScan {
    double gamma = 0;  // smallest |D| over the scanned boxes
    Site where;
    std::size_t boxes = 0;
};
// |D| on every cube of radius r1 whose closure fits in the window
DefectScan defect_scan(const Model& model, double eps, const Configuration& base, const Configuration& z, int r1,
                       const ContinuationOptions& opt = {});

struct LaminationOptions {
    std::vector<double> sigma;  // plateau values; minima of V when empty
    int k_max = 16;
    double tie_tol = 1e-9;
    ContinuationOptions continuation;
    int threads = 1;
};

struct LaminationMember {
    double s = 0;
    Configuration labels;
    ContinuationResult result;
    BirkhoffVerdict verdict;
};

struct LaminationResult {
    std::vector<LaminationMember> members;
    Box core;
    // order[a][b] = -1 if member a <= b on the core, +1 if >=, 0 if identical
    std::vector<std::vector<int>> order;
    std::size_t identical_pairs = 0;
    double min_label_separation = 0;  // smallest |x_a - x_b| at core sites with different labels
    double min_label_gap = 0;         // smallest nonzero label difference
};

// Throws refused for eps > eps1 and lamination-broken when two members cross.
LaminationResult continue_lamination(const Model& model, double eps, const SimplexPoint& p,
                                     std::span<const double> omega, const Box& window, int n_samples,
                                     const LaminationOptions& opt = {});

struct OrderBreak {
    bool violated = false;
    Site k;
    long l = 0;
    Site greater_site;  // x(eps) > y(eps) here
    Site less_site;     // x(eps) < y(eps) here
    double magnitude = 0;
    std::size_t pairs_tried = 0;
};
// Continues a one-plateau hull sample at value sigma and translates of it that agree with it
// somewhere at eps = 0, looking for a crossing on the core box.
OrderBreak order_break_probe(const Model& model, double eps, std::span<const double> omega, const Box& window,
                             double sigma, const ContinuationOptions& opt = {});
// Probe at a maximum of V; throws check-inconclusive if no crossing is found.
OrderBreak maximum_breaks_order(const Model& model, double eps, std::span<const double> omega, const Box& window,
                                const ContinuationOptions& opt = {});

}  // namespace lamlab
