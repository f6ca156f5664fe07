#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lamlab/lattice.hpp"

namespace lamlab {

enum class CriticalKind { minimum, maximum };

struct CriticalPoint {
    double location;  // in [0, 1)
    CriticalKind kind;
};

// 1-periodic potential V(s) = a0 + sum_m a_m cos(2 pi m s) + b_m sin(2 pi m s).
class Potential {
  public:
    struct Mode {
        int m;
        double a, b;
    };

    Potential(std::vector<Mode> modes, std::string name, double tol_crit = 1e-10);
    // Trigonometric interpolant of samples V(k/M), k = 0..M-1.
    static Potential from_table(std::span<const double> samples, double tol_crit = 1e-10);

    double value(double s) const;
    double d1(double s) const;
    double d2(double s) const;

    const std::string& name() const { return name_; }
    const std::vector<Mode>& modes() const { return modes_; }
    const std::vector<CriticalPoint>& criticals() const { return criticals_; }
    std::vector<double> critical_values() const;
    std::vector<double> minima() const;
    std::vector<double> maxima() const;
    double morse_gap() const { return morse_gap_; }
    double critical_spacing() const;
    // sampled Lipschitz bound of V''
    double lipschitz_d2() const { return lipschitz_d2_; }
    double tol_crit() const { return tol_crit_; }

    // Used by builtin_n_well to install exact critical points.
    void set_criticals(std::vector<CriticalPoint> crit);

  private:
    void locate_criticals();
    void finish();

    std::vector<Mode> modes_;
    std::string name_;
    double tol_crit_;
    std::vector<CriticalPoint> criticals_;
    double morse_gap_ = 0.0;
    double lipschitz_d2_ = 0.0;
};

// V(s) = -cos(2 pi N s) / (2 pi N)^2
Potential builtin_n_well(int n);

// Local energy S_0 as a function of the values on the L1 ball of radius r around the origin.
// Values are passed in l1_ball(d, r) order; hessians are row-major.
struct StencilFns {
    std::function<double(std::span<const double>)> energy;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    std::function<void(std::span<const double>, std::span<double>)> hessian;
};

class InteractionStencil {
  public:
    InteractionStencil(int d, int range, StencilFns fns, std::string name);

    int dim() const { return d_; }
    int range() const { return r_; }
    const std::string& name() const { return name_; }
    const std::vector<Site>& ball() const { return ball_; }
    std::size_t ball_size() const { return ball_.size(); }
    std::size_t center() const { return center_; }
    std::optional<std::size_t> ball_index(std::span<const int> offset) const;
    // offsets within the ball whose negation is also the offset of a nearest neighbour
    std::vector<std::size_t> nearest_neighbours() const;

    double energy(std::span<const double> w) const { return fns_.energy(w); }
    void gradient(std::span<const double> w, std::span<double> out) const { fns_.gradient(w, out); }
    void hessian(std::span<const double> w, std::span<double> out) const { fns_.hessian(w, out); }

  private:
    int d_, r_;
    StencilFns fns_;
    std::string name_;
    std::vector<Site> ball_;
    std::size_t center_ = 0;
};

// S_0 = 1/4 sum_{||k||=1} (x_k - x_0)^2
InteractionStencil builtin_harmonic_stencil(int d);

struct PairCoupling {
    Site offset;
    double weight;
};
// S_0 = 1/4 sum_p w_p [(x_{o_p} - x_0)^2 + (x_{-o_p} - x_0)^2]
InteractionStencil pair_stencil(int d, std::vector<PairCoupling> pairs, std::string name = {});

struct ModelConstants {
    double c = 0;
    double C1 = 0;
    double C2 = 0;
    double delta0 = 0;
    double eps0 = 0;
    double eps1 = 0;
    double contraction_k = 0.5;
    double osc_bound_K = 0;
    double lipschitz_d2 = 0;
    double critical_spacing = 0;
};

struct ConstantOverrides {
    std::optional<double> C1, C2, delta0;
};

struct EstimateOptions {
    int n_samples = 256;
    std::uint64_t seed = 0x5eed;
};

// Samples C1, C2 and condition C on random windows with oscillation <= K + 1.
ModelConstants estimate_constants(const Potential& V, const InteractionStencil& S, double k, double K,
                                  const ConstantOverrides& over = {}, const EstimateOptions& opt = {});

struct ConditionCReport {
    bool holds = true;
    double worst_offdiag = 0;     // largest off-diagonal second derivative seen (must be <= 0)
    double worst_neighbour = 0;   // largest nearest-neighbour coupling seen (must be < 0)
    std::string detail;
};
ConditionCReport check_condition_c(const InteractionStencil& S, double K, const EstimateOptions& opt = {});

struct Model {
    Potential V;
    InteractionStencil S;
    ModelConstants constants;

    int dim() const { return S.dim(); }
    int range() const { return S.range(); }
};

// Default oscillation bound r ||omega||_1 + 2.
double default_osc_bound(int range, std::span<const double> omega);
Model make_model(Potential V, InteractionStencil S, double k = 0.5, std::optional<double> K = std::nullopt,
                 const ConstantOverrides& over = {});

}  // namespace lamlab
