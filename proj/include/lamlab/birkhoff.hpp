#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lamlab/lattice.hpp"
#include "lamlab/model.hpp"

namespace lamlab {

// (tau_{k,l} x)_i = x_{i+k} + l, defined on domain - k
Configuration translate(const Configuration& x, std::span<const int> k, double l);

struct MeetJoin {
    Configuration meet, join;
};
MeetJoin meet_join(const Configuration& x, const Configuration& y);

struct BirkhoffViolation {
    Site k;
    long l;
    Site less_site;     // tau x < x here
    Site greater_site;  // tau x > x here
};

struct BirkhoffVerdict {
    bool ordered = true;
    std::optional<BirkhoffViolation> violation;
    int k_max = 0;
    long l_max = 0;
    std::size_t translates_checked = 0;
    std::size_t tied_translates = 0;  // translates equal to x on the whole overlap
};

int default_k_max(const Box& domain);
long default_l_max(std::span<const double> omega, int k_max);

// Every translate tau_{k,l} with 0 < ||k||_1 <= k_max or k = 0, 0 < |l| <= l_max must be
// weakly above or weakly below x on the overlap (ties within tie_tol are allowed).
BirkhoffVerdict check_birkhoff(const Configuration& x, int k_max, long l_max, double tie_tol = 1e-9);

struct RotationEstimate {
    std::vector<double> omega;
    double error_bar;  // max |x_i - x_ref - omega . (i - ref)|
};
// Least-squares slope; throws not-birkhoff-like when the error bar exceeds 1 + tol.
RotationEstimate rotation_vector(const Configuration& x, double tol = 0.25);

struct MinMaxReport {
    bool holds;
    double lhs;  // W(x meet y) + W(x join y)
    double rhs;  // W(x) + W(y)
    double slack() const { return rhs - lhs; }
};
MinMaxReport check_minmax_inequality(const Model& model, double eps, const Box& B, const Configuration& x,
                                     const Configuration& y, double tol = 1e-10);

enum class Comparison { identical, strictly_less };

struct ComparisonReport {
    Comparison verdict;
    double margin;  // min of y - x over the interior
};
// x <= y must hold on the domain and both must solve the equation on the interior of B.
// Throws not-stationary, invalid-argument (x not below y) or principle-violated (mixed pattern).
ComparisonReport check_comparison_principle(const Model& model, double eps, const Box& B, const Configuration& x,
                                            const Configuration& y, double tol_residual = 1e-9,
                                            double tie_tol = 1e-9);

}  // namespace lamlab
