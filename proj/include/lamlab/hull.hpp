#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "lamlab/lattice.hpp"

namespace lamlab {

enum class HullSide { lower, upper };

// Point of the probability simplex; renormalized on construction.
class SimplexPoint {
  public:
    explicit SimplexPoint(std::vector<double> p);
    const std::vector<double>& p() const { return p_; }
    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t j) const { return p_[j]; }

  private:
    std::vector<double> p_;
};

double simplex_l1(const SimplexPoint& a, const SimplexPoint& b);

// Step hull: value v_m on (t_{m-1}, t_m] with t_0 = t_M - 1, extended by phi(s + 1) = phi(s) + 1.
// lengths hold the plateau measures exactly; breakpoints are their running sums.
class HullFunction {
  public:
    static constexpr double kBreakTol = 1e-12;

    HullFunction(std::vector<double> breakpoints, std::vector<double> values, std::vector<double> lengths = {});

    double lower(double s) const;
    double upper(double s) const;
    double operator()(double s) const { return lower(s); }
    double eval(double s, HullSide side) const { return side == HullSide::lower ? lower(s) : upper(s); }

    std::size_t plateaus() const { return t_.size(); }
    const std::vector<double>& breakpoints() const { return t_; }
    const std::vector<double>& values() const { return v_; }
    const std::vector<double>& lengths() const { return len_; }

  private:
    std::vector<double> t_, v_, len_;
};

// Offset added to sample positions so that no sample lands on a breakpoint by accident.
inline constexpr double kGenericOffset = 1e-7 * std::numbers::phi;

// Unique normalized left-continuous hull with plateau of measure p_j at sigma_j + Z.
HullFunction step_hull_from_simplex(const SimplexPoint& p, std::span<const double> sigma);

Configuration sample_config(const HullFunction& phi, std::span<const double> omega, double s, const Box& window,
                            HullSide side = HullSide::lower);

// Hull psi with psi(omega . i) = x_i; throws not-birkhoff on a monotonicity violation.
HullFunction empirical_hull(const Configuration& x, std::span<const double> omega);

// int_0^1 |a(t) - b(t + shift)| dt, exact.
double hull_l1_at_shift(const HullFunction& a, const HullFunction& b, double shift);
double hull_distance_mod_translation(const HullFunction& a, const HullFunction& b);

// Rejects omega with q omega_a within 1e-9 of an integer for some q <= 10^6.
void check_irrational(std::span<const double> omega);

// Snaps each site to the nearest sigma_j + Z within delta0; throws unclassifiable-site.
Configuration anti_continuum_labels(const Configuration& x, std::span<const double> sigma, double delta0);
// Index j of sigma_j within delta0 of x mod 1, or -1.
int classify(double x, std::span<const double> sigma, double delta0);

}  // namespace lamlab
