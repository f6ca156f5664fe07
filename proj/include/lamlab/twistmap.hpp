#pragma once

#include <cstdint>
#include <vector>

#include "lamlab/continuation.hpp"
#include "lamlab/hull.hpp"
#include "lamlab/model.hpp"

namespace lamlab {

struct Point2 {
    double x, y;
};

// T_eps(x, y) = (x + y + V'(x)/eps, y + V'(x)/eps)
Point2 standard_map_step(const Potential& V, double eps, Point2 p);
// t_eps(X_{i-1}, X_i) = (X_i, 2 X_i - X_{i-1} + V'(X_i)/eps)
Point2 lifted_map_step(const Potential& V, double eps, Point2 p);
// h(a, b) = (b, b - a) conjugates t_eps to T_eps
Point2 conjugacy(Point2 p);

// V'(x_i) - eps (x_{i+1} - 2 x_i + x_{i-1}) for lo < i < hi of a 1-D configuration
std::vector<double> fk_residual(const Potential& V, double eps, const Configuration& x);

struct CantorusPoint {
    double s, x, y;
};

struct CantorusOptions {
    double s0 = kGenericOffset;
    double invariance_tol = 1e-8;
    ContinuationOptions continuation{1e-13, 200};
    int threads = 1;
};

struct CantorusResult {
    std::vector<CantorusPoint> points;  // along the rotation orbit s_m = s0 + m omega mod 1
    double invariance_error = 0;        // max over m of |T(p_m) - p_{m+1}|, x taken mod 1
    std::size_t worst = 0;
    bool invariant = true;
    bool order_preserving = true;  // x nondecreasing in s
    double mean_momentum = 0;
};

// Continues the label hull on [-radius, radius] at each orbit sample and records
// (x_0, x_0 - x_{-1}); needs a one-dimensional nearest-neighbour model.
CantorusResult extract_cantorus(const Model& model, double eps, const HullFunction& labels, double omega, int radius,
                                int n_samples, const CantorusOptions& opt = {});

struct TwistOrbit {
    std::vector<int> sites;
    std::vector<Point2> points;  // (x_i, x_i - x_{i-1})
    double map_residual = 0;     // max |T(p_i) - p_{i+1}| over interior consecutive pairs
    ContinuationResult continuation;
};

TwistOrbit chaotic_momentum_orbit(const Model& model, double eps, const Configuration& labels,
                                  const ContinuationOptions& opt = {1e-13, 200});

// x_i = sigma + sum of fair {0, 1} increments, anchored at x_lo = sigma
Configuration coin_flip_labels(double sigma, const Box& window, std::uint64_t seed);

}  // namespace lamlab
