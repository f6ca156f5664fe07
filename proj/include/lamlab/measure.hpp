#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lamlab/continuation.hpp"
#include "lamlab/hull.hpp"
#include "lamlab/model.hpp"

namespace lamlab {

struct Atom {
    double location;  // in [0, 1)
    double mass;
};

// Probability measure on R/Z: atoms plus an optional hull whose Lebesgue push-forward carries
// the remaining mass.
struct CircleMeasure {
    std::vector<Atom> atoms;
    std::optional<HullFunction> continuous_part;

    double total_mass() const;
    // continuous part folded into atoms; step hulls push forward to atoms
    CircleMeasure atomized() const;
};

CircleMeasure measure_from_hull(const HullFunction& phi);

struct DensityRow {
    int radius;
    std::size_t sites;
    std::vector<double> phat;
};

struct DensityResult {
    CircleMeasure measure;  // from the largest radius
    std::vector<DensityRow> table;
};

// Counts sites of the L1 balls of radius n/4, n/2, n classified to sigma_j within delta0.
DensityResult measure_from_density(const Configuration& x, std::span<const double> sigma, double delta0, int n);

double integrate(const CircleMeasure& mu, const std::function<double(double)>& f);

// Total variation between atomic measures; atoms closer than 1e-12 are identified.
double vague_distance(const CircleMeasure& a, const CircleMeasure& b);

struct PsiOptions {
    double s = kGenericOffset;
    ContinuationOptions continuation;
};

struct PsiResult {
    DensityResult density;
    ContinuationResult continuation;
};

// Continues the hull sample of p over the minima on the cube of radius n + 2r and measures
// site densities on B_n(0).
PsiResult psi_epsilon(const Model& model, double eps, const SimplexPoint& p, std::span<const double> omega, int n,
                      const PsiOptions& opt = {});

// Points of the grid with the given spacing inside the simplex of dimension N - 1.
std::vector<SimplexPoint> simplex_grid(int N, double spacing);

}  // namespace lamlab
