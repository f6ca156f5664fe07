#pragma once

#include <span>
#include <vector>

#include "lamlab/lattice.hpp"
#include "lamlab/model.hpp"

namespace lamlab {

// Finite-box action W_B = sum_{j in B} V(x_j) + eps S_j(x) and its interior gradient.
// Configurations may be passed as base + disp; local windows are evaluated relative to the
// integer part of the base so that small displacements keep full precision.
class ActionEvaluator {
  public:
    ActionEvaluator(const Model& model, const Box& B, const Box& domain);

    const Box& box() const { return B_; }
    const Box& domain() const { return domain_; }
    const Box& interior() const { return interior_; }
    const std::vector<std::size_t>& box_indices() const { return box_idx_; }
    const std::vector<std::size_t>& interior_indices() const { return int_idx_; }

    double action(std::span<const double> base, std::span<const double> disp, double eps) const;
    double action(std::span<const double> x, double eps) const { return action(x, {}, eps); }
    // V(x_j) + eps S_j(x) for each j in B, in box order
    void local_terms(std::span<const double> base, std::span<const double> disp, double eps,
                     std::span<double> out) const;
    // V'(x_i) + eps R_i(x) for each interior site, in interior order
    void residual(std::span<const double> base, std::span<const double> disp, double eps,
                  std::span<double> out) const;
    std::vector<double> residual(std::span<const double> x, double eps) const;

  private:
    void gather(std::span<const double> base, std::span<const double> disp, std::size_t j, std::span<double> w) const;

    const Model& model_;
    Box B_, domain_, interior_;
    std::vector<std::size_t> box_idx_, int_idx_;
    std::vector<std::ptrdiff_t> ball_off_;
};

// sup-norm of the interior residual
double sup_residual(const Model& model, double eps, const Box& B, const Configuration& x);

}  // namespace lamlab
