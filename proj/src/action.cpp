#include "lamlab/action.hpp"

#include <cmath>

#include "lamlab/errors.hpp"

namespace lamlab {

ActionEvaluator::ActionEvaluator(const Model& model, const Box& B, const Box& domain)
    : model_(model), B_(B), domain_(domain) {
    const int r = model.range();
    require(B.dim() == model.dim(), "box dimension does not match the model");
    require(domain.contains(B.expanded(r)), "configuration must cover the box plus an interaction collar");
    auto in = B.interior(r);
    require(in.has_value(), "box is too small to have interior sites");
    interior_ = *in;
    box_idx_ = B.indices_in(domain);
    int_idx_ = interior_.indices_in(domain);
    for (const auto& o : model.S.ball()) {
        std::ptrdiff_t off = 0;
        for (int a = 0; a < B.dim(); ++a) off += o[a] * domain.strides()[a];
        ball_off_.push_back(off);
    }
}

void ActionEvaluator::gather(std::span<const double> base, std::span<const double> disp, std::size_t j,
                             std::span<double> w) const {
    const double n = std::round(base[j]);
    for (std::size_t q = 0; q < ball_off_.size(); ++q) {
        const std::size_t f = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + ball_off_[q]);
        w[q] = (base[f] - n) + (disp.empty() ? 0.0 : disp[f]);
    }
}

void ActionEvaluator::local_terms(std::span<const double> base, std::span<const double> disp, double eps,
                                  std::span<double> out) const {
    std::vector<double> w(ball_off_.size());
    for (std::size_t q = 0; q < box_idx_.size(); ++q) {
        const std::size_t j = box_idx_[q];
        const double xj = (base[j] - std::round(base[j])) + (disp.empty() ? 0.0 : disp[j]);
        double t = model_.V.value(xj);
        if (eps != 0.0) {
            gather(base, disp, j, w);
            t += eps * model_.S.energy(w);
        }
        out[q] = t;
    }
}

double ActionEvaluator::action(std::span<const double> base, std::span<const double> disp, double eps) const {
    std::vector<double> t(box_idx_.size());
    local_terms(base, disp, eps, t);
    double s = 0;
    for (double v : t) s += v;
    return s;
}

void ActionEvaluator::residual(std::span<const double> base, std::span<const double> disp, double eps,
                               std::span<double> out) const {
    const std::size_t n = ball_off_.size();
    std::vector<double> force;
    if (eps != 0.0) {
        force.assign(domain_.size(), 0.0);
        std::vector<double> w(n), g(n);
        for (std::size_t j : box_idx_) {
            gather(base, disp, j, w);
            model_.S.gradient(w, g);
            for (std::size_t q = 0; q < n; ++q)
                force[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + ball_off_[q])] += g[q];
        }
    }
    for (std::size_t q = 0; q < int_idx_.size(); ++q) {
        const std::size_t i = int_idx_[q];
        const double xi = (base[i] - std::round(base[i])) + (disp.empty() ? 0.0 : disp[i]);
        out[q] = model_.V.d1(xi) + (eps != 0.0 ? eps * force[i] : 0.0);
    }
}

std::vector<double> ActionEvaluator::residual(std::span<const double> x, double eps) const {
    std::vector<double> out(int_idx_.size());
    residual(x, {}, eps, out);
    return out;
}

double sup_residual(const Model& model, double eps, const Box& B, const Configuration& x) {
    ActionEvaluator ev(model, B, x.domain());
    double m = 0;
    for (double v : ev.residual(x.values(), eps)) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace lamlab
