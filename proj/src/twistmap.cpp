#include "lamlab/twistmap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lamlab/errors.hpp"
#include "lamlab/parallel.hpp"

namespace lamlab {

namespace {

double circ_diff(double a, double b) {
    const double d = a - b;
    return std::abs(d - std::round(d));
}

void require_fk_model(const Model& model) {
    require(model.dim() == 1 && model.range() == 1, "twist map needs a one-dimensional nearest-neighbour model");
}

}  // namespace

Point2 standard_map_step(const Potential& V, double eps, Point2 p) {
    require(eps > 0, "the twist map needs eps > 0");
    const double kick = V.d1(p.x) / eps;
    return {p.x + p.y + kick, p.y + kick};
}

Point2 lifted_map_step(const Potential& V, double eps, Point2 p) {
    require(eps > 0, "the twist map needs eps > 0");
    return {p.y, 2 * p.y - p.x + V.d1(p.y) / eps};
}

Point2 conjugacy(Point2 p) { return {p.y, p.y - p.x}; }

std::vector<double> fk_residual(const Potential& V, double eps, const Configuration& x) {
    require(x.domain().dim() == 1 && x.size() >= 3, "FK residual needs a 1-D configuration of length >= 3");
    std::vector<double> r;
    for (std::size_t f = 1; f + 1 < x.size(); ++f) r.push_back(V.d1(x[f]) - eps * (x[f + 1] - 2 * x[f] + x[f - 1]));
    return r;
}

CantorusResult extract_cantorus(const Model& model, double eps, const HullFunction& labels, double omega, int radius,
                                int n_samples, const CantorusOptions& opt) {
    require_fk_model(model);
    require(eps > 0, "cantorus extraction needs eps > 0");
    require(n_samples >= 2 && radius >= 4, "need at least two samples and radius >= 4");
    const std::vector<double> om{omega};
    check_irrational(om);
    const Box window = Box::interval(-radius, radius);

    CantorusResult out;
    out.points.resize(static_cast<std::size_t>(n_samples));
    std::vector<Point2> next(out.points.size());
    parallel_for(out.points.size(), opt.threads, [&](std::size_t m) {
        double s = opt.s0 + static_cast<double>(m) * omega;
        s -= std::floor(s);
        const auto x0 = sample_config(labels, om, s, window);
        const auto res = continue_window(model, eps, x0, opt.continuation);
        const auto& x = res.solution;
        const Site o{0}, left{-1};
        out.points[m] = {s, x.at(o), x.at(o) - x.at(left)};
        next[m] = standard_map_step(model.V, eps, {out.points[m].x, out.points[m].y});
    });

    double sum = 0;
    for (std::size_t m = 0; m < out.points.size(); ++m) {
        sum += out.points[m].y;
        if (m + 1 < out.points.size()) {
            const auto& q = out.points[m + 1];
            const double e = std::max(circ_diff(next[m].x, q.x), std::abs(next[m].y - q.y));
            if (e > out.invariance_error) {
                out.invariance_error = e;
                out.worst = m;
            }
        }
    }
    out.mean_momentum = sum / static_cast<double>(out.points.size());
    out.invariant = out.invariance_error <= opt.invariance_tol;

    auto sorted = out.points;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.s < b.s; });
    for (std::size_t m = 1; m < sorted.size(); ++m)
        if (sorted[m].x < sorted[m - 1].x - 1e-9) out.order_preserving = false;
    return out;
}

TwistOrbit chaotic_momentum_orbit(const Model& model, double eps, const Configuration& labels,
                                  const ContinuationOptions& opt) {
    require_fk_model(model);
    require(eps > 0, "orbit needs eps > 0");
    TwistOrbit orb;
    orb.continuation = continue_window(model, eps, labels, opt);
    const auto& x = orb.continuation.solution;
    const int lo = labels.domain().lo()[0], hi = labels.domain().hi()[0];
    // equations hold on [lo + 2, hi - 2]
    for (int i = lo + 2; i <= hi - 1; ++i) {
        const Site a{i}, b{i - 1};
        orb.sites.push_back(i);
        orb.points.push_back({x.at(a), x.at(a) - x.at(b)});
    }
    for (std::size_t q = 0; q + 1 < orb.points.size(); ++q) {
        const auto t = standard_map_step(model.V, eps, orb.points[q]);
        orb.map_residual = std::max(
            {orb.map_residual, std::abs(t.x - orb.points[q + 1].x), std::abs(t.y - orb.points[q + 1].y)});
    }
    return orb;
}

Configuration coin_flip_labels(double sigma, const Box& window, std::uint64_t seed) {
    require(window.dim() == 1, "coin-flip labels are one-dimensional");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    Configuration x(window);
    double v = sigma;
    for (std::size_t f = 0; f < x.size(); ++f) {
        if (f) v += coin(rng) ? 1.0 : 0.0;
        x[f] = v;
    }
    return x;
}

}  // namespace lamlab
