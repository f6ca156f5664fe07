#include "lamlab/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lamlab/errors.hpp"

namespace lamlab {

namespace {

double frac(double s) { return s - std::floor(s); }

double circ_dist(double a, double b) {
    double d = std::abs(frac(a) - frac(b));
    return std::min(d, 1.0 - d);
}

double dot_site(std::span<const double> omega, std::span<const int> i) {
    double t = 0;
    for (std::size_t a = 0; a < omega.size(); ++a) t += omega[a] * i[a];
    return t;
}

}  // namespace

SimplexPoint::SimplexPoint(std::vector<double> p) : p_(std::move(p)) {
    require(!p_.empty(), "simplex point needs at least one entry");
    double sum = 0;
    for (double v : p_) {
        require(std::isfinite(v) && v >= 0, "simplex entries must be nonnegative");
        sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-6, "simplex entries must sum to 1");
    if (sum != 1.0)
        for (auto& v : p_) v /= sum;
}

double simplex_l1(const SimplexPoint& a, const SimplexPoint& b) {
    require(a.size() == b.size(), "simplex points differ in size");
    double d = 0;
    for (std::size_t j = 0; j < a.size(); ++j) d += std::abs(a[j] - b[j]);
    return d;
}

HullFunction::HullFunction(std::vector<double> breakpoints, std::vector<double> values, std::vector<double> lengths)
    : t_(std::move(breakpoints)), v_(std::move(values)), len_(std::move(lengths)) {
    const std::size_t M = t_.size();
    require(M >= 1 && v_.size() == M, "hull needs matching breakpoints and values");
    for (std::size_t m = 0; m < M; ++m) {
        require(t_[m] > 0 && t_[m] <= 1, "hull breakpoints must lie in (0, 1]");
        if (m) {
            require(t_[m] > t_[m - 1], "hull breakpoints must increase strictly");
            require(v_[m] > v_[m - 1], "hull values must increase strictly");
        }
    }
    require(v_[M - 1] < v_[0] + 1, "hull values must span less than one period");
    if (len_.empty()) {
        len_.resize(M);
        len_[0] = t_[0] - (t_[M - 1] - 1.0);
        for (std::size_t m = 1; m < M; ++m) len_[m] = t_[m] - t_[m - 1];
    }
    require(len_.size() == M, "hull lengths do not match breakpoints");
}

double HullFunction::lower(double s) const {
    const double tM = t_.back();
    const double k = std::ceil(s - tM - kBreakTol);
    const double u = s - k;
    for (std::size_t m = 0; m < t_.size(); ++m)
        if (u <= t_[m] + kBreakTol) return v_[m] + k;
    return v_[0] + k + 1;
}

double HullFunction::upper(double s) const {
    const double tM = t_.back();
    const double k = std::floor(s - tM + 1 + kBreakTol);
    const double u = s - k;
    for (std::size_t m = 0; m < t_.size(); ++m)
        if (u < t_[m] - kBreakTol) return v_[m] + k;
    return v_[0] + k + 1;
}

HullFunction step_hull_from_simplex(const SimplexPoint& p, std::span<const double> sigma) {
    require(p.size() == sigma.size(), "simplex point and critical list differ in length");
    for (std::size_t j = 0; j < sigma.size(); ++j) {
        require(sigma[j] >= 0 && sigma[j] < 1, "critical values must lie in [0, 1)");
        if (j) require(sigma[j] > sigma[j - 1], "critical values must be sorted");
    }
    // normalized values live in (0, 1]: sigma_j > 0 keeps its value, sigma = 0 becomes 1
    struct Plateau {
        double value, length;
    };
    std::vector<Plateau> pl;
    for (std::size_t j = 0; j < sigma.size(); ++j)
        if (p[j] > 0) pl.push_back({sigma[j] > 0 ? sigma[j] : 1.0, p[j]});
    std::sort(pl.begin(), pl.end(), [](auto& a, auto& b) { return a.value < b.value; });
    std::vector<double> t, v, len;
    double acc = 0;
    for (std::size_t m = 0; m < pl.size(); ++m) {
        acc += pl[m].length;
        t.push_back(m + 1 == pl.size() ? 1.0 : acc);
        v.push_back(pl[m].value);
        len.push_back(pl[m].length);
    }
    return HullFunction(std::move(t), std::move(v), std::move(len));
}

Configuration sample_config(const HullFunction& phi, std::span<const double> omega, double s, const Box& window,
                            HullSide side) {
    require(static_cast<int>(omega.size()) == window.dim(), "omega and window differ in dimension");
    Configuration x(window);
    for (std::size_t f = 0; f < window.size(); ++f) x[f] = phi.eval(s + dot_site(omega, window.site(f)), side);
    return x;
}

HullFunction empirical_hull(const Configuration& x, std::span<const double> omega) {
    const Box& dom = x.domain();
    require(static_cast<int>(omega.size()) == dom.dim(), "omega and configuration differ in dimension");
    struct Pt {
        double u, w;
        std::size_t f;
    };
    std::vector<Pt> pts;
    pts.reserve(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) {
        const double th = dot_site(omega, dom.site(f));
        const double fl = std::floor(th);
        pts.push_back({th - fl, x[f] - fl, f});
    }
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.u < b.u || (a.u == b.u && a.w < b.w); });

    auto violation = [&](const Pt& a, const Pt& b) {
        std::ostringstream os;
        os << "configuration is not monotone along the rotation: sites " << site_string(dom.site(a.f)) << " and "
           << site_string(dom.site(b.f));
        fail(ErrorKind::not_birkhoff, os.str());
    };
    const double tol = 1e-12;
    for (std::size_t n = 1; n < pts.size(); ++n) {
        if (pts[n].w < pts[n - 1].w - tol) violation(pts[n - 1], pts[n]);
        if (pts[n].u == pts[n - 1].u && pts[n].w > pts[n - 1].w + tol) violation(pts[n - 1], pts[n]);
    }
    if (pts.back().w > pts.front().w + 1 + tol) violation(pts.front(), pts.back());

    // one plateau per run of equal values, ending at the last point of the run
    struct Group {
        double t, v;
    };
    std::vector<Group> g;
    for (std::size_t n = 0; n < pts.size(); ++n) {
        if (!g.empty() && std::abs(pts[n].w - g.back().v) <= tol)
            g.back().t = pts[n].u;
        else
            g.push_back({pts[n].u, pts[n].w});
    }
    // last run equal to the first shifted by one period wraps around
    if (g.size() > 1 && std::abs(g.back().v - (g.front().v + 1)) <= tol) g.pop_back();
    if (g.front().t == 0.0) {
        g.push_back({1.0, g.front().v + 1});
        g.erase(g.begin());
    }
    std::vector<double> t, v;
    for (auto& q : g) {
        t.push_back(q.t);
        v.push_back(q.v);
    }
    return HullFunction(std::move(t), std::move(v));
}

double hull_l1_at_shift(const HullFunction& a, const HullFunction& b, double shift) {
    std::vector<double> cuts = {0.0, 1.0};
    for (double t : a.breakpoints()) cuts.push_back(frac(t));
    for (double t : b.breakpoints()) cuts.push_back(frac(t - shift));
    std::sort(cuts.begin(), cuts.end());
    double total = 0;
    for (std::size_t n = 1; n < cuts.size(); ++n) {
        const double len = cuts[n] - cuts[n - 1];
        if (len <= 0) continue;
        const double mid = 0.5 * (cuts[n] + cuts[n - 1]);
        total += len * std::abs(a(mid) - b(mid + shift));
    }
    return total;
}

double hull_distance_mod_translation(const HullFunction& a, const HullFunction& b) {
    // the integral is piecewise linear in the shift with kinks where breakpoints align;
    // shifts c and c - 1 differ by a unit in value, so both are candidates
    double best = hull_l1_at_shift(a, b, 0.0);
    for (double ta : a.breakpoints())
        for (double tb : b.breakpoints()) {
            const double c = frac(tb - ta);
            best = std::min({best, hull_l1_at_shift(a, b, c), hull_l1_at_shift(a, b, c - 1)});
        }
    return best;
}

void check_irrational(std::span<const double> omega) {
    require(!omega.empty(), "rotation vector is empty");
    for (double w : omega) {
        require(std::isfinite(w), "rotation vector must be finite");
        for (long q = 1; q <= 1000000; ++q) {
            const long double qw = static_cast<long double>(q) * w;
            if (std::abs(qw - std::round(qw)) <= 1e-9L) {
                std::ostringstream os;
                os.precision(17);
                os << "rotation component " << w << " is rational with denominator " << q;
                fail(ErrorKind::invalid_argument, os.str());
            }
        }
    }
}

int classify(double x, std::span<const double> sigma, double delta0) {
    for (std::size_t j = 0; j < sigma.size(); ++j)
        if (circ_dist(x, sigma[j]) < delta0) return static_cast<int>(j);
    return -1;
}

Configuration anti_continuum_labels(const Configuration& x, std::span<const double> sigma, double delta0) {
    Configuration out(x.domain());
    for (std::size_t f = 0; f < x.size(); ++f) {
        const int j = classify(x[f], sigma, delta0);
        if (j < 0) fail(ErrorKind::unclassifiable_site, "site " + site_string(x.domain().site(f)) + " is not near a critical point");
        out[f] = sigma[j] + std::round(x[f] - sigma[j]);
    }
    return out;
}

}  // namespace lamlab
