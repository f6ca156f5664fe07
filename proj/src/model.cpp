#include "lamlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lamlab/errors.hpp"

namespace lamlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double frac(double s) { return s - std::floor(s); }

// reduction to [-1/2, 1/2] keeps small arguments exact on either side of an integer
double reduce(double s) { return s - std::round(s); }

double circ_dist(double a, double b) {
    double d = std::abs(frac(a) - frac(b));
    return std::min(d, 1.0 - d);
}

}  // namespace

Potential::Potential(std::vector<Mode> modes, std::string name, double tol_crit)
    : modes_(std::move(modes)), name_(std::move(name)), tol_crit_(tol_crit) {
    for (const auto& md : modes_) require(md.m >= 0, "potential modes must have m >= 0");
    locate_criticals();
    finish();
}

Potential Potential::from_table(std::span<const double> samples, double tol_crit) {
    const std::size_t M = samples.size();
    require(M >= 3, "potential table needs at least 3 samples");
    std::vector<Mode> modes;
    double mean = 0;
    for (double v : samples) mean += v;
    modes.push_back({0, mean / static_cast<double>(M), 0.0});
    for (std::size_t m = 1; 2 * m <= M; ++m) {
        double a = 0, b = 0;
        for (std::size_t k = 0; k < M; ++k) {
            const double t = two_pi * static_cast<double>(m * k % M) / static_cast<double>(M);
            a += samples[k] * std::cos(t);
            b += samples[k] * std::sin(t);
        }
        // Nyquist term carries half weight and no sine part
        const double w = (2 * m == M) ? 1.0 : 2.0;
        a *= w / static_cast<double>(M);
        b = (2 * m == M) ? 0.0 : b * w / static_cast<double>(M);
        if (a != 0.0 || b != 0.0) modes.push_back({static_cast<int>(m), a, b});
    }
    return Potential(std::move(modes), "table(" + std::to_string(M) + ")", tol_crit);
}

double Potential::value(double s) const {
    const double u = reduce(s);
    double v = 0;
    for (const auto& md : modes_) {
        const double t = two_pi * md.m * u;
        v += md.a * std::cos(t) + md.b * std::sin(t);
    }
    return v;
}

double Potential::d1(double s) const {
    const double u = reduce(s);
    double v = 0;
    for (const auto& md : modes_) {
        const double w = two_pi * md.m, t = w * u;
        v += w * (md.b * std::cos(t) - md.a * std::sin(t));
    }
    return v;
}

double Potential::d2(double s) const {
    const double u = reduce(s);
    double v = 0;
    for (const auto& md : modes_) {
        const double w = two_pi * md.m, t = w * u;
        v -= w * w * (md.a * std::cos(t) + md.b * std::sin(t));
    }
    return v;
}

std::vector<double> Potential::critical_values() const {
    std::vector<double> out;
    for (const auto& c : criticals_) out.push_back(c.location);
    return out;
}

std::vector<double> Potential::minima() const {
    std::vector<double> out;
    for (const auto& c : criticals_)
        if (c.kind == CriticalKind::minimum) out.push_back(c.location);
    return out;
}

std::vector<double> Potential::maxima() const {
    std::vector<double> out;
    for (const auto& c : criticals_)
        if (c.kind == CriticalKind::maximum) out.push_back(c.location);
    return out;
}

double Potential::critical_spacing() const {
    const std::size_t n = criticals_.size();
    double best = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double next = (i + 1 < n) ? criticals_[i + 1].location : criticals_[0].location + 1.0;
        best = std::min(best, next - criticals_[i].location);
    }
    return best;
}

void Potential::locate_criticals() {
    int mmax = 0;
    for (const auto& md : modes_)
        if (md.a != 0.0 || md.b != 0.0) mmax = std::max(mmax, md.m);
    if (mmax == 0) fail(ErrorKind::not_morse, "constant potential has no isolated critical points");

    const int G = 4096 * mmax;
    std::vector<double> crit;
    double prev = d1(0.0);
    for (int k = 0; k < G; ++k) {
        const double a = static_cast<double>(k) / G, b = static_cast<double>(k + 1) / G;
        const double fb = d1(b);
        if (prev == 0.0) {
            crit.push_back(a);
        } else if (fb != 0.0 && (prev < 0) != (fb < 0)) {
            double lo = a, hi = b, flo = prev;
            for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = d1(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0) == (flo < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            crit.push_back(0.5 * (lo + hi));
        }
        prev = fb;
    }
    std::vector<CriticalPoint> out;
    for (double s : crit) {
        const double u = s >= 1.0 ? s - 1.0 : s;
        if (!out.empty() && circ_dist(u, out.back().location) < 1e-9) continue;
        out.push_back({u, d2(u) > 0 ? CriticalKind::minimum : CriticalKind::maximum});
    }
    if (out.size() > 1 && circ_dist(out.front().location, out.back().location) < 1e-9) out.pop_back();
    std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.location < y.location; });
    criticals_ = std::move(out);
}

void Potential::set_criticals(std::vector<CriticalPoint> crit) {
    criticals_ = std::move(crit);
    finish();
}

void Potential::finish() {
    const std::size_t n = criticals_.size();
    if (n < 2 || n % 2) fail(ErrorKind::not_morse, "critical points must come in min/max pairs");
    morse_gap_ = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = criticals_[i];
        if (std::abs(d1(c.location)) > tol_crit_) {
            std::ostringstream os;
            os << "V'(" << c.location << ") exceeds the critical tolerance";
            fail(ErrorKind::not_morse, os.str());
        }
        const double h = d2(c.location);
        morse_gap_ = std::min(morse_gap_, std::abs(h));
        if (criticals_[(i + 1) % n].kind == c.kind)
            fail(ErrorKind::not_morse, "minima and maxima do not alternate");
    }
    if (!(morse_gap_ > 1e-8)) fail(ErrorKind::not_morse, "degenerate critical point");
    // sup |V'''| <= sum (2 pi m)^3 |(a, b)|, exact for a single mode
    lipschitz_d2_ = 0;
    for (const auto& md : modes_) {
        const double w = two_pi * md.m;
        lipschitz_d2_ += w * w * w * std::hypot(md.a, md.b);
    }
}

Potential builtin_n_well(int n) {
    require(n >= 1, "n_well needs N >= 1");
    const double w = two_pi * n;
    Potential V({{n, -1.0 / (w * w), 0.0}}, "n_well(" + std::to_string(n) + ")");
    std::vector<CriticalPoint> crit;
    for (int j = 0; j < 2 * n; ++j)
        crit.push_back({static_cast<double>(j) / (2.0 * n), j % 2 ? CriticalKind::maximum : CriticalKind::minimum});
    V.set_criticals(std::move(crit));
    return V;
}

// ---------------------------------------------------------------- stencils

InteractionStencil::InteractionStencil(int d, int range, StencilFns fns, std::string name)
    : d_(d), r_(range), fns_(std::move(fns)), name_(std::move(name)) {
    require(d >= 1 && range >= 1, "stencil needs d >= 1 and range >= 1");
    require(fns_.energy && fns_.gradient && fns_.hessian, "stencil callbacks missing");
    ball_ = l1_ball(d, range);
    center_ = *ball_index(Site(d, 0));

    // finite-difference consistency on a fixed window
    const std::size_t n = ball_.size();
    std::vector<double> w(n), g(n), gp(n), gm(n), H(n * n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.4 * std::sin(1.7 * i + 0.3) + 0.05 * i;
    gradient(w, g);
    hessian(w, H);
    const double h = 1e-5;
    for (std::size_t i = 0; i < n; ++i) {
        auto wp = w, wm = w;
        wp[i] += h;
        wm[i] -= h;
        const double fd = (energy(wp) - energy(wm)) / (2 * h);
        if (std::abs(fd - g[i]) > 1e-5 * (1 + std::abs(g[i])))
            fail(ErrorKind::model_invalid, "stencil gradient disagrees with finite differences of its energy");
        gradient(wp, gp);
        gradient(wm, gm);
        for (std::size_t k = 0; k < n; ++k) {
            const double fdh = (gp[k] - gm[k]) / (2 * h);
            if (std::abs(fdh - H[k * n + i]) > 1e-5 * (1 + std::abs(H[k * n + i])))
                fail(ErrorKind::model_invalid, "stencil hessian disagrees with finite differences of its gradient");
        }
    }
    // integer shift invariance
    auto w1 = w;
    for (auto& v : w1) v += 1.0;
    if (std::abs(energy(w1) - energy(w)) > 1e-9 * (1 + std::abs(energy(w))))
        fail(ErrorKind::model_invalid, "stencil energy is not invariant under integer shifts");
}

std::optional<std::size_t> InteractionStencil::ball_index(std::span<const int> offset) const {
    for (std::size_t i = 0; i < ball_.size(); ++i)
        if (std::equal(ball_[i].begin(), ball_[i].end(), offset.begin(), offset.end())) return i;
    return std::nullopt;
}

std::vector<std::size_t> InteractionStencil::nearest_neighbours() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ball_.size(); ++i)
        if (l1_norm(ball_[i]) == 1) out.push_back(i);
    return out;
}

InteractionStencil pair_stencil(int d, std::vector<PairCoupling> pairs, std::string name) {
    require(!pairs.empty(), "pair stencil needs at least one coupling");
    int r = 0;
    for (const auto& p : pairs) {
        require(static_cast<int>(p.offset.size()) == d, "coupling offset has wrong dimension");
        require(l1_norm(p.offset) > 0, "coupling offset must be nonzero");
        r = std::max(r, l1_norm(p.offset));
    }
    const auto ball = l1_ball(d, r);
    auto index = [&](const Site& k) {
        return static_cast<std::size_t>(std::find(ball.begin(), ball.end(), k) - ball.begin());
    };
    // (index, weight) for each directed neighbour
    struct Arm {
        std::size_t idx;
        double w;
    };
    std::vector<Arm> arms;
    for (const auto& p : pairs) {
        Site neg = p.offset;
        for (auto& v : neg) v = -v;
        arms.push_back({index(p.offset), p.weight});
        arms.push_back({index(neg), p.weight});
    }
    const std::size_t c = index(Site(d, 0)), n = ball.size();

    StencilFns f;
    f.energy = [arms, c](std::span<const double> w) {
        double e = 0;
        for (const auto& a : arms) {
            const double dx = w[a.idx] - w[c];
            e += 0.25 * a.w * dx * dx;
        }
        return e;
    };
    f.gradient = [arms, c](std::span<const double> w, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        for (const auto& a : arms) {
            const double t = 0.5 * a.w * (w[a.idx] - w[c]);
            g[a.idx] += t;
            g[c] -= t;
        }
    };
    f.hessian = [arms, c, n](std::span<const double>, std::span<double> H) {
        std::fill(H.begin(), H.end(), 0.0);
        for (const auto& a : arms) {
            const double h = 0.5 * a.w;
            H[a.idx * n + a.idx] += h;
            H[c * n + c] += h;
            H[a.idx * n + c] -= h;
            H[c * n + a.idx] -= h;
        }
    };
    if (name.empty()) {
        std::ostringstream os;
        os << "pairs(d=" << d << ",n=" << pairs.size() << ")";
        name = os.str();
    }
    return InteractionStencil(d, r, std::move(f), std::move(name));
}

InteractionStencil builtin_harmonic_stencil(int d) {
    require(d >= 1, "harmonic stencil needs d >= 1");
    std::vector<PairCoupling> pairs;
    for (int a = 0; a < d; ++a) {
        Site e(d, 0);
        e[a] = 1;
        pairs.push_back({e, 1.0});
    }
    return pair_stencil(d, std::move(pairs), "harmonic(d=" + std::to_string(d) + ")");
}

// ---------------------------------------------------------------- constants

namespace {

struct SampleWindow {
    Box domain;
    std::vector<std::vector<std::size_t>> local;  // ball gather indices for each j in B_r(0)
    std::vector<std::size_t> self_index;          // position of the origin inside each j's ball
};

SampleWindow make_window(const InteractionStencil& S) {
    const int d = S.dim(), r = S.range();
    SampleWindow win{Box::cube(d, 2 * r), {}, {}};
    for (const auto& j : S.ball()) {
        std::vector<std::size_t> idx;
        for (const auto& o : S.ball()) {
            Site t = j;
            for (int a = 0; a < d; ++a) t[a] += o[a];
            idx.push_back(win.domain.flat(t));
        }
        win.local.push_back(std::move(idx));
        Site neg = j;
        for (auto& v : neg) v = -v;
        win.self_index.push_back(*S.ball_index(neg));
    }
    return win;
}

}  // namespace

ConditionCReport check_condition_c(const InteractionStencil& S, double K, const EstimateOptions& opt) {
    ConditionCReport rep;
    const std::size_t n = S.ball_size(), c = S.center();
    const auto nn = S.nearest_neighbours();
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(-(K + 1) / 2, (K + 1) / 2);
    std::vector<double> w(n), H(n * n);
    rep.worst_offdiag = -INFINITY;
    rep.worst_neighbour = -INFINITY;
    for (int s = 0; s < opt.n_samples; ++s) {
        for (auto& v : w) v = U(rng);
        S.hessian(w, H);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                if (i != k) rep.worst_offdiag = std::max(rep.worst_offdiag, H[i * n + k]);
        for (std::size_t k : nn) rep.worst_neighbour = std::max(rep.worst_neighbour, H[c * n + k]);
    }
    if (rep.worst_offdiag > 1e-12) {
        rep.holds = false;
        rep.detail = "positive off-diagonal second derivative";
    } else if (!(rep.worst_neighbour < 0)) {
        rep.holds = false;
        rep.detail = "nearest-neighbour coupling is not strictly negative";
    }
    return rep;
}

ModelConstants estimate_constants(const Potential& V, const InteractionStencil& S, double k, double K,
                                  const ConstantOverrides& over, const EstimateOptions& opt) {
    require(k > 0 && k < 1, "contraction_k must lie in (0, 1)");
    require(K > 0, "osc_K must be positive");
    require(opt.n_samples > 0, "need at least one sample window");

    auto cond = check_condition_c(S, K, opt);
    if (!cond.holds) fail(ErrorKind::model_invalid, "condition C fails: " + cond.detail);

    const auto win = make_window(S);
    const std::size_t n = S.ball_size();
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(-(K + 1) / 2, (K + 1) / 2);
    std::vector<double> x(win.domain.size()), w(n), g(n), H(n * n);
    double C1 = 0, C2 = 0;
    for (int s = 0; s < opt.n_samples; ++s) {
        for (auto& v : x) v = U(rng);
        double c1 = 0, c2 = 0;
        for (std::size_t j = 0; j < win.local.size(); ++j) {
            for (std::size_t q = 0; q < n; ++q) w[q] = x[win.local[j][q]];
            S.gradient(w, g);
            S.hessian(w, H);
            const std::size_t row = win.self_index[j];
            c1 += std::abs(g[row]);
            for (std::size_t q = 0; q < n; ++q) c2 += std::abs(H[row * n + q]);
        }
        C1 = std::max(C1, c1);
        C2 = std::max(C2, c2);
    }

    ModelConstants mc;
    mc.c = V.morse_gap();
    mc.C1 = over.C1.value_or(C1);
    mc.C2 = over.C2.value_or(C2);
    mc.contraction_k = k;
    mc.osc_bound_K = K;
    mc.lipschitz_d2 = V.lipschitz_d2();
    mc.critical_spacing = V.critical_spacing();
    mc.delta0 = over.delta0.value_or(std::min(k * mc.c / (2 * mc.lipschitz_d2), mc.critical_spacing / 2));
    require(mc.C1 > 0 && mc.C2 > 0 && mc.delta0 > 0, "constants must be positive");
    mc.eps0 = std::min(k * mc.c / (2 * mc.C2), (1 - k) * mc.delta0 * mc.c / mc.C1);
    mc.eps1 = std::min(2 * mc.c / mc.C2, mc.eps0);
    return mc;
}

double default_osc_bound(int range, std::span<const double> omega) {
    double n = 0;
    for (double w : omega) n += std::abs(w);
    return range * n + 2.0;
}

Model make_model(Potential V, InteractionStencil S, double k, std::optional<double> K, const ConstantOverrides& over) {
    const double KK = K.value_or(S.range() * S.dim() + 2.0);
    auto mc = estimate_constants(V, S, k, KK, over);
    return Model{std::move(V), std::move(S), mc};
}

}  // namespace lamlab
