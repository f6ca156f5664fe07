// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "lamlab/action.hpp"
#include "lamlab/birkhoff.hpp"
#include "lamlab/continuation.hpp"
#include "lamlab/errors.hpp"
#include "lamlab/measure.hpp"
#include "lamlab/twistmap.hpp"

using namespace lamlab;

namespace {

const double kGolden = (std::sqrt(5.0) - 1) / 2;
const std::vector<double> kOmega{kGolden};

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&, std::string&)>& body) {
    Outcome o;
    std::string info;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o, info);
    } catch (const Error& e) {
        o.require(false, std::string(kind_name(e.kind())) + ": " + e.what());
    } catch (const std::exception& e) {
        o.require(false, e.what());
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s (%.2f s) %s%s%s\n", o.pass ? "PASS" : "FAIL", id, title, sec, info.c_str(),
                o.detail.empty() ? "" : " | ", o.detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Model chain(int N, int d = 1) { return make_model(builtin_n_well(N), builtin_harmonic_stencil(d)); }

Configuration labels(const Model& m, const std::vector<double>& p, std::span<const double> omega, const Box& w,
                     double s = kGenericOffset) {
    return sample_config(step_hull_from_simplex(SimplexPoint(p), m.V.minima()), omega, s, w);
}

// golden-section search of the action along one coordinate, others frozen
double line_search_drop(const ActionEvaluator& ev, Configuration z, std::size_t f, double eps, double half) {
    const double c = z[f];
    auto W = [&](double t) {
        z[f] = c + t;
        return ev.action(z.values(), eps);
    };
    double a = -half, b = half;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
        const double u = b - g * (b - a), v = a + g * (b - a);
        if (W(u) < W(v))
            b = v;
        else
            a = u;
    }
    return W(0.5 * (a + b)) - W(0.0);
}

}  // namespace

int main() {
    criterion(1, "continuation contract", [](Outcome& o, std::string& info) {
        const auto m = chain(2);
        const auto& c = m.constants;
        const double eps = c.eps1 / 2;
        const auto x0 = labels(m, {0.5, 0.5}, kOmega, Box::interval(-64, 64));
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = continue_window(m, eps, x0);
        const double sec = seconds_since(t0);
        const double rate_cap = c.contraction_k / 2 + eps * c.C2 / c.c + 0.05;
        info = fmt("iterations %d, residual %.2e, rate %.2e (cap %.3f), max shift %.2e / delta0 %.2e", r.iterations,
                   r.final_residual, r.contraction_rate, rate_cap, r.max_displacement, c.delta0);
        o.require(r.final_residual < 1e-12, "residual");
        o.require(r.iterations <= 60, "iterations");
        o.require(r.contraction_rate <= rate_cap, "contraction rate");
        o.require(r.trust_radius_ok && r.max_displacement < c.delta0, "left the trust ball");
        o.require(sec < 1.0, "runtime");
    });

    criterion(2, "eps to zero limit", [](Outcome& o, std::string& info) {
        const auto m = chain(2);
        const auto& c = m.constants;
        const auto x0 = labels(m, {0.5, 0.5}, kOmega, Box::interval(-64, 64));
        double prev = INFINITY;
        for (int j = 1; j <= 4; ++j) {
            const double eps = c.eps1 / (1 << j);
            const auto r = continue_window(m, eps, x0);
            double dist = 0;
            for (std::size_t f = 0; f < x0.size(); ++f) dist = std::max(dist, std::abs(r.solution[f] - x0[f]));
            const double bound = eps * c.C1 / ((1 - c.contraction_k) * c.c);
            info += fmt("%s%.2e<=%.2e", j > 1 ? ", " : "", dist, bound);
            o.require(dist <= bound, fmt("bound at j=%d", j));
            o.require(dist <= prev + 1e-10, fmt("monotonicity at j=%d", j));
            prev = dist;
        }
    });

    criterion(3, "truncation control", [](Outcome& o, std::string& info) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto m = chain(1);
        const auto& c = m.constants;
        const double eps = c.eps1 / 2;
        const int r = m.range(), M1 = 10;
        const auto phi = step_hull_from_simplex(SimplexPoint({1.0}), m.V.minima());
        const int far = 2 * (M1 + 20 * r) - M1 + r;

        const auto x0 = sample_config(phi, kOmega, kGenericOffset, Box::interval(-far, far));
        const auto main = truncation_consistency(m, eps, x0, 1e-15, M1, M1 + 20 * r);
        info = fmt("M2=M1+20r: diff %.2e <= %.2e", main.difference, main.bound);
        o.require(main.difference <= main.bound, "discrepancy exceeds 2 delta0 2^-20");

        // decay curve: worst case over hull shifts for five window gaps
        const int gaps = 5, shifts = 32;
        std::vector<double> env(gaps, 0.0);
        for (int q = 0; q < shifts; ++q) {
            const double s = kGenericOffset + (q + 0.5) / shifts;
            const auto xs = sample_config(phi, kOmega, s, Box::interval(-far, far));
            for (int g = 1; g <= gaps; ++g) {
                const auto rep = truncation_consistency(m, eps, xs, 1e-16, M1, M1 + g * r);
                env[g - 1] = std::max(env[g - 1], rep.difference);
            }
        }
        // least-squares slope of log(env) against g
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int g = 1; g <= gaps; ++g) {
            if (env[g - 1] <= 0) continue;
            const double y = std::log(env[g - 1]);
            sx += g;
            sy += y;
            sxx += g * g;
            sxy += g * y;
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        info += fmt(", decay slope %.3f per r sites over %d gaps (bound slope %.3f)", slope, n, -std::log(2.0));
        o.require(n == gaps, "discrepancy vanished before the fifth gap");
        // the propagation bound is an upper bound; the measured decay must be at least as steep within 15%
        o.require(slope <= -0.85 * std::log(2.0), "decay slower than the propagation bound");
        o.require(seconds_since(t0) < 5.0, "runtime");
    });

    criterion(4, "order persistence at minima", [](Outcome& o, std::string& info) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto m = chain(2);
        const double eps = m.constants.eps1 / 2, d0 = m.constants.delta0;
        const Box W = Box::interval(-64, 64);
        const std::vector<std::vector<double>> ps{{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}, {0.3, 0.7}};
        LaminationOptions opt;
        opt.k_max = 16;
        opt.threads = 4;
        for (const auto& p : ps) {
            const auto lam = continue_lamination(m, eps, SimplexPoint(p), kOmega, W, 32, opt);
            std::size_t bad = 0;
            for (const auto& mem : lam.members) bad += mem.verdict.ordered ? 0 : 1;
            info += fmt("p=(%.1f,%.1f): ties %zu, sep %.3f; ", p[0], p[1], lam.identical_pairs,
                        lam.min_label_separation);
            o.require(bad == 0, fmt("%zu Birkhoff failures at p=(%.1f,%.1f)", bad, p[0], p[1]));
            o.require(lam.identical_pairs == 0, fmt("tied members at p=(%.1f,%.1f)", p[0], p[1]));
            if (std::isfinite(lam.min_label_separation))
                o.require(lam.min_label_separation >= lam.min_label_gap - 2 * d0, "members too close");
        }
        o.require(seconds_since(t0) < 30.0, "runtime");
    });

    criterion(5, "order breakdown at maxima", [](Outcome& o, std::string& info) {
        const auto m = chain(1);
        const double eps = m.constants.eps1 / 2;
        const Box W = Box::interval(-64, 64);
        const auto brk = maximum_breaks_order(m, eps, kOmega, W);
        const auto ctrl = order_break_probe(m, eps, kOmega, W, m.V.minima().front());
        info = fmt("witness k=%d l=%ld magnitude %.2e at sites %s/%s; control pairs %zu", brk.k[0], brk.l,
                   brk.magnitude, site_string(brk.greater_site).c_str(), site_string(brk.less_site).c_str(),
                   ctrl.pairs_tried);
        o.require(brk.violated, "no witness");
        o.require(!ctrl.violated && ctrl.pairs_tried > 0, "control run over a minimum broke the order");
    });

    criterion(6, "measure recovery", [](Outcome& o, std::string& info) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto m = chain(2);
        const double eps = m.constants.eps1 / 2;
        const int n = 377;
        const std::vector<double> p{0.3, 0.7};
        const auto psi = psi_epsilon(m, eps, SimplexPoint(p), kOmega, n);
        const double tol = 4.0 * 2 / n;
        double err = 0;
        for (std::size_t j = 0; j < 2; ++j) err = std::max(err, std::abs(psi.density.table.back().phat[j] - p[j]));
        info = fmt("d=1 error %.4f (tol %.4f)", err, tol);
        o.require(err <= tol, "d=1 density");

        const auto grid = simplex_grid(2, 0.25);
        std::vector<CircleMeasure> mus;
        for (const auto& q : grid) mus.push_back(psi_epsilon(m, eps, q, kOmega, n).density.measure);
        double worst = INFINITY;
        for (std::size_t a = 0; a < grid.size(); ++a)
            for (std::size_t b = a + 1; b < grid.size(); ++b)
                worst = std::min(worst, vague_distance(mus[a], mus[b]) - simplex_l1(grid[a], grid[b]));
        info += fmt(", injectivity slack %.4f over %zu points", worst, grid.size());
        o.require(grid.size() == 5 && worst >= -0.05, "injectivity");

        const auto m2 = chain(2, 2);
        const std::vector<double> om2{std::sqrt(2.0) - 1, std::sqrt(3.0) - 1};
        const auto psi2 = psi_epsilon(m2, m2.constants.eps1 / 2, SimplexPoint(p), om2, 60);
        double err2 = 0;
        for (std::size_t j = 0; j < 2; ++j) err2 = std::max(err2, std::abs(psi2.density.table.back().phat[j] - p[j]));
        info += fmt(", d=2 error %.4f", err2);
        o.require(err2 <= 0.05, "d=2 density");
        o.require(seconds_since(t0) < 120.0, "runtime");
    });

    criterion(7, "min-max inequality", [](Outcome& o, std::string& info) {
        std::vector<Model> models{chain(1), chain(2), chain(3), chain(2, 2),
                                  make_model(builtin_n_well(2), pair_stencil(1, {{{1}, 1.0}, {{2}, 0.25}}, "two-range"))};
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> U(-1.5, 1.5);
        double worst = INFINITY;
        std::size_t strict = 0, total = 0;
        for (const auto& m : models) {
            const Box B = Box::cube(m.dim(), m.dim() == 1 ? 12 : 5);
            const Box D = B.expanded(m.range());
            const double eps = m.constants.eps1 / 2;
            for (int t = 0; t < 100; ++t) {
                Configuration x(D), y(D);
                for (std::size_t f = 0; f < D.size(); ++f) {
                    x[f] = U(rng);
                    y[f] = U(rng);
                }
                const auto rep = check_minmax_inequality(m, eps, B, x, y);
                worst = std::min(worst, rep.slack());
                strict += rep.slack() > 0 ? 1 : 0;
                ++total;
                const auto mj = meet_join(x, y);
                const auto eq = check_minmax_inequality(m, eps, B, mj.meet, mj.join);
                o.require(eq.slack() == 0.0, "ordered pair without equality");
            }
        }
        info = fmt("%zu pairs, smallest slack %.3e, strict on %zu", total, worst, strict);
        o.require(worst >= -1e-10, "negative slack");
        o.require(strict == total, "crossing pair with equality");
    });

    criterion(8, "comparison principle", [](Outcome& o, std::string& info) {
        const auto m = chain(2);
        const double eps = m.constants.eps1 / 2, d0 = m.constants.delta0;
        const Box W = Box::interval(-40, 40);
        const Box B = *W.interior(1);
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double margin = INFINITY;
        int strict = 0;
        for (int t = 0; t < 20; ++t) {
            const double a = U(rng);
            const auto x0 = labels(m, {a, 1 - a}, kOmega, W, U(rng));
            const auto x = continue_window(m, eps, x0, {1e-13, 200}).solution;
            const auto y = translate(x, Site{0}, 1.0);
            const auto rep = check_comparison_principle(m, eps, B, x, y);
            strict += rep.verdict == Comparison::strictly_less ? 1 : 0;
            margin = std::min(margin, rep.margin);
        }
        info = fmt("%d/20 strictly less, smallest margin %.4f (need %.4f)", strict, margin, 1 - 2 * d0);
        o.require(strict == 20, "verdict");
        o.require(margin >= 1 - 2 * d0, "margin");
    });

    criterion(9, "defect calculus", [](Outcome& o, std::string& info) {
        const auto m = chain(2);
        const double eps = m.constants.eps1 / 2, d0 = m.constants.delta0;
        const Box W = Box::interval(-20, 20);
        const Box B = *W.interior(1);
        const auto x0 = labels(m, {0.5, 0.5}, kOmega, W);
        const auto sol = continue_window(m, eps, x0, {1e-14, 200}).solution;
        const auto D0 = defect(m, eps, x0, sol, B);
        info = fmt("stationary defect %.1e", D0.value);
        o.require(std::abs(D0.value) <= 1e-10, "stationary defect");

        auto z = sol;
        const std::size_t f0 = W.flat(Site{0});
        z[f0] += d0 / 2;
        const auto D1 = defect(m, eps, x0, z, B);
        ActionEvaluator ev(m, B, W);
        const double oracle = line_search_drop(ev, z, f0, eps, d0);
        info += fmt(", perturbed %.4e vs line search %.4e", D1.value, oracle);
        o.require(D1.value < 0, "perturbed defect not negative");
        o.require(std::abs(D1.value - oracle) <= 0.2 * std::abs(oracle), "perturbed defect off the oracle");

        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> U(-0.45, 0.45);
        std::uniform_int_distribution<int> cut(-17, 17), nparts(1, 3);
        int held = 0;
        double worst = INFINITY;
        for (int t = 0; t < 100; ++t) {
            auto zt = x0;
            for (std::size_t f = 0; f < zt.size(); ++f) zt[f] += U(rng) * d0;
            // random partition of B into up to three consecutive pieces, each with an interior
            std::vector<int> cuts;
            const int k = nparts(rng);
            for (;;) {
                cuts.clear();
                for (int q = 0; q < k - 1; ++q) cuts.push_back(cut(rng));
                std::sort(cuts.begin(), cuts.end());
                bool wide = true;
                int prev = B.lo()[0] - 1;
                for (int c : cuts) {
                    wide = wide && c - prev >= 3;
                    prev = c;
                }
                if (wide && B.hi()[0] - prev >= 3) break;
            }
            std::vector<Box> parts;
            int lo = B.lo()[0];
            for (int c : cuts) {
                parts.push_back(Box::interval(lo, c));
                lo = c + 1;
            }
            parts.push_back(Box::interval(lo, B.hi()[0]));
            const auto rep = defect_subadditivity_check(m, eps, x0, zt, B, parts);
            held += rep.holds ? 1 : 0;
            worst = std::min(worst, rep.rhs - rep.lhs);
        }
        info += fmt(", subadditivity %d/100 (smallest margin %.2e)", held, worst);
        o.require(held == 100, "subadditivity");
    });

    criterion(10, "cantorus", [](Outcome& o, std::string& info) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto m = chain(1);
        const double eps = m.constants.eps1 / 2;
        const auto phi = step_hull_from_simplex(SimplexPoint({1.0}), m.V.minima());
        CantorusOptions opt;
        opt.threads = 4;
        const auto cz = extract_cantorus(m, eps, phi, kGolden, 64, 64, opt);
        const double dm = std::abs(cz.mean_momentum - kGolden);
        info = fmt("invariance %.2e, mean momentum %.5f (off by %.4f)", cz.invariance_error, cz.mean_momentum, dm);
        o.require(cz.points.size() == 64, "member count");
        o.require(cz.invariance_error <= 1e-8, "invariance");
        o.require(dm <= 2.0 / 128, "mean momentum");
        o.require(seconds_since(t0) < 10.0, "runtime");
    });

    criterion(11, "round trip and hull axioms", [](Outcome& o, std::string& info) {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::uniform_int_distribution<int> Nd(1, 5);
        std::size_t mass_bad = 0, axiom_bad = 0;
        for (int t = 0; t < 1000; ++t) {
            const int N = Nd(rng);
            std::vector<double> sigma(N), p(N);
            for (int j = 0; j < N; ++j) sigma[j] = (j + 0.5 * U(rng)) / N;
            double sum = 0;
            for (auto& v : p) sum += (v = U(rng) < 0.2 ? 0.0 : U(rng));
            if (sum == 0) p[0] = sum = 1;
            for (auto& v : p) v /= sum;
            const SimplexPoint sp(p);
            const auto phi = step_hull_from_simplex(sp, sigma);
            const auto mu = measure_from_hull(phi);
            for (int j = 0; j < N; ++j) {
                double mass = 0;
                for (const auto& a : mu.atoms)
                    if (a.location == sigma[j]) mass += a.mass;
                if (mass != sp[j]) ++mass_bad;
            }
            // items 2 to 5 at random points
            const double s1 = 6 * U(rng) - 3, s2 = s1 + 0.999 * U(rng);
            if (!(phi.lower(s1) <= phi.upper(s1))) ++axiom_bad;
            if (!(phi.upper(s1) <= phi.lower(s2)) && s2 > s1) ++axiom_bad;
            const double ulp = 4 * DBL_EPSILON * std::max(1.0, std::abs(s1) + 1);
            if (std::abs(phi.lower(s1 + 1) - phi.lower(s1) - 1) > ulp) ++axiom_bad;
            if (std::abs(phi.upper(s1 + 1) - phi.upper(s1) - 1) > ulp) ++axiom_bad;
            const int k = static_cast<int>(U(rng) * 9) - 4, l = static_cast<int>(U(rng) * 5) - 2;
            const Box W = Box::interval(-10, 10);
            const auto x = sample_config(phi, kOmega, s1, W);
            const auto xp = sample_config(phi, kOmega, s1, W, HullSide::upper);
            for (std::size_t f = 0; f < W.size(); ++f)
                if (x[f] > xp[f]) ++axiom_bad;
            const auto tx = translate(x, Site{k}, l);
            const Box ov = *tx.domain().intersect(W);
            const auto direct = sample_config(phi, kOmega, s1 + kGolden * k + l, ov);
            const auto lhs = tx.restricted(ov);
            for (std::size_t f = 0; f < ov.size(); ++f)
                if (std::abs(lhs[f] - direct[f]) > 4 * DBL_EPSILON * std::max(1.0, std::abs(direct[f]))) ++axiom_bad;
        }
        info = fmt("mass mismatches %zu, axiom violations %zu over 1000 samples", mass_bad, axiom_bad);
        o.require(mass_bad == 0, "masses");
        o.require(axiom_bad == 0, "hull axioms");
    });

    return failures == 0 ? 0 : 1;
}
