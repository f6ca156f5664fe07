#include <doctest.h>

#include <cmath>
#include <random>

#include "lamlab/action.hpp"
#include "lamlab/continuation.hpp"
#include "lamlab/errors.hpp"

using namespace lamlab;

namespace {

const double kGolden = (std::sqrt(5.0) - 1) / 2;
const std::vector<double> kOmega{kGolden};

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no lamlab::Error thrown");
    return ErrorKind::invalid_argument;
}

Model chain(int N) { return make_model(builtin_n_well(N), builtin_harmonic_stencil(1)); }

Configuration golden_labels(const Model& m, const std::vector<double>& p, int radius) {
    auto phi = step_hull_from_simplex(SimplexPoint(p), m.V.minima());
    return sample_config(phi, kOmega, kGenericOffset, Box::interval(-radius, radius));
}

// brute-force minimization of the action along one coordinate by golden-section search
double line_min(const ActionEvaluator& ev, Configuration z, std::size_t f, double eps, double half) {
    const double c = z[f];
    auto W = [&](double t) {
        z[f] = c + t;
        return ev.action(z.values(), eps);
    };
    double a = -half, b = half;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
        double u = b - g * (b - a), v = a + g * (b - a);
        if (W(u) < W(v))
            b = v;
        else
            a = u;
    }
    double best = W(0.5 * (a + b));
    return best - W(0.0);
}

}  // namespace

TEST_CASE("eps = 0 is a fixed point after one application") {
    auto m = chain(1);
    auto x0 = golden_labels(m, {1.0}, 20);
    auto r = continue_window(m, 0.0, x0);
    CHECK(r.iterations == 1);
    CHECK(r.final_residual == 0.0);
    for (std::size_t f = 0; f < x0.size(); ++f) CHECK(r.solution[f] == x0[f]);
}

TEST_CASE("the symmetric configuration stays put") {
    auto m = chain(1);
    Configuration x0(Box::interval(-10, 10), 0.0);
    auto r = continue_window(m, m.constants.eps0, x0);
    for (std::size_t f = 0; f < x0.size(); ++f) CHECK(r.solution[f] == 0.0);
}

TEST_CASE("golden sample continues to an ordered solution") {
    auto m = chain(2);
    double eps = m.constants.eps1 / 2;
    auto x0 = golden_labels(m, {0.5, 0.5}, 64);
    auto r = continue_window(m, eps, x0);
    CHECK(r.final_residual < 1e-12);
    CHECK(r.trust_radius_ok);
    CHECK(r.max_displacement < m.constants.delta0);
    CHECK(sup_residual(m, eps, *x0.domain().interior(1), r.solution) < 1e-12);
    Box core = core_box(m, x0.domain());
    auto v = check_birkhoff(r.solution.restricted(core), 16, default_l_max(kOmega, 16));
    CHECK(v.ordered);
    // collar untouched
    CHECK(r.solution.at(Site{-64}) == x0.at(Site{-64}));
    CHECK(r.solution.at(Site{64}) == x0.at(Site{64}));
}

TEST_CASE("integer shifts of the labels give the same displacement") {
    auto m = chain(2);
    double eps = m.constants.eps1 / 2;
    auto x0 = golden_labels(m, {0.3, 0.7}, 30);
    auto a = continue_window(m, eps, x0);
    auto y0 = x0;
    for (std::size_t f = 0; f < y0.size(); ++f) y0[f] += 3;
    auto b = continue_window(m, eps, y0);
    for (std::size_t f = 0; f < x0.size(); ++f) CHECK(b.displacement[f] == doctest::Approx(a.displacement[f]).epsilon(1e-9).scale(1e-12));
}

TEST_CASE("refusal and preconditions") {
    auto m = chain(2);
    auto x0 = golden_labels(m, {0.5, 0.5}, 10);
    CHECK(kind_of([&] { continue_window(m, 2 * m.constants.eps0, x0); }) == ErrorKind::refused);
    CHECK(kind_of([&] { continue_window(m, -1e-3, x0); }) == ErrorKind::invalid_argument);
    auto bad = x0;
    bad.at(Site{0}) += 0.1;
    CHECK(kind_of([&] { continue_window(m, 0.0, bad); }) == ErrorKind::invalid_argument);
}

TEST_CASE("escape and no-convergence are reported") {
    // an understated C1 inflates eps0 far beyond the safe range
    ConstantOverrides over;
    over.C1 = 1e-6;
    auto m = make_model(builtin_n_well(2), builtin_harmonic_stencil(1), 0.5, std::nullopt, over);
    auto x0 = golden_labels(m, {0.5, 0.5}, 10);
    CHECK(kind_of([&] { continue_window(m, m.constants.eps0 * 0.9, x0); }) == ErrorKind::contraction_escape);

    auto m2 = chain(2);
    ContinuationOptions opt;
    opt.max_iter = 1;
    opt.tol = 1e-15;
    CHECK(kind_of([&] { continue_window(m2, m2.constants.eps1 / 2, golden_labels(m2, {0.5, 0.5}, 10), opt); }) ==
          ErrorKind::no_convergence);
}

TEST_CASE("displacement shrinks linearly as eps decreases") {
    auto m = chain(2);
    auto x0 = golden_labels(m, {0.5, 0.5}, 40);
    const auto& c = m.constants;
    double prev = INFINITY;
    for (int j = 1; j <= 4; ++j) {
        double eps = c.eps1 / (1 << j);
        auto r = continue_window(m, eps, x0);
        CHECK(r.max_displacement <= eps * c.C1 / ((1 - c.contraction_k) * c.c));
        CHECK(r.max_displacement <= prev + 1e-10);
        prev = r.max_displacement;
    }
}

TEST_CASE("truncation consistency") {
    auto m = chain(1);
    auto x0 = golden_labels(m, {1.0}, 60);
    auto zero = truncation_consistency(m, 0.0, x0, 1e-13, 10, 20);
    CHECK(zero.difference == 0.0);
    auto rep = truncation_consistency(m, m.constants.eps1 / 2, x0, 1e-15, 10, 30);
    CHECK(rep.m == 20);
    CHECK(rep.reference_radius == 50);
    CHECK(rep.difference <= rep.bound);
    CHECK(rep.bound == doctest::Approx(2 * m.constants.delta0 * std::ldexp(1.0, -20)));
}

TEST_CASE("defect of a stationary configuration vanishes") {
    auto m = chain(2);
    double eps = m.constants.eps1 / 2;
    auto x0 = golden_labels(m, {0.5, 0.5}, 20);
    auto sol = continue_window(m, eps, x0, {1e-14, 200}).solution;
    auto D = defect(m, eps, x0, sol, *x0.domain().interior(1));
    CHECK(std::abs(D.value) < 1e-10);
    Box B = *x0.domain().interior(1);
    Box parts[] = {Box::interval(-19, 0), Box::interval(1, 19)};
    auto sub = defect_subadditivity_check(m, eps, x0, sol, B, parts);
    CHECK(sub.holds);
    CHECK(std::abs(sub.lhs) < 1e-10);
    CHECK(std::abs(sub.rhs) < 1e-10);
}

TEST_CASE("single-site perturbation against a line search") {
    auto m = chain(2);
    double eps = m.constants.eps1 / 2;
    auto x0 = golden_labels(m, {0.5, 0.5}, 20);
    auto sol = continue_window(m, eps, x0, {1e-14, 200}).solution;
    auto z = sol;
    const std::size_t f0 = z.domain().flat(Site{0});
    z[f0] += m.constants.delta0 / 2;
    Box B = *x0.domain().interior(1);
    auto D = defect(m, eps, x0, z, B);
    ActionEvaluator ev(m, B, z.domain());
    double oracle = line_min(ev, z, f0, eps, m.constants.delta0);
    CHECK(D.value < 0);
    CHECK(D.value <= oracle + 1e-15);
    CHECK(std::abs(D.value - oracle) <= 0.2 * std::abs(oracle));
}

TEST_CASE("subadditivity on random perturbations") {
    auto m = chain(2);
    double eps = m.constants.eps1 / 2;
    auto x0 = golden_labels(m, {0.5, 0.5}, 16);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(-0.9, 0.9);
    Box B = *x0.domain().interior(1);
    Box halves[] = {Box::interval(-15, -1), Box::interval(0, 15)};
    for (int trial = 0; trial < 100; ++trial) {
        auto z = x0;
        for (std::size_t f = 0; f < z.size(); ++f) z[f] += U(rng) * m.constants.delta0 * 0.5;
        auto rep = defect_subadditivity_check(m, eps, x0, z, B, halves);
        CHECK(rep.holds);
        CHECK(rep.lhs <= 0);
    }
    Box single[] = {B};
    auto z = x0;
    z[5] += 0.3 * m.constants.delta0;
    auto eq = defect_subadditivity_check(m, eps, x0, z, B, single);
    CHECK(eq.lhs == eq.rhs);
    Box overlap[] = {Box::interval(-5, 2), Box::interval(2, 6)};
    CHECK(kind_of([&] { defect_subadditivity_check(m, eps, x0, z, B, overlap); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([&] { defect(m, 2 * m.constants.eps1, x0, z, B); }) == ErrorKind::refused);
}

TEST_CASE("defect scan over a perturbed configuration") {
    auto m = chain(2);
    double eps = m.constants.eps1 / 2;
    auto x0 = golden_labels(m, {0.5, 0.5}, 14);
    auto z = x0;
    for (std::size_t f = 0; f < z.size(); ++f) z[f] += (f % 2 ? 0.3 : -0.3) * m.constants.delta0;
    auto scan = defect_scan(m, eps, x0, z, 3);
    CHECK(scan.boxes > 0);
    CHECK(scan.gamma > 0);
}

TEST_CASE("lamination at minima stays ordered") {
    auto m = chain(2);
    double eps = m.constants.eps1 / 2;
    Box W = Box::interval(-64, 64);
    auto lam = continue_lamination(m, eps, SimplexPoint({0.5, 0.5}), kOmega, W, 32);
    CHECK(lam.members.size() == 32);
    for (auto& mem : lam.members) CHECK(mem.verdict.ordered);
    CHECK(lam.identical_pairs == 0);
    // members are sorted by s, so the ordering matrix is monotone
    for (std::size_t a = 0; a + 1 < lam.members.size(); ++a) CHECK(lam.order[a][a + 1] == -1);
    CHECK(lam.min_label_separation >= lam.min_label_gap - 2 * m.constants.delta0);

    auto zero = continue_lamination(m, 0.0, SimplexPoint({0.5, 0.5}), kOmega, W, 8);
    for (auto& mem : zero.members)
        for (std::size_t f = 0; f < W.size(); ++f) CHECK(mem.result.solution[f] == mem.labels[f]);

    CHECK(kind_of([&] { continue_lamination(m, 2 * m.constants.eps1, SimplexPoint({0.5, 0.5}), kOmega, W, 4); }) ==
          ErrorKind::refused);
}

TEST_CASE("maxima break the order, minima do not") {
    auto m = chain(1);
    double eps = m.constants.eps1 / 2;
    Box W = Box::interval(-64, 64);
    auto brk = maximum_breaks_order(m, eps, kOmega, W);
    CHECK(brk.violated);
    CHECK(brk.magnitude > 1e-9);
    auto ctrl = order_break_probe(m, eps, kOmega, W, m.V.minima().front());
    CHECK_FALSE(ctrl.violated);
    CHECK(ctrl.pairs_tried > 0);
    auto flat = order_break_probe(m, 0.0, kOmega, W, m.V.maxima().front());
    CHECK_FALSE(flat.violated);
}
