#include "lamlab/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "lamlab/action.hpp"
#include "lamlab/birkhoff.hpp"
#include "lamlab/continuation.hpp"
#include "lamlab/errors.hpp"

namespace lamlab {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

class Suite {
  public:
    Suite(const json& spec) : spec_(spec) {}

    double tol(const char* name, double dflt) const {
        if (spec_.contains("verify") && spec_["verify"].contains("tolerances") &&
            spec_["verify"]["tolerances"].contains(name))
            return spec_["verify"]["tolerances"][name].get<double>();
        return dflt;
    }

    template <class F>
    void run(const char* name, F&& f) {
        CheckResult r{name, false, ""};
        try {
            r.passed = f(r.detail);
        } catch (const Error& e) {
            r.detail = std::string(kind_name(e.kind())) + ": " + e.what();
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        results.push_back(std::move(r));
    }

    void skip(const char* name, const std::string& why) { results.push_back({name, false, "not run: " + why}); }

    std::vector<CheckResult> results;

  private:
    const json& spec_;
};

}  // namespace

std::vector<CheckResult> run_property_suite(const json& spec, std::uint64_t seed) {
    Suite suite(spec);
    const auto exp = experiment_from_json(spec);
    const json& mj = spec.contains("model") ? spec["model"] : spec;
    const auto V = potential_from_json(mj.at("potential"));
    const auto S = stencil_from_json(mj.at("stencil"));
    const double K = mj.contains("osc_K") ? mj["osc_K"].get<double>() : default_osc_bound(S.range(), exp.omega);
    const int d = S.dim();
    require(static_cast<int>(exp.omega.size()) == d, "omega does not match the stencil dimension");

    bool cond_ok = false;
    suite.run("condition-C", [&](std::string& det) {
        auto rep = check_condition_c(S, K);
        det = rep.holds ? "off-diagonal max " + num(rep.worst_offdiag) + ", neighbour max " + num(rep.worst_neighbour)
                        : rep.detail;
        cond_ok = rep.holds;
        return rep.holds;
    });
    const char* rest[] = {"constants", "gradient", "min-max", "comparison", "subadditivity", "defect-zero",
                          "hull-axioms", "birkhoff"};
    if (!cond_ok) {
        for (const char* n : rest) suite.skip(n, "model fails condition C");
        return suite.results;
    }

    const Model model = model_from_json(spec, exp.omega);
    const auto& c = model.constants;
    const double eps = resolve_eps(exp.eps.value_or(json("eps1/2")), c);
    const int R = d == 1 ? 32 : 36;
    const Box window = exp.window.value_or(Box::cube(d, R));
    const Box B = *window.interior(model.range());
    const auto minima = model.V.minima();
    std::vector<double> p = exp.p.value_or(std::vector<double>(minima.size(), 1.0 / minima.size()));
    const auto phi = step_hull_from_simplex(SimplexPoint(p), minima);
    const auto x0 = sample_config(phi, exp.omega, kGenericOffset, window);
    std::mt19937_64 rng(seed);

    suite.run("constants", [&](std::string& det) {
        const double t = suite.tol("constants", 1e-12);
        const double eps0 = std::min(c.contraction_k * c.c / (2 * c.C2), (1 - c.contraction_k) * c.delta0 * c.c / c.C1);
        bool ok = std::abs(eps0 - c.eps0) <= t * eps0;
        ok = ok && c.eps1 <= c.eps0 * (1 + t) && c.eps1 <= 2 * c.c / c.C2 * (1 + t);
        ok = ok && 2 * c.delta0 <= c.critical_spacing * (1 + t) && c.c > 0;
        det = "eps0 " + num(c.eps0) + ", eps1 " + num(c.eps1) + ", delta0 " + num(c.delta0);
        return ok;
    });

    suite.run("gradient", [&](std::string& det) {
        const double t = suite.tol("gradient", 1e-6);
        std::uniform_real_distribution<double> U(-0.2, 0.2);
        Configuration x = x0;
        for (std::size_t f = 0; f < x.size(); ++f) x[f] += U(rng);
        ActionEvaluator ev(model, B, window);
        const auto res = ev.residual(x.values(), eps);
        const auto& idx = ev.interior_indices();
        double worst = 0;
        const double h = 1e-6;
        for (std::size_t q = 0; q < idx.size(); q += std::max<std::size_t>(1, idx.size() / 25)) {
            auto xp = x, xm = x;
            xp[idx[q]] += h;
            xm[idx[q]] -= h;
            const double fd = (ev.action(xp.values(), eps) - ev.action(xm.values(), eps)) / (2 * h);
            worst = std::max(worst, std::abs(fd - res[q]) / std::max(1e-3, std::abs(res[q])));
        }
        det = "max relative error " + num(worst);
        return worst < t;
    });

    suite.run("min-max", [&](std::string& det) {
        const double t = suite.tol("min-max", 1e-10);
        std::uniform_real_distribution<double> U(-0.5, 0.5);
        double worst = INFINITY;
        for (int trial = 0; trial < 100; ++trial) {
            Configuration x = x0, y = x0;
            for (std::size_t f = 0; f < x.size(); ++f) {
                x[f] += U(rng);
                y[f] += U(rng);
            }
            worst = std::min(worst, check_minmax_inequality(model, eps, B, x, y).slack());
        }
        det = "smallest slack " + num(worst);
        return worst >= -t;
    });

    ContinuationOptions copt{exp.tol, 200};
    std::optional<ContinuationResult> xe;
    suite.run("comparison", [&](std::string& det) {
        const double t = suite.tol("comparison", 1 - 2 * c.delta0);
        xe = continue_window(model, eps, x0, copt);
        const Configuration y = translate(xe->solution, Site(d, 0), 1.0);
        auto rep = check_comparison_principle(model, eps, B, xe->solution, y, 1e3 * exp.tol);
        det = "margin " + num(rep.margin);
        return rep.verdict == Comparison::strictly_less && rep.margin >= t;
    });

    suite.run("subadditivity", [&](std::string& det) {
        const double t = suite.tol("subadditivity", 1e-9);
        if (!xe) xe = continue_window(model, eps, x0, copt);
        std::uniform_real_distribution<double> U(-c.delta0 / 4, c.delta0 / 4);
        const Box small = d == 1 ? Box::cube(1, 12) : Box::cube(d, 5);
        const Box domain = small.expanded(model.range());
        const auto base = x0.restricted(domain);
        // split along the first axis
        Site mid_hi = small.hi(), mid_lo = small.lo();
        mid_hi[0] = -1;
        mid_lo[0] = 0;
        const std::vector<Box> parts{Box(small.lo(), mid_hi), Box(mid_lo, small.hi())};
        double worst = INFINITY;
        for (int trial = 0; trial < 20; ++trial) {
            Configuration z = xe->solution.restricted(domain);
            for (std::size_t f = 0; f < z.size(); ++f) z[f] += U(rng);
            auto rep = defect_subadditivity_check(model, eps, base, z, small, parts, copt);
            worst = std::min(worst, rep.rhs - rep.lhs);
        }
        det = "smallest margin " + num(worst);
        return worst >= -t;
    });

    suite.run("defect-zero", [&](std::string& det) {
        const double t = suite.tol("defect-zero", 1e-10);
        if (!xe) xe = continue_window(model, eps, x0, copt);
        const auto D = defect(model, eps, x0, xe->solution, B, copt);
        det = "defect " + num(D.value);
        return std::abs(D.value) <= t;
    });

    suite.run("hull-axioms", [&](std::string& det) {
        const double t = suite.tol("hull-axioms", 1e-12);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        int bad = 0;
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> q(minima.size());
            double sum = 0;
            for (auto& v : q) sum += (v = U(rng));
            for (auto& v : q) v /= sum;
            const auto h = step_hull_from_simplex(SimplexPoint(q), minima);
            const double s = 4 * U(rng) - 2, ds = U(rng);
            if (h.lower(s) > h.upper(s) + t) ++bad;
            if (h.upper(s) > h.lower(s + ds) + t && ds > 1e-9) ++bad;
            if (std::abs(h.lower(s + 1) - h.lower(s) - 1) > t) ++bad;
        }
        det = std::to_string(bad) + " violations in 200 random hulls";
        return bad == 0;
    });

    suite.run("birkhoff", [&](std::string& det) {
        if (!xe) xe = continue_window(model, eps, x0, copt);
        const Box core = core_box(model, window);
        const int k_max = std::min(16, default_k_max(core));
        auto v = check_birkhoff(xe->solution.restricted(core), k_max, default_l_max(exp.omega, k_max));
        det = std::to_string(v.translates_checked) + " translates checked";
        return v.ordered;
    });
    return suite.results;
}

}  // namespace lamlab
