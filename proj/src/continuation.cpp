#include "lamlab/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lamlab/action.hpp"
#include "lamlab/errors.hpp"
#include "lamlab/parallel.hpp"

namespace lamlab {

namespace {

struct SolveOut {
    std::vector<double> disp;  // on the evaluator domain, zero off the interior
    int iterations = 0;
    double residual = 0;
    double rate = 0;
    double max_offset = 0;
    std::vector<double> history;
};

// Constrained quasi-Newton on the interior of ev.box(); start + disp is the iterate.
// offset_i = start_i - centre_i measures the distance to the trust-ball centre.
SolveOut solve(const Model& model, const ActionEvaluator& ev, double eps, std::span<const double> start,
               std::span<const double> precond, std::span<const double> offset, const ContinuationOptions& opt) {
    require(opt.tol > 0 && opt.max_iter >= 1, "tolerance and iteration cap must be positive");
    const double delta0 = model.constants.delta0;
    const auto& idx = ev.interior_indices();
    const std::size_t n = idx.size();
    SolveOut out;
    out.disp.assign(ev.domain().size(), 0.0);
    std::vector<double> F(n);
    ev.residual(start, out.disp, eps, F);
    double prev_step = 0;
    for (int m = 1;; ++m) {
        double step = 0, far = 0;
        std::size_t far_q = 0;
        for (std::size_t q = 0; q < n; ++q) {
            const double dv = -F[q] / precond[q];
            out.disp[idx[q]] += dv;
            step = std::max(step, std::abs(dv));
            const double o = std::abs(offset[q] + out.disp[idx[q]]);
            if (o > far) {
                far = o;
                far_q = q;
            }
        }
        out.max_offset = std::max(out.max_offset, far);
        if (!(far < delta0)) {
            std::ostringstream os;
            os << "iterate left the trust ball of radius " << delta0 << " at site "
               << site_string(ev.domain().site(idx[far_q])) << " (distance " << far << ", eps " << eps << ")";
            fail(ErrorKind::contraction_escape, os.str());
        }
        if (prev_step > 0 && step > 1e-14) out.rate = std::max(out.rate, step / prev_step);
        prev_step = step;
        ev.residual(start, out.disp, eps, F);
        double res = 0;
        for (double f : F) res = std::max(res, std::abs(f));
        out.history.push_back(res);
        out.iterations = m;
        out.residual = res;
        if (res < opt.tol) break;
        if (m >= opt.max_iter) {
            std::ostringstream os;
            os << "no convergence after " << m << " iterations (residual " << res << ")";
            fail(ErrorKind::no_convergence, os.str());
        }
    }
    return out;
}

void check_eps(double eps, double limit, const char* name) {
    require(std::isfinite(eps), "eps must be finite");
    require(eps >= 0, "eps must be nonnegative");
    if (eps > limit * (1 + 1e-12)) {
        std::ostringstream os;
        os.precision(6);
        os << "eps = " << eps << " exceeds " << name << " = " << limit;
        fail(ErrorKind::refused, os.str());
    }
}

}  // namespace

ContinuationResult quasi_newton_continue(const Model& model, double eps, const Configuration& x0, const Box& B,
                                         const ContinuationOptions& opt) {
    check_eps(eps, model.constants.eps0, "eps0");
    ActionEvaluator ev(model, B, x0.domain());
    const auto& idx = ev.interior_indices();
    std::vector<double> h(idx.size()), offset(idx.size(), 0.0);
    for (std::size_t q = 0; q < idx.size(); ++q) {
        const double xi = x0[idx[q]];
        if (std::abs(model.V.d1(xi)) > model.V.tol_crit())
            fail(ErrorKind::invalid_argument,
                 "x0 is not a critical point at site " + site_string(x0.domain().site(idx[q])));
        h[q] = model.V.d2(xi);
    }
    auto s = solve(model, ev, eps, x0.values(), h, offset, opt);

    ContinuationResult res;
    res.displacement = Configuration(x0.domain(), s.disp);
    res.solution = x0;
    for (std::size_t f = 0; f < x0.size(); ++f) res.solution[f] += s.disp[f];
    res.iterations = s.iterations;
    res.final_residual = s.residual;
    res.contraction_rate = s.rate;
    res.max_displacement = 0;
    for (double v : s.disp) res.max_displacement = std::max(res.max_displacement, std::abs(v));
    res.trust_radius_ok = s.max_offset < model.constants.delta0;
    res.a_priori_bound = model.constants.delta0 * std::ldexp(1.0, -s.iterations);
    res.residual_history = std::move(s.history);
    return res;
}

ContinuationResult continue_window(const Model& model, double eps, const Configuration& x0,
                                   const ContinuationOptions& opt) {
    auto B = x0.domain().interior(model.range());
    require(B.has_value(), "window too small for the interaction range");
    return quasi_newton_continue(model, eps, x0, *B, opt);
}

Box core_box(const Model& model, const Box& window, double tie_tol) {
    const int r = model.range();
    const int margin = 2 * r + r * static_cast<int>(std::ceil(std::log2(2 * model.constants.delta0 / tie_tol)));
    auto core = window.interior(margin);
    require(core.has_value(), "window too small to leave a core beyond the truncation layer");
    return *core;
}

TruncationReport truncation_consistency(const Model& model, double eps, const Configuration& x0, double tol, int M1,
                                        int M2) {
    require(M1 >= 0 && M2 > M1, "need M2 > M1 >= 0");
    const int d = model.dim(), r = model.range();
    TruncationReport rep;
    rep.reference_radius = 2 * M2 - M1;
    rep.m = (M2 - M1) / r;
    rep.bound = 2 * model.constants.delta0 * std::ldexp(1.0, -rep.m);
    ContinuationOptions opt;
    opt.tol = tol;
    auto near = quasi_newton_continue(model, eps, x0.restricted(Box::cube(d, M2 + r)), Box::cube(d, M2), opt);
    auto far = quasi_newton_continue(model, eps, x0.restricted(Box::cube(d, rep.reference_radius + r)),
                                     Box::cube(d, rep.reference_radius), opt);
    const Box probe = Box::cube(d, M1);
    for (std::size_t f = 0; f < probe.size(); ++f) {
        const Site i = probe.site(f);
        if (l1_norm(i) > M1) continue;
        rep.difference =
            std::max(rep.difference, std::abs(near.displacement.at(i) - far.displacement.at(i)));
    }
    return rep;
}

Defect defect(const Model& model, double eps, const Configuration& base, const Configuration& z, const Box& B,
              const ContinuationOptions& opt) {
    check_eps(eps, model.constants.eps1, "eps1");
    require(base.domain() == z.domain(), "base and z must share a domain");
    const double delta0 = model.constants.delta0;
    for (std::size_t f = 0; f < z.size(); ++f) {
        if (!(std::abs(z[f] - base[f]) < delta0))
            fail(ErrorKind::invalid_argument, "z leaves the trust ball at site " + site_string(z.domain().site(f)));
        if (std::abs(model.V.d1(base[f])) > model.V.tol_crit() || !(model.V.d2(base[f]) > 0))
            fail(ErrorKind::invalid_argument, "base is not a local minimum at site " + site_string(z.domain().site(f)));
    }
    ActionEvaluator ev(model, B, z.domain());
    const auto& idx = ev.interior_indices();
    std::vector<double> h(idx.size()), offset(idx.size());
    for (std::size_t q = 0; q < idx.size(); ++q) {
        h[q] = model.V.d2(base[idx[q]]);
        offset[q] = z[idx[q]] - base[idx[q]];
    }
    auto s = solve(model, ev, eps, z.values(), h, offset, opt);

    // site-by-site difference of local terms so common parts cancel
    const std::size_t n = ev.box_indices().size();
    std::vector<double> after(n), before(n);
    ev.local_terms(z.values(), s.disp, eps, after);
    ev.local_terms(z.values(), {}, eps, before);
    Defect D;
    for (std::size_t q = 0; q < n; ++q) D.value += after[q] - before[q];
    D.minimizer_delta = Configuration(z.domain(), std::move(s.disp));
    D.iterations = s.iterations;
    return D;
}

SubadditivityReport defect_subadditivity_check(const Model& model, double eps, const Configuration& base,
                                               const Configuration& z, const Box& B, std::span<const Box> parts,
                                               const ContinuationOptions& opt) {
    require(!parts.empty(), "need at least one part");
    for (std::size_t a = 0; a < parts.size(); ++a) {
        require(B.contains(parts[a]), "part is not contained in the box");
        for (std::size_t b = a + 1; b < parts.size(); ++b)
            require(!parts[a].intersect(parts[b]).has_value(), "parts overlap");
    }
    SubadditivityReport rep;
    rep.lhs = defect(model, eps, base, z, B, opt).value;
    for (const auto& P : parts) {
        const double v = defect(model, eps, base, z, P, opt).value;
        rep.parts.push_back(v);
        rep.rhs += v;
    }
    rep.holds = rep.lhs <= rep.rhs + 1e-9;
    return rep;
}

DefectScan defect_scan(const Model& model, double eps, const Configuration& base, const Configuration& z, int r1,
                       const ContinuationOptions& opt) {
    require(r1 > model.range(), "scan radius must exceed the interaction range");
    const int d = model.dim();
    auto centres = z.domain().interior(r1 + model.range());
    require(centres.has_value(), "window too small for the scan radius");
    DefectScan scan;
    scan.gamma = INFINITY;
    for (std::size_t f = 0; f < centres->size(); ++f) {
        const Site c = centres->site(f);
        const Box b = Box::cube(d, r1).shifted(c);
        const double v = std::abs(defect(model, eps, base, z, b, opt).value);
        ++scan.boxes;
        if (v < scan.gamma) {
            scan.gamma = v;
            scan.where = c;
        }
    }
    return scan;
}

LaminationResult continue_lamination(const Model& model, double eps, const SimplexPoint& p,
                                     std::span<const double> omega, const Box& window, int n_samples,
                                     const LaminationOptions& opt) {
    check_eps(eps, model.constants.eps1, "eps1");
    require(n_samples >= 1, "need at least one member");
    check_irrational(omega);
    const auto sigma = opt.sigma.empty() ? model.V.minima() : opt.sigma;
    const auto phi = step_hull_from_simplex(p, sigma);

    LaminationResult out;
    out.core = core_box(model, window, opt.tie_tol);
    out.members.resize(static_cast<std::size_t>(n_samples));
    parallel_for(out.members.size(), opt.threads, [&](std::size_t m) {
        auto& mem = out.members[m];
        mem.s = (static_cast<double>(m) + 0.5) / n_samples + kGenericOffset;
        mem.labels = sample_config(phi, omega, mem.s, window);
        mem.result = continue_window(model, eps, mem.labels, opt.continuation);
        auto core = mem.result.solution.restricted(out.core);
        mem.verdict = check_birkhoff(core, opt.k_max, default_l_max(omega, opt.k_max), opt.tie_tol);
    });

    const std::size_t n = out.members.size();
    out.order.assign(n, std::vector<int>(n, 0));
    out.min_label_separation = INFINITY;
    out.min_label_gap = INFINITY;
    const auto cidx = out.core.indices_in(window);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto& xa = out.members[a].result.solution;
            const auto& xb = out.members[b].result.solution;
            const auto& la = out.members[a].labels;
            const auto& lb = out.members[b].labels;
            bool below = false, above = false;
            std::size_t witness_lo = 0, witness_hi = 0;
            for (std::size_t f : cidx) {
                const double g = xb[f] - xa[f];
                if (g > opt.tie_tol) {
                    below = true;
                    witness_lo = f;
                } else if (g < -opt.tie_tol) {
                    above = true;
                    witness_hi = f;
                }
                const double lg = std::abs(lb[f] - la[f]);
                if (lg > 0) {
                    out.min_label_gap = std::min(out.min_label_gap, lg);
                    out.min_label_separation = std::min(out.min_label_separation, std::abs(g));
                }
            }
            if (below && above) {
                std::ostringstream os;
                os << "members " << a << " and " << b << " cross: sites "
                   << site_string(window.site(witness_lo)) << " and " << site_string(window.site(witness_hi));
                fail(ErrorKind::lamination_broken, os.str());
            }
            const int o = below ? -1 : (above ? 1 : 0);
            out.order[a][b] = o;
            out.order[b][a] = -o;
            if (o == 0) ++out.identical_pairs;
        }
    }
    return out;
}

OrderBreak order_break_probe(const Model& model, double eps, std::span<const double> omega, const Box& window,
                             double sigma, const ContinuationOptions& opt) {
    check_eps(eps, model.constants.eps1, "eps1");
    check_irrational(omega);
    const int d = model.dim();
    require(static_cast<int>(omega.size()) == d, "omega has wrong dimension");
    const double tie = 1e-9;
    const double sg = sigma - std::floor(sigma);
    const auto phi = step_hull_from_simplex(SimplexPoint({1.0}), std::vector<double>{sg});
    const double s0 = kGenericOffset;
    const auto x0 = sample_config(phi, omega, s0, window);
    const auto x = continue_window(model, eps, x0, opt);
    const Box core = core_box(model, window, tie);
    const auto cidx = core.indices_in(window);
    const auto interior = window.interior(2 * model.range());

    OrderBreak best;
    for (const auto& k : l1_ball(d, 3)) {
        if (l1_norm(k) == 0) continue;
        double wk = 0;
        for (int a = 0; a < d; ++a) wk += omega[a] * k[a];
        for (long l : {-static_cast<long>(std::floor(wk)), -static_cast<long>(std::ceil(wk))}) {
            // tau_{k,l} x^-(s) = x^-(s + omega.k + l)
            const auto y0 = sample_config(phi, omega, s0 + wk + static_cast<double>(l), window);
            bool agree = false, differ = false;
            for (std::size_t f : interior->indices_in(window)) (y0[f] == x0[f] ? agree : differ) = true;
            if (!agree || !differ) continue;
            ++best.pairs_tried;
            const auto y = continue_window(model, eps, y0, opt);
            double up = 0, down = 0;
            std::size_t fu = 0, fd = 0;
            for (std::size_t f : cidx) {
                const double g = x.solution[f] - y.solution[f];
                if (g > up) {
                    up = g;
                    fu = f;
                }
                if (-g > down) {
                    down = -g;
                    fd = f;
                }
            }
            if (up > tie && down > tie) {
                const double mag = std::min(up, down);
                if (!best.violated || mag > best.magnitude) {
                    best.violated = true;
                    best.k = k;
                    best.l = l;
                    best.greater_site = window.site(fu);
                    best.less_site = window.site(fd);
                    best.magnitude = mag;
                }
            }
        }
    }
    return best;
}

OrderBreak maximum_breaks_order(const Model& model, double eps, std::span<const double> omega, const Box& window,
                                const ContinuationOptions& opt) {
    const auto maxima = model.V.maxima();
    auto rep = order_break_probe(model, eps, omega, window, maxima.front(), opt);
    if (!rep.violated)
        fail(ErrorKind::check_inconclusive, "no ordering violation found; enlarge the window or lower eps");
    return rep;
}

}  // namespace lamlab
