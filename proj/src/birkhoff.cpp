#include "lamlab/birkhoff.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "lamlab/action.hpp"
#include "lamlab/errors.hpp"

namespace lamlab {

Configuration translate(const Configuration& x, std::span<const int> k, double l) {
    require(static_cast<int>(k.size()) == x.domain().dim(), "translation has wrong dimension");
    Site neg(k.begin(), k.end());
    for (auto& v : neg) v = -v;
    Configuration out(x.domain().shifted(neg));
    for (std::size_t f = 0; f < out.size(); ++f) out[f] = x[f] + l;
    return out;
}

MeetJoin meet_join(const Configuration& x, const Configuration& y) {
    require(x.domain() == y.domain(), "meet and join need configurations on the same domain");
    MeetJoin mj{Configuration(x.domain()), Configuration(x.domain())};
    for (std::size_t f = 0; f < x.size(); ++f) {
        mj.meet[f] = std::min(x[f], y[f]);
        mj.join[f] = std::max(x[f], y[f]);
    }
    return mj;
}

int default_k_max(const Box& domain) { return std::max(1, domain.min_extent() / 2); }

long default_l_max(std::span<const double> omega, int k_max) {
    double n = 0;
    for (double w : omega) n = std::max(n, std::abs(w));
    return static_cast<long>(std::ceil(n * k_max)) + 2;
}

BirkhoffVerdict check_birkhoff(const Configuration& x, int k_max, long l_max, double tie_tol) {
    require(k_max >= 0 && l_max >= 0, "search radii must be nonnegative");
    const Box& dom = x.domain();
    const int d = dom.dim();
    BirkhoffVerdict v;
    v.k_max = k_max;
    v.l_max = l_max;
    bool any_overlap = false;
    for (const auto& k : l1_ball(d, k_max)) {
        // overlap of dom and dom - k, where tau x is defined
        Site neg = k;
        for (auto& t : neg) t = -t;
        auto ov = dom.intersect(dom.shifted(neg));
        if (!ov) continue;
        if (l1_norm(k) > 0) any_overlap = true;
        // D_i = x_{i+k} - x_i; tau_{k,l} x - x = D + l
        double dmin = INFINITY, dmax = -INFINITY;
        std::size_t fmin = 0, fmax = 0;
        for (std::size_t f = 0; f < ov->size(); ++f) {
            Site i = ov->site(f);
            Site ik = i;
            for (int a = 0; a < d; ++a) ik[a] += k[a];
            const double D = x.at(ik) - x.at(i);
            if (D < dmin) {
                dmin = D;
                fmin = f;
            }
            if (D > dmax) {
                dmax = D;
                fmax = f;
            }
        }
        const bool k_zero = l1_norm(k) == 0;
        for (long l = -l_max; l <= l_max; ++l) {
            if (k_zero && l == 0) continue;
            ++v.translates_checked;
            const bool less = dmin + l < -tie_tol, greater = dmax + l > tie_tol;
            if (!less && !greater) ++v.tied_translates;
            if (less && greater && v.ordered) {
                v.ordered = false;
                v.violation = BirkhoffViolation{k, l, ov->site(fmin), ov->site(fmax)};
            }
        }
    }
    require(any_overlap || k_max == 0, "no lattice translate overlaps the configuration");
    return v;
}

RotationEstimate rotation_vector(const Configuration& x, double tol) {
    const Box& dom = x.domain();
    const int d = dom.dim();
    for (int a = 0; a < d; ++a) require(dom.extent(a) >= 8, "rotation estimate needs at least 8 sites per axis");
    Eigen::MatrixXd A(static_cast<Eigen::Index>(x.size()), d + 1);
    Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
    for (std::size_t f = 0; f < x.size(); ++f) {
        Site i = dom.site(f);
        const auto row = static_cast<Eigen::Index>(f);
        A(row, 0) = 1.0;
        for (int a = 0; a < d; ++a) A(row, a + 1) = i[a];
        b(row) = x[f];
    }
    Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
    RotationEstimate est;
    for (int a = 0; a < d; ++a) est.omega.push_back(sol(a + 1));
    // reference site nearest the centre
    Site ref(d);
    for (int a = 0; a < d; ++a) ref[a] = (dom.lo()[a] + dom.hi()[a]) / 2;
    const double xref = x.at(ref);
    est.error_bar = 0;
    for (std::size_t f = 0; f < x.size(); ++f) {
        Site i = dom.site(f);
        double pred = xref;
        for (int a = 0; a < d; ++a) pred += est.omega[a] * (i[a] - ref[a]);
        est.error_bar = std::max(est.error_bar, std::abs(x[f] - pred));
    }
    if (est.error_bar > 1 + tol) {
        std::ostringstream os;
        os << "configuration deviates from its linear trend by " << est.error_bar;
        fail(ErrorKind::not_birkhoff_like, os.str());
    }
    return est;
}

MinMaxReport check_minmax_inequality(const Model& model, double eps, const Box& B, const Configuration& x,
                                     const Configuration& y, double tol) {
    require(x.domain() == y.domain(), "min-max check needs configurations on the same domain");
    ActionEvaluator ev(model, B, x.domain());
    auto mj = meet_join(x, y);
    // compare site by site so that shared terms cancel exactly
    const std::size_t n = ev.box_indices().size();
    std::vector<double> tm(n), tj(n), tx(n), ty(n);
    ev.local_terms(mj.meet.values(), {}, eps, tm);
    ev.local_terms(mj.join.values(), {}, eps, tj);
    ev.local_terms(x.values(), {}, eps, tx);
    ev.local_terms(y.values(), {}, eps, ty);
    MinMaxReport rep{true, 0, 0};
    double slack = 0;
    for (std::size_t q = 0; q < n; ++q) {
        rep.lhs += tm[q] + tj[q];
        rep.rhs += tx[q] + ty[q];
        slack += (tx[q] + ty[q]) - (tm[q] + tj[q]);
    }
    rep.holds = slack >= -tol;
    return rep;
}

ComparisonReport check_comparison_principle(const Model& model, double eps, const Box& B, const Configuration& x,
                                            const Configuration& y, double tol_residual, double tie_tol) {
    require(x.domain() == y.domain(), "comparison needs configurations on the same domain");
    for (std::size_t f = 0; f < x.size(); ++f)
        if (x[f] > y[f] + tie_tol)
            fail(ErrorKind::invalid_argument, "x is not below y at site " + site_string(x.domain().site(f)));
    ActionEvaluator ev(model, B, x.domain());
    for (const Configuration* c : {&x, &y}) {
        double m = 0;
        for (double r : ev.residual(c->values(), eps)) m = std::max(m, std::abs(r));
        if (m > tol_residual) {
            std::ostringstream os;
            os << "interior residual " << m << " exceeds " << tol_residual;
            fail(ErrorKind::not_stationary, os.str());
        }
    }
    bool tied = false, strict = false;
    double margin = INFINITY;
    for (std::size_t f : ev.interior_indices()) {
        const double g = y[f] - x[f];
        margin = std::min(margin, g);
        (g <= tie_tol ? tied : strict) = true;
    }
    if (tied && strict) fail(ErrorKind::principle_violated, "interior touches without coinciding");
    return {strict ? Comparison::strictly_less : Comparison::identical, margin};
}

}  // namespace lamlab
