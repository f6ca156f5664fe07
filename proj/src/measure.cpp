#include "lamlab/measure.hpp"

#include <algorithm>
#include <cmath>

#include "lamlab/errors.hpp"

namespace lamlab {

namespace {

double frac(double s) { return s - std::floor(s); }

double circ_dist(double a, double b) {
    double d = std::abs(frac(a) - frac(b));
    return std::min(d, 1.0 - d);
}

void add_atom(std::vector<Atom>& atoms, double loc, double mass) {
    loc = frac(loc);
    for (auto& a : atoms)
        if (circ_dist(a.location, loc) <= 1e-12) {
            a.mass += mass;
            return;
        }
    atoms.push_back({loc, mass});
}

void sort_atoms(std::vector<Atom>& atoms) {
    std::sort(atoms.begin(), atoms.end(), [](auto& a, auto& b) { return a.location < b.location; });
}

}  // namespace

double CircleMeasure::total_mass() const {
    double m = 0;
    for (const auto& a : atoms) m += a.mass;
    if (continuous_part) m = 1.0;
    return m;
}

CircleMeasure CircleMeasure::atomized() const {
    CircleMeasure out{atoms, std::nullopt};
    if (continuous_part) {
        double rest = 1.0;
        for (const auto& a : atoms) rest -= a.mass;
        const auto& h = *continuous_part;
        for (std::size_t m = 0; m < h.plateaus(); ++m) add_atom(out.atoms, h.values()[m], rest * h.lengths()[m]);
    }
    sort_atoms(out.atoms);
    return out;
}

CircleMeasure measure_from_hull(const HullFunction& phi) {
    CircleMeasure mu;
    for (std::size_t m = 0; m < phi.plateaus(); ++m) add_atom(mu.atoms, phi.values()[m], phi.lengths()[m]);
    sort_atoms(mu.atoms);
    return mu;
}

DensityResult measure_from_density(const Configuration& x, std::span<const double> sigma, double delta0, int n) {
    require(n >= 4, "density radius must be at least 4");
    const int d = x.domain().dim();
    require(x.domain().contains(Box::cube(d, n)), "configuration must cover the cube of radius n");
    DensityResult out;
    for (int rad : {n / 4, n / 2, n}) {
        DensityRow row{rad, 0, std::vector<double>(sigma.size(), 0.0)};
        const Box cube = Box::cube(d, rad);
        for (std::size_t f = 0; f < cube.size(); ++f) {
            const Site i = cube.site(f);
            if (l1_norm(i) > rad) continue;
            const double v = x.at(i);
            const int j = classify(v, sigma, delta0);
            if (j < 0) fail(ErrorKind::unclassifiable_site, "site " + site_string(i) + " is not near a critical point");
            row.phat[j] += 1;
            ++row.sites;
        }
        for (auto& v : row.phat) v /= static_cast<double>(row.sites);
        out.table.push_back(std::move(row));
    }
    for (std::size_t j = 0; j < sigma.size(); ++j)
        if (out.table.back().phat[j] > 0) out.measure.atoms.push_back({frac(sigma[j]), out.table.back().phat[j]});
    sort_atoms(out.measure.atoms);
    return out;
}

double integrate(const CircleMeasure& mu, const std::function<double(double)>& f) {
    double s = 0;
    for (const auto& a : mu.atomized().atoms) s += a.mass * f(a.location);
    return s;
}

double vague_distance(const CircleMeasure& a, const CircleMeasure& b) {
    const auto A = a.atomized(), B = b.atomized();
    std::vector<Atom> diff = A.atoms;
    for (const auto& at : B.atoms) add_atom(diff, at.location, -at.mass);
    double d = 0;
    for (const auto& at : diff) d += std::abs(at.mass);
    return d;
}

PsiResult psi_epsilon(const Model& model, double eps, const SimplexPoint& p, std::span<const double> omega, int n,
                      const PsiOptions& opt) {
    if (eps > model.constants.eps1 * (1 + 1e-12)) fail(ErrorKind::refused, "eps exceeds eps1");
    check_irrational(omega);
    const int d = model.dim();
    require(static_cast<int>(omega.size()) == d, "omega has wrong dimension");
    const auto minima = model.V.minima();
    const auto phi = step_hull_from_simplex(p, minima);
    const auto x0 = sample_config(phi, omega, opt.s, Box::cube(d, n + 2 * model.range()));
    PsiResult out;
    out.continuation = continue_window(model, eps, x0, opt.continuation);
    out.density = measure_from_density(out.continuation.solution, minima, model.constants.delta0, n);
    return out;
}

std::vector<SimplexPoint> simplex_grid(int N, double spacing) {
    require(N >= 1 && spacing > 0 && spacing <= 1, "bad simplex grid");
    const int steps = static_cast<int>(std::lround(1.0 / spacing));
    require(std::abs(steps * spacing - 1.0) < 1e-12, "spacing must divide 1");
    std::vector<SimplexPoint> out;
    std::vector<int> c(static_cast<std::size_t>(N - 1), 0);
    while (true) {
        int used = 0;
        for (int v : c) used += v;
        if (used <= steps) {
            std::vector<double> p;
            for (int v : c) p.push_back(v * spacing);
            p.push_back((steps - used) * spacing);
            out.emplace_back(p);
        }
        int a = N - 2;
        while (a >= 0 && c[a] == steps) c[a--] = 0;
        if (a < 0) break;
        ++c[a];
    }
    return out;
}

}  // namespace lamlab
