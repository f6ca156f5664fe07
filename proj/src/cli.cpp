#include "lamlab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "lamlab/action.hpp"
#include "lamlab/continuation.hpp"
#include "lamlab/errors.hpp"
#include "lamlab/io.hpp"
#include "lamlab/measure.hpp"
#include "lamlab/parallel.hpp"
#include "lamlab/twistmap.hpp"
#include "lamlab/verify.hpp"

namespace fs = std::filesystem;

namespace lamlab {

namespace {

struct Globals {
    std::string spec_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<double> tol;
};

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::contraction_escape:
        case ErrorKind::refused:
            return 2;
        case ErrorKind::no_convergence:
            return 3;
        default:
            return 1;
    }
}

int thread_count(const Globals& g) {
    if (g.threads) return std::max(1, *g.threads);
    if (const char* env = std::getenv("LAMLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

// Everything a subcommand needs, resolved once; echoed into the manifest.
struct Run {
    json raw;
    ExperimentSpec exp;
    std::optional<Model> model;
    double eps = 0;
    fs::path out;
    int threads = 1;
    json effective;

    const Model& m() const { return *model; }
};

Run prepare(const Globals& g, const std::string& command, bool needs_eps, bool needs_out) {
    Run run;
    if (g.spec_path.empty()) fail(ErrorKind::schema, "--spec is required");
    run.raw = read_json_file(g.spec_path);
    run.exp = experiment_from_json(run.raw);
    if (g.seed) run.exp.seed = *g.seed;
    if (g.tol) run.exp.tol = *g.tol;
    run.threads = thread_count(g);
    run.model.emplace(model_from_json(run.raw, run.exp.omega));
    if (static_cast<int>(run.exp.omega.size()) != run.m().dim())
        fail(ErrorKind::schema, "omega does not match the stencil dimension");
    if (needs_eps && !run.exp.eps) fail(ErrorKind::schema, "missing required field 'eps'");
    run.eps = resolve_eps(run.exp.eps.value_or(json("eps1/2")), run.m().constants);

    run.effective = json{{"command", command},
                         {"omega", run.exp.omega},
                         {"eps", run.eps},
                         {"tol", run.exp.tol},
                         {"n_samples", run.exp.n_samples},
                         {"seed", run.exp.seed}};
    if (run.exp.window) run.effective["window"] = {{"lo", run.exp.window->lo()}, {"hi", run.exp.window->hi()}};
    if (needs_out) {
        if (g.out_dir.empty()) fail(ErrorKind::schema, "--out is required");
        run.out = g.out_dir;
        std::error_code ec;
        fs::create_directories(run.out, ec);
        if (ec) fail(ErrorKind::schema, "cannot create output directory " + run.out.string());
    }
    return run;
}

void write_manifest(const Run& run, const json& extra = json::object()) {
    json man{{"effective", run.effective}, {"model", model_echo(run.m())}, {"spec", run.raw}};
    for (auto& [k, v] : extra.items()) man["effective"][k] = v;
    write_text_file(run.out / "manifest.json", man.dump(2) + "\n");
}

void write_json(const fs::path& p, const json& j) { write_text_file(p, j.dump(2) + "\n"); }

Box require_window(const Run& run) {
    if (!run.exp.window) fail(ErrorKind::schema, "missing required field 'window'");
    return *run.exp.window;
}

std::vector<double> simplex_or_vertex(const Run& run, std::size_t n) {
    if (run.exp.p) return *run.exp.p;
    std::vector<double> p(n, 0.0);
    p[0] = 1.0;
    return p;
}

double sample_offset(const Run& run) {
    return run.raw.contains("s") ? run.raw["s"].get<double>() : kGenericOffset;
}

json verdict_json(const BirkhoffVerdict& v) {
    json j{{"ordered", v.ordered},
           {"k_max", v.k_max},
           {"l_max", v.l_max},
           {"translates_checked", v.translates_checked},
           {"tied_translates", v.tied_translates}};
    if (v.violation)
        j["violation"] = {{"k", v.violation->k},
                          {"l", v.violation->l},
                          {"less_site", v.violation->less_site},
                          {"greater_site", v.violation->greater_site}};
    return j;
}

int cmd_continue(const Globals& g, std::ostream& out) {
    auto run = prepare(g, "continue", true, true);
    const Box window = require_window(run);
    const auto minima = run.m().V.minima();
    const auto p = simplex_or_vertex(run, minima.size());
    run.effective["p"] = p;
    run.effective["s"] = sample_offset(run);
    write_manifest(run);

    check_irrational(run.exp.omega);
    const auto phi = step_hull_from_simplex(SimplexPoint(p), minima);
    const auto x0 = sample_config(phi, run.exp.omega, sample_offset(run), window);
    const auto res = continue_window(run.m(), run.eps, x0, {run.exp.tol, 200});

    const Box B = *window.interior(run.m().range());
    ActionEvaluator ev(run.m(), B, window);
    const auto residual = ev.residual(res.solution.values(), run.eps);
    std::ostringstream csv;
    write_run_csv(csv, x0, res.solution, residual, ev.interior());
    write_text_file(run.out / "solution.csv", csv.str());

    json summary{{"iterations", res.iterations},
                 {"final_residual", res.final_residual},
                 {"contraction_rate", res.contraction_rate},
                 {"max_displacement", res.max_displacement},
                 {"trust_radius_ok", res.trust_radius_ok},
                 {"a_priori_bound", res.a_priori_bound},
                 {"residual_history", res.residual_history}};
    try {
        const Box core = core_box(run.m(), window);
        const int k_max = std::min(16, default_k_max(core));
        summary["birkhoff"] =
            verdict_json(check_birkhoff(res.solution.restricted(core), k_max, default_l_max(run.exp.omega, k_max)));
        summary["rotation_estimate"] = rotation_vector(res.solution.restricted(core)).omega;
    } catch (const Error& e) {
        summary["birkhoff"] = std::string("skipped: ") + e.what();
    }
    write_json(run.out / "summary.json", summary);
    out << "continue: " << res.iterations << " iterations, residual " << res.final_residual << "\n";
    return 0;
}

int cmd_lamination(const Globals& g, std::ostream& out) {
    auto run = prepare(g, "lamination", true, true);
    const Box window = require_window(run);
    const auto minima = run.m().V.minima();
    const auto p = simplex_or_vertex(run, minima.size());
    run.effective["p"] = p;
    write_manifest(run);

    LaminationOptions opt;
    opt.continuation = {run.exp.tol, 200};
    opt.threads = run.threads;
    if (run.raw.contains("k_max")) opt.k_max = run.raw["k_max"].get<int>();
    const auto lam = continue_lamination(run.m(), run.eps, SimplexPoint(p), run.exp.omega, window,
                                         run.exp.n_samples, opt);
    fs::create_directories(run.out / "members");
    json members = json::array();
    for (std::size_t m = 0; m < lam.members.size(); ++m) {
        const auto& mem = lam.members[m];
        std::ostringstream csv;
        write_config_csv(csv, mem.result.solution);
        char name[32];
        std::snprintf(name, sizeof name, "member_%03zu.csv", m);
        write_text_file(run.out / "members" / name, csv.str());
        members.push_back({{"s", mem.s},
                           {"iterations", mem.result.iterations},
                           {"final_residual", mem.result.final_residual},
                           {"birkhoff", verdict_json(mem.verdict)}});
    }
    std::ostringstream ord;
    for (const auto& row : lam.order) {
        for (std::size_t b = 0; b < row.size(); ++b) ord << (b ? "," : "") << row[b];
        ord << "\n";
    }
    write_text_file(run.out / "ordering.csv", ord.str());
    write_json(run.out / "summary.json", json{{"members", members},
                                              {"core", {{"lo", lam.core.lo()}, {"hi", lam.core.hi()}}},
                                              {"identical_pairs", lam.identical_pairs},
                                              {"min_label_separation", lam.min_label_separation},
                                              {"min_label_gap", lam.min_label_gap}});
    out << "lamination: " << lam.members.size() << " members ordered\n";
    return 0;
}

int cmd_measure(const Globals& g, std::ostream& out) {
    auto run = prepare(g, "measure", true, true);
    const int d = run.m().dim();
    const int n = run.raw.contains("n") ? run.raw["n"].get<int>() : (d == 1 ? 377 : 60);
    const auto minima = run.m().V.minima();
    if (!run.exp.p) fail(ErrorKind::schema, "missing required field 'p'");
    run.effective["n"] = n;
    run.effective["p"] = *run.exp.p;
    write_manifest(run);

    PsiOptions opt;
    opt.continuation = {run.exp.tol, 200};
    const auto psi = psi_epsilon(run.m(), run.eps, SimplexPoint(*run.exp.p), run.exp.omega, n, opt);
    std::ostringstream csv;
    csv << "radius,sites";
    for (std::size_t j = 0; j < minima.size(); ++j) csv << ",p_" << j + 1;
    csv << "\n";
    for (const auto& row : psi.density.table) {
        csv << row.radius << "," << row.sites;
        for (double v : row.phat) csv << "," << fmt_double(v);
        csv << "\n";
    }
    write_text_file(run.out / "density.csv", csv.str());
    write_json(run.out / "measure.json", measure_to_json(psi.density.measure));

    json summary{{"iterations", psi.continuation.iterations}, {"final_residual", psi.continuation.final_residual}};
    if (run.raw.contains("simplex_grid")) {
        const auto grid = simplex_grid(static_cast<int>(minima.size()), run.raw["simplex_grid"].get<double>());
        std::vector<CircleMeasure> mus(grid.size());
        parallel_for(grid.size(), run.threads, [&](std::size_t a) {
            mus[a] = psi_epsilon(run.m(), run.eps, grid[a], run.exp.omega, n, opt).density.measure;
        });
        std::ostringstream dist;
        dist << "a,b,l1,vague\n";
        double worst = INFINITY;
        for (std::size_t a = 0; a < grid.size(); ++a)
            for (std::size_t b = a + 1; b < grid.size(); ++b) {
                const double l1 = simplex_l1(grid[a], grid[b]), v = vague_distance(mus[a], mus[b]);
                worst = std::min(worst, v - l1);
                dist << a << "," << b << "," << fmt_double(l1) << "," << fmt_double(v) << "\n";
            }
        write_text_file(run.out / "distances.csv", dist.str());
        summary["grid_points"] = grid.size();
        summary["min_distance_minus_l1"] = worst;
    }
    write_json(run.out / "summary.json", summary);
    out << "measure: " << psi.density.measure.atoms.size() << " atoms\n";
    return 0;
}

int cmd_cantorus(const Globals& g, std::ostream& out) {
    auto run = prepare(g, "cantorus", true, true);
    if (run.exp.omega.size() != 1) fail(ErrorKind::schema, "cantorus needs a one-dimensional omega");
    const bool all = run.raw.value("criticals", std::string("minima")) == "all";
    const auto sigma = all ? run.m().V.critical_values() : run.m().V.minima();
    std::vector<double> p = run.exp.p.value_or(std::vector<double>(sigma.size(), 1.0 / sigma.size()));
    const int radius = run.exp.window ? run.exp.window->hi()[0] : 32;
    run.effective["p"] = p;
    run.effective["radius"] = radius;
    run.effective["criticals"] = all ? "all" : "minima";
    write_manifest(run);

    CantorusOptions opt;
    opt.threads = run.threads;
    opt.continuation.tol = std::min(run.exp.tol, 1e-13);
    const auto phi = step_hull_from_simplex(SimplexPoint(p), sigma);
    const auto can = extract_cantorus(run.m(), run.eps, phi, run.exp.omega[0], radius, run.exp.n_samples, opt);
    std::ostringstream csv;
    csv << "s,x0,y0\n";
    for (const auto& q : can.points) csv << fmt_double(q.s) << "," << fmt_double(q.x) << "," << fmt_double(q.y) << "\n";
    write_text_file(run.out / "cantorus.csv", csv.str());
    json summary{{"invariance_error", can.invariance_error},
                 {"worst", can.worst},
                 {"invariant", can.invariant},
                 {"order_preserving", can.order_preserving},
                 {"mean_momentum", can.mean_momentum}};
    if (run.raw.contains("orbit")) {
        const int len = run.raw["orbit"].value("length", 64);
        const auto labels = coin_flip_labels(run.m().V.minima().front(), Box::interval(0, len - 1), run.exp.seed);
        const auto orb = chaotic_momentum_orbit(run.m(), run.eps, labels, opt.continuation);
        std::ostringstream o;
        o << "i,x,y\n";
        for (std::size_t q = 0; q < orb.points.size(); ++q)
            o << orb.sites[q] << "," << fmt_double(orb.points[q].x) << "," << fmt_double(orb.points[q].y) << "\n";
        write_text_file(run.out / "orbit.csv", o.str());
        summary["orbit_map_residual"] = orb.map_residual;
    }
    write_json(run.out / "summary.json", summary);
    out << "cantorus: invariance error " << can.invariance_error << "\n";
    return can.invariant ? 0 : 1;
}

int cmd_sweep(const Globals& g, std::ostream& out) {
    auto run = prepare(g, "sweep", false, true);
    const Box window = require_window(run);
    const auto minima = run.m().V.minima();
    const auto p = simplex_or_vertex(run, minima.size());
    const auto& c = run.m().constants;
    const std::vector<double> grid{c.eps1, c.eps1 / 2, c.eps1 / 4, c.eps1 / 8};
    run.effective["p"] = p;
    run.effective["eps_grid"] = grid;
    write_manifest(run);

    check_irrational(run.exp.omega);
    const auto x0 = sample_config(step_hull_from_simplex(SimplexPoint(p), minima), run.exp.omega, sample_offset(run),
                                  window);
    std::vector<ContinuationResult> res(grid.size());
    parallel_for(grid.size(), run.threads,
                 [&](std::size_t q) { res[q] = continue_window(run.m(), grid[q], x0, {run.exp.tol, 200}); });
    std::ostringstream csv;
    csv << "eps,iterations,final_residual,contraction_rate,max_displacement,displacement_bound\n";
    for (std::size_t q = 0; q < grid.size(); ++q) {
        const double bound = grid[q] * c.C1 / ((1 - c.contraction_k) * c.c);
        csv << fmt_double(grid[q]) << "," << res[q].iterations << "," << fmt_double(res[q].final_residual) << ","
            << fmt_double(res[q].contraction_rate) << "," << fmt_double(res[q].max_displacement) << ","
            << fmt_double(bound) << "\n";
    }
    write_text_file(run.out / "sweep.csv", csv.str());
    out << "sweep: " << grid.size() << " eps values\n";
    return 0;
}

int cmd_verify(const Globals& g, std::ostream& out) {
    if (g.spec_path.empty()) fail(ErrorKind::schema, "--spec is required");
    const json spec = read_json_file(g.spec_path);
    const std::uint64_t seed = g.seed.value_or(spec.value("seed", std::uint64_t{0}));
    const auto results = run_property_suite(spec, seed);
    bool all = true;
    json rows = json::array();
    for (const auto& r : results) {
        char line[64];
        std::snprintf(line, sizeof line, "%-16s %s", r.name.c_str(), r.passed ? "PASS" : "FAIL");
        out << line << "  " << r.detail << "\n";
        rows.push_back({{"check", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        all = all && r.passed;
    }
    if (!g.out_dir.empty()) {
        fs::create_directories(g.out_dir);
        write_json(fs::path(g.out_dir) / "verify.json", json{{"seed", seed}, {"checks", rows}});
    }
    return all ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical laboratory for monotone lattice recurrences near the anti-continuum limit", "lamlab"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--spec", g.spec_path, "experiment spec (JSON)");
    app.add_option("--out", g.out_dir, "output directory for this run");
    app.add_option("--seed", g.seed, "override the spec seed");
    app.add_option("--threads", g.threads, "worker threads (falls back to LAMLAB_THREADS)");
    app.add_option("--tol", g.tol, "override the residual tolerance");

    using Cmd = int (*)(const Globals&, std::ostream&);
    const std::pair<const char*, Cmd> table[] = {
        {"continue", cmd_continue}, {"lamination", cmd_lamination}, {"measure", cmd_measure},
        {"cantorus", cmd_cantorus}, {"verify", cmd_verify},         {"sweep", cmd_sweep},
    };
    const char* help[] = {"continue one hull sample", "continue a sampled lamination",
                          "Birkhoff densities and the simplex map", "cantorus and orbits of the twist map",
                          "run the property suite", "continuation over an eps grid"};
    for (std::size_t q = 0; q < std::size(table); ++q) app.add_subcommand(table[q].first, help[q])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        for (const auto& [name, fn] : table)
            if (app.got_subcommand(name)) return fn(g, out);
    } catch (const Error& e) {
        err << "error: " << kind_name(e.kind()) << ": " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace lamlab
