#include "lamlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "lamlab/errors.hpp"

namespace lamlab {

namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrorKind::schema, what); }

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) schema(std::string("missing required field '") + key + "'");
    return j.at(key);
}

double as_double(const json& j, const char* what) {
    if (!j.is_number()) schema(std::string("field '") + what + "' must be a number");
    return j.get<double>();
}

int as_int(const json& j, const char* what) {
    if (!j.is_number_integer()) schema(std::string("field '") + what + "' must be an integer");
    return j.get<int>();
}

std::vector<double> as_doubles(const json& j, const char* what) {
    if (!j.is_array()) schema(std::string("field '") + what + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(as_double(v, what));
    return out;
}

Site as_site(const json& j, const char* what) {
    if (!j.is_array()) schema(std::string("field '") + what + "' must be an integer array");
    Site out;
    for (const auto& v : j) out.push_back(as_int(v, what));
    return out;
}

}  // namespace

std::string fmt_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

Potential potential_from_json(const json& j) {
    if (!j.is_object()) schema("'potential' must be an object");
    if (j.contains("builtin_n_well")) return builtin_n_well(as_int(j["builtin_n_well"], "builtin_n_well"));
    if (j.contains("table")) {
        auto t = as_doubles(j["table"], "table");
        return Potential::from_table(t);
    }
    schema("'potential' needs 'builtin_n_well' or 'table'");
}

InteractionStencil stencil_from_json(const json& j) {
    if (!j.is_object()) schema("'stencil' must be an object");
    if (j.contains("harmonic")) return builtin_harmonic_stencil(as_int(field(j["harmonic"], "d"), "d"));
    if (j.contains("custom")) {
        const auto& c = j["custom"];
        const int d = as_int(field(c, "d"), "d");
        std::vector<PairCoupling> pairs;
        const auto& arr = field(c, "pairs");
        if (!arr.is_array()) schema("'pairs' must be an array");
        for (const auto& p : arr) pairs.push_back({as_site(field(p, "offset"), "offset"), as_double(field(p, "weight"), "weight")});
        return pair_stencil(d, std::move(pairs));
    }
    schema("'stencil' needs 'harmonic' or 'custom'");
}

json constants_to_json(const ModelConstants& c) {
    return json{{"c", c.c},
                {"C1", c.C1},
                {"C2", c.C2},
                {"delta0", c.delta0},
                {"eps0", c.eps0},
                {"eps1", c.eps1},
                {"contraction_k", c.contraction_k},
                {"osc_K", c.osc_bound_K},
                {"lipschitz_d2", c.lipschitz_d2},
                {"critical_spacing", c.critical_spacing}};
}

json model_echo(const Model& m) {
    json crit = json::array();
    for (const auto& c : m.V.criticals())
        crit.push_back({{"location", c.location}, {"kind", c.kind == CriticalKind::minimum ? "min" : "max"}});
    return json{{"potential", m.V.name()},
                {"stencil", m.S.name()},
                {"d", m.dim()},
                {"range", m.range()},
                {"criticals", crit},
                {"constants", constants_to_json(m.constants)}};
}

Model model_from_json(const json& spec, const std::vector<double>& omega) {
    const json& mj = spec.contains("model") ? spec["model"] : spec;
    auto V = potential_from_json(field(mj, "potential"));
    auto S = stencil_from_json(field(mj, "stencil"));
    const double k = mj.contains("contraction_k") ? as_double(mj["contraction_k"], "contraction_k") : 0.5;
    const double K = mj.contains("osc_K") ? as_double(mj["osc_K"], "osc_K") : default_osc_bound(S.range(), omega);
    ConstantOverrides over;
    if (mj.contains("constants")) {
        const auto& c = mj["constants"];
        if (c.contains("C1")) over.C1 = as_double(c["C1"], "C1");
        if (c.contains("C2")) over.C2 = as_double(c["C2"], "C2");
        if (c.contains("delta0")) over.delta0 = as_double(c["delta0"], "delta0");
    }
    return make_model(std::move(V), std::move(S), k, K, over);
}

ExperimentSpec experiment_from_json(const json& j) {
    if (!j.is_object()) schema("spec must be a JSON object");
    ExperimentSpec e;
    e.raw = j;
    e.omega = as_doubles(field(j, "omega"), "omega");
    if (e.omega.empty()) schema("'omega' must not be empty");
    if (j.contains("p")) e.p = as_doubles(j["p"], "p");
    if (j.contains("eps")) {
        const auto& v = j["eps"];
        if (!v.is_number() && !v.is_string()) schema("'eps' must be a number or a string like \"eps1/2\"");
        e.eps = v;
    }
    if (j.contains("window")) {
        const auto& w = j["window"];
        if (w.contains("radius")) {
            e.window = Box::cube(static_cast<int>(e.omega.size()), as_int(w["radius"], "radius"));
        } else {
            auto lo = as_site(field(w, "lo"), "lo"), hi = as_site(field(w, "hi"), "hi");
            if (lo.size() != e.omega.size() || hi.size() != e.omega.size())
                schema("window corners must match the dimension of omega");
            e.window = Box(lo, hi);
        }
    }
    if (j.contains("tol")) e.tol = as_double(j["tol"], "tol");
    if (j.contains("n_samples")) e.n_samples = as_int(j["n_samples"], "n_samples");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) schema("'seed' must be an integer");
        e.seed = j["seed"].get<std::uint64_t>();
    }
    return e;
}

double resolve_eps(const json& e, const ModelConstants& c) {
    if (e.is_number()) return e.get<double>();
    const std::string s = e.get<std::string>();
    double base = 0;
    std::string rest;
    if (s.rfind("eps1", 0) == 0) {
        base = c.eps1;
        rest = s.substr(4);
    } else if (s.rfind("eps0", 0) == 0) {
        base = c.eps0;
        rest = s.substr(4);
    } else {
        schema("'eps' string must start with eps0 or eps1");
    }
    if (rest.empty()) return base;
    if (rest[0] != '/') schema("'eps' string must look like eps1/2");
    double den = 0;
    auto r = std::from_chars(rest.data() + 1, rest.data() + rest.size(), den);
    if (r.ec != std::errc() || r.ptr != rest.data() + rest.size() || !(den > 0)) schema("bad divisor in 'eps'");
    return base / den;
}

json hull_to_json(const HullFunction& h) {
    return json{{"breakpoints", h.breakpoints()}, {"values", h.values()}, {"lengths", h.lengths()}};
}

HullFunction hull_from_json(const json& j) {
    auto t = as_doubles(field(j, "breakpoints"), "breakpoints");
    auto v = as_doubles(field(j, "values"), "values");
    std::vector<double> len;
    if (j.contains("lengths")) len = as_doubles(j["lengths"], "lengths");
    return HullFunction(std::move(t), std::move(v), std::move(len));
}

json measure_to_json(const CircleMeasure& mu) {
    json atoms = json::array();
    for (const auto& a : mu.atomized().atoms) atoms.push_back(json::array({a.location, a.mass}));
    return json{{"atoms", atoms}};
}

CircleMeasure measure_from_json(const json& j) {
    CircleMeasure mu;
    const auto& arr = field(j, "atoms");
    if (!arr.is_array()) schema("'atoms' must be an array");
    for (const auto& a : arr) {
        if (!a.is_array() || a.size() != 2) schema("each atom must be [location, mass]");
        mu.atoms.push_back({as_double(a[0], "location"), as_double(a[1], "mass")});
    }
    return mu;
}

void write_config_csv(std::ostream& os, const Configuration& x) {
    const Box& dom = x.domain();
    for (int a = 0; a < dom.dim(); ++a) os << "i_" << a + 1 << ",";
    os << "x\n";
    for (std::size_t f = 0; f < x.size(); ++f) {
        for (int v : dom.site(f)) os << v << ",";
        os << fmt_double(x[f]) << "\n";
    }
}

Configuration read_config_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) schema("empty configuration CSV");
    const int d = static_cast<int>(std::count(line.begin(), line.end(), ','));
    if (d < 1) schema("configuration CSV needs site columns");
    std::map<Site, double> vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Site s;
        for (int a = 0; a < d; ++a) {
            if (!std::getline(ss, cell, ',')) schema("short row in configuration CSV");
            s.push_back(std::stoi(cell));
        }
        if (!std::getline(ss, cell)) schema("missing value in configuration CSV");
        vals[s] = std::stod(cell);
    }
    if (vals.empty()) schema("configuration CSV has no rows");
    Site lo = vals.begin()->first, hi = lo;
    for (const auto& [s, v] : vals)
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], s[a]);
            hi[a] = std::max(hi[a], s[a]);
        }
    Box dom(lo, hi);
    if (dom.size() != vals.size()) schema("configuration CSV does not fill a rectangle");
    Configuration x(dom);
    for (const auto& [s, v] : vals) x.at(s) = v;
    return x;
}

void write_run_csv(std::ostream& os, const Configuration& x0, const Configuration& x,
                   const std::vector<double>& residual, const Box& interior) {
    const Box& dom = x0.domain();
    for (int a = 0; a < dom.dim(); ++a) os << "i_" << a + 1 << ",";
    os << "x0,x,residual\n";
    for (std::size_t f = 0; f < x0.size(); ++f) {
        const Site s = dom.site(f);
        for (int v : s) os << v << ",";
        os << fmt_double(x0[f]) << "," << fmt_double(x[f]) << ",";
        if (interior.contains(s))
            os << fmt_double(residual[interior.flat(s)]);
        os << "\n";
    }
}

json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) schema("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        schema("invalid JSON in " + p.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) schema("cannot write " + p.string());
    out << text;
    if (!out) schema("write failed for " + p.string());
}

}  // namespace lamlab
