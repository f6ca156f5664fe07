#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>
#include "lamlab/hull.hpp"
#include "lamlab/measure.hpp"
#include "lamlab/model.hpp"

namespace lamlab {

using json = nlohmann::ordered_json;

// shortest decimal that round-trips
std::string fmt_double(double v);

Potential potential_from_json(const json& j);
InteractionStencil stencil_from_json(const json& j);
json model_echo(const Model& m);
json constants_to_json(const ModelConstants& c);

// Model spec with K defaulting to r ||omega||_1 + 2.
Model model_from_json(const json& spec, const std::vector<double>& omega);

struct ExperimentSpec {
    json raw;
    std::vector<double> omega;
    std::optional<std::vector<double>> p;
    std::optional<json> eps;  // number or "eps1", "eps1/2", "eps0/4"
    std::optional<Box> window;
    double tol = 1e-12;
    int n_samples = 32;
    std::uint64_t seed = 0;
};
ExperimentSpec experiment_from_json(const json& j);
double resolve_eps(const json& e, const ModelConstants& c);

json hull_to_json(const HullFunction& h);
HullFunction hull_from_json(const json& j);
json measure_to_json(const CircleMeasure& mu);
CircleMeasure measure_from_json(const json& j);

void write_config_csv(std::ostream& os, const Configuration& x);
Configuration read_config_csv(std::istream& is);
void write_run_csv(std::ostream& os, const Configuration& x0, const Configuration& x,
                   const std::vector<double>& residual, const Box& interior);

json read_json_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

}  // namespace lamlab
