#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lamlab/io.hpp"

namespace lamlab {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Property suite behind `lamlab verify`. Thresholds can be overridden through
// spec["verify"]["tolerances"][<check name>].
std::vector<CheckResult> run_property_suite(const json& spec, std::uint64_t seed);

}  // namespace lamlab
