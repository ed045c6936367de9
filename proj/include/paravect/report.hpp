#pragma once

#include "paravect/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace paravect {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything a command run depends on. Reports echo it back so a run can be
/// reproduced from its own output.
struct RunConfig {
    std::uint64_t seed = 0;
    int trials = 100;
    std::map<std::string, double> tolerances; // per-check overrides
    Index d = 3;
    Index d_k = 2;
    Index d_v = 2;
    Index n = 4;
    Index depth = 3;
    std::string out;
    std::string format = "json";
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0.0;   // residual or statistic, per the check
    double tolerance = 0.0;  // the threshold it was judged at
    std::string witness;     // optional, empty when absent
    double elapsed_ms = 0.0; // the only nondeterministic field
};

struct Report {
    std::string tool_version = kToolVersion;
    RunConfig config;
    std::vector<CheckResult> checks;

    bool allPass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Deterministic given (config, inputs) apart from the elapsed_ms fields.
/// Field names are lower_snake_case; check order is declaration order.
std::string toJson(const Report& report);

} // namespace paravect
