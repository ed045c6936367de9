#include "paravect/report.hpp"

#include <nlohmann/json.hpp>

namespace paravect {

using nlohmann::json;

std::string toJson(const Report& report) {
    json cfg;
    cfg["seed"] = report.config.seed;
    cfg["trials"] = report.config.trials;
    cfg["tolerance_overrides"] = json::object();
    for (const auto& [name, value] : report.config.tolerances)
        cfg["tolerance_overrides"][name] = value;
    cfg["dims"] = {{"d", report.config.d},
                   {"dk", report.config.d_k},
                   {"dv", report.config.d_v},
                   {"n", report.config.n}};
    cfg["depth"] = report.config.depth;
    cfg["out"] = report.config.out;
    cfg["format"] = report.config.format;

    json checks = json::array();
    for (const auto& c : report.checks) {
        json jc;
        jc["name"] = c.name;
        jc["pass"] = c.pass;
        jc["residual"] = c.residual;
        jc["tolerance"] = c.tolerance;
        if (!c.witness.empty()) jc["witness"] = c.witness;
        jc["elapsed_ms"] = c.elapsed_ms;
        checks.push_back(std::move(jc));
    }

    json j;
    j["tool_version"] = report.tool_version;
    j["config"] = std::move(cfg);
    j["checks"] = std::move(checks);
    j["all_pass"] = report.allPass();
    return j.dump(2) + "\n";
}

} // namespace paravect
