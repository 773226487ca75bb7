#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace modstein {

// Outcome of sweeping one inequality family over its evaluation grid for a
// single parameter pair. worst_margin is min(rhs - lhs) over the grid, so
// the check passes when it stays above -1e-12; out-of-hypothesis parameters
// are reported with applicable = false and a human-readable reason instead
// of being evaluated.
struct VerificationReport {
    std::string name;
    double gamma = 0;
    double c = 0;
    bool applicable = true;
    std::string skip_reason;
    double worst_margin = 0;
    double argmin_x = 0;
    std::size_t grid_size = 0;
    bool pass = false;
};

// Outcome of measuring one operator-norm bound against one test function.
struct NormReport {
    std::string bound;   // which inequality was measured
    double gamma = 0;
    double c = 0;
    std::string h_name;  // test function label
    double measured = 0;
    double bound_value = 0;
    double ratio = 0;    // measured / bound_value
    bool pass = false;
};

inline void to_json(nlohmann::json& j, const VerificationReport& r) {
    j = nlohmann::json{{"name", r.name},
                       {"gamma", r.gamma},
                       {"c", r.c},
                       {"applicable", r.applicable},
                       {"skip_reason", r.skip_reason},
                       {"worst_margin", r.worst_margin},
                       {"argmin_x", r.argmin_x},
                       {"grid_size", r.grid_size},
                       {"pass", r.pass}};
}

inline void to_json(nlohmann::json& j, const NormReport& r) {
    j = nlohmann::json{{"bound", r.bound},     {"gamma", r.gamma},
                       {"c", r.c},             {"h", r.h_name},
                       {"measured", r.measured}, {"bound_value", r.bound_value},
                       {"ratio", r.ratio},     {"pass", r.pass}};
}

}  // namespace modstein
