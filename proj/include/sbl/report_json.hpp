#ifndef SBL_REPORT_JSON_HPP
#define SBL_REPORT_JSON_HPP

// Requires the single-header nlohmann json ("json.hpp") on the include path;
// the rest of the library has no such dependency.
#include "json.hpp"

#include "sbl/verifier.hpp"

namespace sbl {

/// Report serialization with stable key order; identical reports serialize
/// to identical bytes, runtime_ms being the only run-varying field.
inline nlohmann::ordered_json report_to_json(const VerificationReport& report) {
    nlohmann::ordered_json j;
    j["model"] = report.model;
    if (report.hypotheses) {
        const GeometricHypotheses& hyp = *report.hypotheses;
        nlohmann::ordered_json h;
        h["dimension"] = hyp.dimension;
        h["curvature_bound"] = hyp.curvature_bound;
        h["gradient_bound"] = hyp.gradient_bound;
        h["diameter"] = hyp.diameter;
        if (hyp.volume)
            h["volume"] = *hyp.volume;
        else
            h["volume"] = nullptr;
        j["hypotheses"] = h;
    } else {
        j["hypotheses"] = nullptr;
    }
    j["checks"] = nlohmann::ordered_json::array();
    for (const CheckRecord& check : report.checks) {
        nlohmann::ordered_json c;
        c["name"] = check.name;
        c["anchor"] = check.anchor;
        c["lhs_log"] = check.lhs_log;
        c["rhs_log"] = check.rhs_log;
        c["margin_log"] = check.margin_log;
        c["pass"] = check.pass;
        j["checks"].push_back(std::move(c));
    }
    j["pass"] = report.pass;
    j["runtime_ms"] = report.runtime_ms;
    return j;
}

}  // namespace sbl

#endif
