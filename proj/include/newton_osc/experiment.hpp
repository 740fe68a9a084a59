#pragma once

#include "rational.hpp"

#include <nlohmann/json.hpp>

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace newton_osc {

/// One line of an experiment stream.
struct ExperimentRecord {
    std::string experiment;
    std::string variable = "lambda"; // or "epsilon"
    double x = 0.0;
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

inline nlohmann::json to_json(const ExperimentRecord& r)
{
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j[r.variable] = r.x;
    j["value"] = r.value;
    j["error"] = r.error;
    j["converged"] = r.converged;
    return j;
}

inline ExperimentRecord record_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw input_error("experiment record must be a JSON object");
    ExperimentRecord r;
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key)) throw input_error(std::string("experiment record is missing \"") + key + "\"");
        return j.at(key);
    };
    try {
        r.experiment = need("experiment").get<std::string>();
        if (j.contains("lambda") == j.contains("epsilon"))
            throw input_error("experiment record needs exactly one of \"lambda\" and \"epsilon\"");
        r.variable = j.contains("lambda") ? "lambda" : "epsilon";
        r.x = j.at(r.variable).get<double>();
        r.value = need("value").get<double>();
        r.error = need("error").get<double>();
        r.converged = need("converged").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("experiment record has a field of the wrong type: ") + e.what());
    }
    return r;
}

inline void write_records(std::ostream& os, const std::vector<ExperimentRecord>& rs)
{
    for (const auto& r : rs) os << to_json(r).dump() << '\n';
}

inline std::vector<ExperimentRecord> read_records(std::istream& is)
{
    std::vector<ExperimentRecord> out;
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (detail::trim(line).empty()) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::parse_error&) {
            throw input_error("line " + std::to_string(n) + " is not valid JSON");
        } catch (const input_error& e) {
            throw input_error("line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

} // namespace newton_osc
