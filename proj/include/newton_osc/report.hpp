#pragma once

#include "decay.hpp"
#include "dyadic.hpp"
#include "experiment.hpp"
#include "newton.hpp"
#include "nondeg.hpp"
#include "quadrature.hpp"
#include "rate_fit.hpp"
#include "sublevel.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace newton_osc {

using nlohmann::json;

/// Largest allowed gap between a fitted and a predicted rate.
inline constexpr double rate_tolerance = 0.05;

/// Scales 2^-1 .. 2^-8 used for the growth section of analysis reports.
inline constexpr int growth_scale_from = 1;
inline constexpr int growth_scale_to = 8;

/// Exponent m with x = 2^m, or an input error naming the flag.
int dyadic_exponent(double x, const std::string& name);

std::vector<double> dyadic_grid(double from, double to, const std::string& name);

inline json exponents_json(const ExponentTuple& p) { return p.strings(); }

json newton_distance_json(const NewtonPolyhedron& poly, const RationalVector& v);

/// Plot-ready CSV text for a list of rows.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<json>>& rows);

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeInputs {
    Phase phase;
    ExponentTuple exponents;
    double grid_h = default_grid_h;
};

/// Thrown after the partial report is complete, so callers can still emit it.
struct PipelineStop {
    int exit_code;
    std::string message;
    json report;
};

inline json inputs_json(const AnalyzeInputs& in)
{
    return {{"command", "analyze"}, {"phase", to_json(in.phase)}, {"exponents", exponents_json(in.exponents)}, {"grid_h", in.grid_h}};
}

/// Geometry, nondegeneracy, hypotheses and prediction. Throws PipelineStop with exit
/// code 2 (degenerate phase) or 3 (inadmissible exponents).
json analyze(const AnalyzeInputs& in);

// ---------------------------------------------------------------------------
// decay-fit

enum class FitMode { sharpness, fixed_f, dyadic_sum };

std::string to_string(FitMode m);

FitMode parse_fit_mode(const std::string& s);

struct DecayFitInputs {
    Phase phase;
    ExponentTuple exponents;
    double lambda_min = 16;
    double lambda_max = 4096;
    FitMode mode = FitMode::sharpness;
};

inline json inputs_json(const DecayFitInputs& in)
{
    return {{"command", "decay-fit"},
            {"phase", to_json(in.phase)},
            {"exponents", exponents_json(in.exponents)},
            {"lambda_min", in.lambda_min},
            {"lambda_max", in.lambda_max},
            {"mode", to_string(in.mode)}};
}

struct DecayFitOutput {
    json report;
    std::vector<ExperimentRecord> records;
};


/// Runs one numeric experiment over the dyadic lambda grid and compares the fitted rate
/// with the prediction. Status is "pass", "fail", or "flagged" (unconverged quadrature).
DecayFitOutput decay_fit(const DecayFitInputs& in);

// ---------------------------------------------------------------------------
// sublevel

struct SublevelInputs {
    Phase phase;
    double eps_min = 1.0 / 4096;
    double eps_max = 1.0 / 16;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
};

inline json inputs_json(const SublevelInputs& in)
{
    return {{"command", "sublevel"},
            {"phase", to_json(in.phase)},
            {"eps_min", in.eps_min},
            {"eps_max", in.eps_max},
            {"samples", in.samples},
            {"seed", in.seed}};
}

struct SublevelOutput {
    json report;
    std::vector<ExperimentRecord> records;
};

/// Monte Carlo sublevel volumes on the dyadic eps grid, checked against the bound
/// transferred from the L^inf decay estimate: fitted exponent >= predicted - tol and
/// every volume below eps^predicted (times the log factor, constant one).
SublevelOutput sublevel(const SublevelInputs& in);

} // namespace newton_osc
