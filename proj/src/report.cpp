#include "newton_osc/report.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace newton_osc {
int dyadic_exponent(double x, const std::string& name)
{
    int e = 0;
    const double f = std::frexp(x, &e);
    if (!(x > 0) || f != 0.5) throw input_error(name + " must be a power of two, got " + json(x).dump());
    return e - 1;
}

std::vector<double> dyadic_grid(double from, double to, const std::string& name)
{
    const int a = dyadic_exponent(from, name + "-min"), b = dyadic_exponent(to, name + "-max");
    if (b - a + 1 < 4) throw input_error(name + " range must span at least 4 dyadic values");
    std::vector<double> out;
    for (int m = a; m <= b; ++m) out.push_back(std::ldexp(1.0, m));
    return out;
}

json newton_distance_json(const NewtonPolyhedron& poly, const RationalVector& v)
{
    const auto nd = newton_distance(poly, v);
    json j = to_json(nd.point);
    j["delta"] = to_string(nd.delta);
    j["direction"] = rational_json(v);
    return j;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<json>>& rows)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << (r[i].is_string() ? r[i].get<std::string>() : r[i].dump());
        os << '\n';
    }
    return os.str();
}

json analyze(const AnalyzeInputs& in)
{
    if (in.exponents.dim() != in.phase.dim())
        throw input_error("exponents: expected " + std::to_string(in.phase.dim()) + " values, got " +
                          std::to_string(in.exponents.dim()));
    json r;
    r["inputs"] = inputs_json(in);
    r["phase"] = to_json(in.phase);
    const auto poly = NewtonPolyhedron::of(in.phase);
    r["polyhedron"] = to_json(poly);

    const auto verdict = check_nondegenerate(in.phase, in.grid_h);
    r["nondegeneracy"] = to_json(verdict);
    if (!verdict.nondegenerate) throw PipelineStop{2, "degenerate phase: D_d S_F vanishes off the coordinate hyperplanes", r};
    r["growth"] = to_json(check_lower_growth(in.phase, dyadic_scales(in.phase.dim(), growth_scale_from, growth_scale_to), verdict));

    const auto hyp = validate_hypotheses(in.exponents);
    r["exponents"] = to_json(hyp);
    r["exponents"]["values"] = exponents_json(in.exponents);
    r["exponents"]["direction"] = rational_json(in.exponents.direction());
    if (!hyp.any() || !hyp.direction_positive) {
        std::string msg = "invalid exponents:";
        for (const auto& m : hyp.diagnostics) msg += "\n  " + m;
        throw PipelineStop{3, msg, r};
    }

    r["newton_distance"] = newton_distance_json(poly, in.exponents.direction());
    r["decay"] = to_json(predict(in.phase, in.exponents, verdict));
    return r;
}

std::string to_string(FitMode m)
{
    switch (m) {
    case FitMode::sharpness: return "sharpness";
    case FitMode::fixed_f: return "fixed-f";
    case FitMode::dyadic_sum: return "dyadic-sum";
    }
    return "?";
}

FitMode parse_fit_mode(const std::string& s)
{
    if (s == "sharpness") return FitMode::sharpness;
    if (s == "fixed-f") return FitMode::fixed_f;
    if (s == "dyadic-sum") return FitMode::dyadic_sum;
    throw input_error("mode: expected sharpness, fixed-f or dyadic-sum, got \"" + s + "\"");
}

namespace detail {

std::vector<int> log_power_candidates(int d)
{
    std::vector<int> c;
    for (int s = 0; s <= d; ++s) c.push_back(s);
    return c;
}

std::vector<std::pair<double, double>> samples_of(const std::vector<ExperimentRecord>& rs)
{
    std::vector<std::pair<double, double>> out;
    for (const auto& r : rs) out.emplace_back(r.x, r.value);
    return out;
}

bool all_converged(const std::vector<ExperimentRecord>& rs)
{
    for (const auto& r : rs)
        if (!r.converged) return false;
    return true;
}

} // namespace detail

DecayFitOutput decay_fit(const DecayFitInputs& in)
{
    const int d = in.phase.dim();
    const auto lambdas = dyadic_grid(in.lambda_min, in.lambda_max, "lambda");
    if (in.lambda_min < 2) throw input_error("lambda-min must be at least 2");
    if (in.exponents.dim() != d) throw input_error("exponents: dimension does not match the phase");
    const auto estimate = predict(in.phase, in.exponents);
    const double predicted = to_double(estimate.rate);

    DecayFitOutput out;
    json& r = out.report;
    r["inputs"] = inputs_json(in);
    r["prediction"] = to_json(estimate);
    json sec;
    sec["mode"] = to_string(in.mode);
    std::vector<std::vector<json>> rows;
    std::vector<std::string> header;
    auto& recs = out.records;

    if (in.mode == FitMode::dyadic_sum) {
        const auto poly = NewtonPolyhedron::of(in.phase);
        DyadicSumInput ds;
        for (const auto& a : poly.vertices()) ds.vertices.push_back(to_double(to_rational(a)));
        ds.v = to_double(in.exponents.direction());
        ds.delta = to_double(estimate.delta);
        ds.gamma = to_double(critical_distance(d));
        header = {"lambda", "value", "envelope_ratio"};
        for (double lam : lambdas) {
            const double value = dyadic_min_sum(ds, lam);
            const double env = std::pow(lam, -predicted) * std::pow(std::log2(lam), estimate.log_power);
            recs.push_back({"dyadic-sum", "lambda", lam, value, 0.0, true});
            rows.push_back({lam, value, value / env});
        }
        const auto fit = rate_fit(detail::samples_of(recs), detail::log_power_candidates(d));
        sec["fit"] = to_json(fit);
        sec["predicted_rate"] = predicted;
        sec["status"] = std::abs(fit.rate - predicted) <= rate_tolerance ? "pass" : "fail";
    } else {
        if (d > 4 || (d == 4 && in.phase.size() != 1))
            throw input_error("mode " + to_string(in.mode) + " supports d <= 3, or d = 4 for a monomial phase");
        const bool sharp = in.mode == FitMode::sharpness;
        std::optional<SharpnessExponents> se;
        std::vector<double> normal;
        if (sharp) {
            se = sharpness_prediction(in.phase, in.exponents, default_sharpness_normal(in.phase, in.exponents));
            normal = to_double(se->normal);
            sec["normal"] = rational_json(se->normal);
            sec["predicted_exponents"] = {{"norm_product", to_string(se->norm_product)},
                                          {"lambda_form", to_string(se->lambda_form)},
                                          {"ratio", to_string(se->ratio)}};
        }
        header = {"lambda", "abs_lambda_form", "relative_change", "converged", "panels_per_axis"};
        if (sharp) header.insert(header.end(), {"norm_product", "ratio"});
        std::vector<ExperimentRecord> norms, ratios;
        for (double lam : lambdas) {
            const auto fs = sharp ? box_test_functions(sharpness_widths(normal, lam)) : constant_test_functions(d);
            const auto q = auto_quadrature_spec(in.phase, lam, fs);
            const auto res = eval_lambda_form(in.phase, fs, q);
            const double a = std::abs(res.value);
            recs.push_back({to_string(in.mode), "lambda", lam, a, std::abs(res.value - res.coarse), res.converged});
            std::vector<json> row{lam, a, res.relative_change, res.converged, q.panels_per_axis};
            if (sharp) {
                const double np = norm_product(fs, in.exponents);
                norms.push_back({"norm-product", "lambda", lam, np, 0.0, true});
                ratios.push_back({"sharpness-ratio", "lambda", lam, a / np, recs.back().error / np, res.converged});
                row.insert(row.end(), {np, a / np});
            }
            rows.push_back(std::move(row));
        }
        const bool clean = detail::all_converged(recs);
        sec["converged"] = clean;
        if (sharp) {
            const auto fl = rate_fit(detail::samples_of(recs), {0});
            const auto fn = rate_fit(detail::samples_of(norms), {0});
            const auto fr = rate_fit(detail::samples_of(ratios), {0});
            sec["fit"] = to_json(fr);
            sec["lambda_form_fit"] = to_json(fl);
            sec["norm_product_fit"] = to_json(fn);
            sec["predicted_rate"] = to_double(-se->ratio);
            const bool ok = std::abs(fr.rate + to_double(se->ratio)) <= rate_tolerance;
            sec["status"] = !clean ? "flagged" : (ok ? "pass" : "fail");
            recs.insert(recs.end(), norms.begin(), norms.end());
            recs.insert(recs.end(), ratios.begin(), ratios.end());
        } else {
            // A single fixed f need not attain the bound, so only r_hat >= r - tol is checked.
            const auto f = rate_fit(detail::samples_of(recs), detail::log_power_candidates(d));
            sec["fit"] = to_json(f);
            sec["predicted_rate"] = predicted;
            sec["check"] = "one-sided: fitted rate >= predicted - tolerance";
            sec["status"] = !clean ? "flagged" : (f.rate >= predicted - rate_tolerance ? "pass" : "fail");
        }
    }
    sec["tolerance"] = rate_tolerance;
    sec["csv"] = csv(header, rows);
    r["decay_fit"] = sec;
    return out;
}

SublevelOutput sublevel(const SublevelInputs& in)
{
    if (!(in.eps_max < 1)) throw input_error("eps-max must be below 1");
    const auto eps = dyadic_grid(in.eps_min, in.eps_max, "eps");
    const int d = in.phase.dim();
    const auto estimate = predict(in.phase, ExponentTuple::infinite(d));
    const auto bound = decay_to_sublevel(estimate);
    const double predicted = to_double(bound.exponent);

    SublevelOutput out;
    json& r = out.report;
    r["inputs"] = inputs_json(in);
    r["prediction"] = to_json(estimate);
    const auto vols = sublevel_monte_carlo(in.phase, eps, in.samples, in.seed);

    std::vector<std::vector<json>> rows;
    bool inconclusive = false, envelope = true;
    std::vector<std::pair<double, double>> samples;
    for (const auto& v : vols) {
        const double env = bound(v.epsilon);
        const bool under = v.estimate <= env;
        envelope = envelope && under;
        inconclusive = inconclusive || v.inconclusive;
        out.records.push_back({"sublevel", "epsilon", v.epsilon, v.estimate, v.error, !v.inconclusive});
        rows.push_back({v.epsilon, v.estimate, v.error, v.inconclusive, env});
        if (v.estimate > 0) samples.emplace_back(1.0 / v.epsilon, v.estimate);
    }
    json sec;
    sec["predicted_exponent"] = predicted;
    sec["envelope_respected"] = envelope;
    sec["inconclusive"] = inconclusive;
    sec["tolerance"] = rate_tolerance;
    bool ok = envelope;
    if (samples.size() >= 4) {
        const auto fit = rate_fit(samples, detail::log_power_candidates(d));
        sec["fit"] = to_json(fit);
        ok = ok && fit.rate >= predicted - rate_tolerance;
    } else {
        ok = false;
    }
    sec["status"] = inconclusive ? "flagged" : (ok ? "pass" : "fail");
    sec["csv"] = csv({"epsilon", "volume", "error", "inconclusive", "envelope"}, rows);
    r["sublevel"] = sec;
    return out;
}

} // namespace newton_osc
