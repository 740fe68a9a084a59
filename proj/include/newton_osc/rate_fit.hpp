#pragma once

#include "rational.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace newton_osc {

struct RateFit {
    std::vector<std::pair<double, double>> samples;
    double rate = 0.0;         // r in value ~ C t^-r (log t)^s
    int log_power = 0;         // s
    double constant = 0.0;     // C
    double residual = 0.0;     // sum of squared log residuals
    double max_relative_residual = 0.0;
};

/// Least squares of log(value) = log C - r log t + s log log t for each candidate s;
/// keeps the smallest residual, ties going to the smaller s. Logs are natural.
inline RateFit rate_fit(const std::vector<std::pair<double, double>>& samples, std::vector<int> candidates = {0})
{
    if (samples.size() < 4) throw input_error("rate fit needs at least 4 samples");
    if (candidates.empty()) throw input_error("rate fit needs a log power candidate");
    for (const auto& [t, v] : samples) {
        if (!(v > 0)) throw input_error("rate fit needs positive values");
        if (!(t > 1)) throw input_error("rate fit needs t > 1");
    }
    std::sort(candidates.begin(), candidates.end());

    const double n = static_cast<double>(samples.size());
    double sx = 0, sxx = 0;
    for (const auto& [t, v] : samples) {
        const double x = std::log(t);
        sx += x;
        sxx += x * x;
    }
    const double det = n * sxx - sx * sx;
    if (det <= 0) throw input_error("rate fit needs at least two distinct t");

    RateFit best;
    bool have = false;
    for (int s : candidates) {
        double sy = 0, sxy = 0;
        std::vector<double> ys;
        for (const auto& [t, v] : samples) {
            const double y = std::log(v) - s * std::log(std::log(t));
            ys.push_back(y);
            sy += y;
            sxy += std::log(t) * y;
        }
        const double slope = (n * sxy - sx * sy) / det;
        const double icept = (sy - slope * sx) / n;
        double ssr = 0, maxrel = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double r = ys[i] - (icept + slope * std::log(samples[i].first));
            ssr += r * r;
            maxrel = std::max(maxrel, std::abs(std::expm1(r)));
        }
        if (!have || ssr < best.residual * (1 - 1e-9) - 1e-24) {
            best = RateFit{samples, -slope, s, std::exp(icept), ssr, maxrel};
            have = true;
        }
    }
    return best;
}

inline nlohmann::json to_json(const RateFit& f)
{
    return {{"rate", f.rate},
            {"log_power", f.log_power},
            {"constant", f.constant},
            {"residual", f.residual},
            {"max_relative_residual", f.max_relative_residual}};
}

} // namespace newton_osc
