#pragma once

#include "parallel.hpp"
#include "rational.hpp"

#include <cmath>
#include <vector>

namespace newton_osc {

struct DyadicSumInput {
    std::vector<std::vector<double>> vertices; // alpha^i
    std::vector<double> v;                     // direction, alpha = delta v
    double delta = 1.0;
    double gamma = 1.0;
};

/// Cutoffs c_k = 1 / (delta v_k): beyond j_k = c_k log2(lambda) the first branch of the
/// minimum alone is already below lambda^(-1/delta).
inline std::vector<double> dyadic_cutoffs(const DyadicSumInput& in)
{
    std::vector<double> c;
    for (double vk : in.v) c.push_back(1.0 / (in.delta * vk));
    return c;
}

/// Truncated sum over j in prod [0, ceil(c_k log2 lambda)] of
///   min{ 2^(-j.alpha/delta), min_i lambda^(-1/gamma) 2^(j.(alpha^i/gamma - alpha/delta)) }.
///
/// Only vertices of N(S) enter the inner minimum: the exponent is linear in alpha^i and,
/// since every j_k >= 0, moving alpha^i along a recession direction e_k can only raise
/// it. A convex combination of vertices is never below the smallest vertex term.
inline double dyadic_min_sum(const DyadicSumInput& in, double lambda, const std::vector<double>& cutoffs)
{
    if (in.vertices.empty()) throw input_error("dyadic sum needs at least one vertex");
    if (!(in.delta > 0) || !(in.gamma > 0)) throw input_error("delta and gamma must be positive");
    if (!(lambda >= 2)) throw input_error("lambda must be at least 2");
    const int d = static_cast<int>(in.v.size());
    if (static_cast<int>(cutoffs.size()) != d) throw input_error("cutoff vector has the wrong length");
    for (const auto& a : in.vertices)
        if (static_cast<int>(a.size()) != d) throw input_error("vertex has the wrong dimension");

    const double L = std::log2(lambda);
    std::vector<long> top(d);
    for (int k = 0; k < d; ++k) top[k] = static_cast<long>(std::ceil(cutoffs[k] * L - 1e-12));

    // Per-coordinate slopes in log2 units: first branch -v_k, vertex branch alpha^i_k/gamma - v_k.
    std::vector<std::vector<double>> slopes;
    for (const auto& a : in.vertices) {
        std::vector<double> s(d);
        for (int k = 0; k < d; ++k) s[k] = a[k] / in.gamma - in.v[k];
        slopes.push_back(std::move(s));
    }
    const double offset = -L / in.gamma;

    auto slice = [&](std::size_t j0) {
        std::vector<long> j(d, 0);
        j[0] = static_cast<long>(j0);
        double acc = 0.0;
        for (;;) {
            double first = 0.0;
            for (int k = 0; k < d; ++k) first -= j[k] * in.v[k];
            double best = first;
            for (const auto& s : slopes) {
                double e = offset;
                for (int k = 0; k < d; ++k) e += j[k] * s[k];
                best = std::min(best, e);
            }
            acc += std::exp2(best);
            int k = d - 1;
            while (k >= 1 && ++j[k] > top[k]) j[k--] = 0;
            if (k < 1) break;
        }
        return acc;
    };
    const auto parts = ordered_map<double>(static_cast<std::size_t>(top[0] + 1), slice);
    double total = 0.0;
    for (double p : parts) total += p;
    return total;
}

inline double dyadic_min_sum(const DyadicSumInput& in, double lambda)
{
    return dyadic_min_sum(in, lambda, dyadic_cutoffs(in));
}

struct TailBound {
    long first_index = 0;   // J = ceil(log2(lambda) / (delta v))
    double tail = 0.0;      // sum_{j >= J} 2^(-j v)
    double ratio = 0.0;     // tail / lambda^(-1/delta)
    double bound = 0.0;     // 1 / (1 - 2^(-v))
    bool within = false;    // decided exactly: log2(lambda)/delta - J v <= 0
};

/// Discarded geometric tail in one coordinate, with lambda = 2^log2_lambda.
inline TailBound tail_bound_check(const Rational& delta, const Rational& v, const Rational& log2_lambda)
{
    if (v <= 0) throw input_error("tail bound needs v > 0");
    if (delta <= 0) throw input_error("tail bound needs delta > 0");
    TailBound t;
    t.first_index = ceil_to_long(log2_lambda / (delta * v));
    const Rational gap = log2_lambda / delta - t.first_index * v;
    t.within = gap <= 0;
    const double vd = to_double(v);
    t.bound = 1.0 / -std::expm1(-vd * std::log(2.0));
    t.tail = std::exp2(-static_cast<double>(t.first_index) * vd) * t.bound;
    t.ratio = std::exp2(to_double(gap)) * t.bound;
    return t;
}

} // namespace newton_osc
