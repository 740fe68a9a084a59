#pragma once

#include "parallel.hpp"
#include "phase.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace newton_osc {

/// Counter-based generator: the k-th output depends only on (seed, k).
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double uniform01(std::uint64_t seed, std::uint64_t counter)
{
    return static_cast<double>(splitmix64(seed ^ splitmix64(counter)) >> 11) * 0x1.0p-53;
}

struct VolumeEstimate {
    double epsilon = 0.0;
    double estimate = 0.0;
    double error = 0.0; // one standard error (Monte Carlo) or straddle bound (grid)
    bool inconclusive = false;
};

/// |{x in [0,1]^3 : |xyz| < eps}| = eps (1 + L + L^2/2), L = log(1/eps).
inline double xyz_sublevel_volume(double eps)
{
    if (eps >= 1) return 1.0;
    const double L = std::log(1.0 / eps);
    return eps * (1.0 + L + 0.5 * L * L);
}

namespace detail {
inline void check_eps(const std::vector<double>& eps)
{
    for (double e : eps)
        if (!(e > 0 && e <= 1)) throw input_error("epsilon must lie in (0, 1]");
}
} // namespace detail

/// Monte Carlo estimate of |{x in [0,1]^d : |S(x)| < eps}| for every eps from the same
/// n points. Coordinate k of point i is uniform01(seed, i d + k).
inline std::vector<VolumeEstimate> sublevel_monte_carlo(const Phase& s, const std::vector<double>& eps,
                                                        std::uint64_t n, std::uint64_t seed)
{
    detail::check_eps(eps);
    if (n == 0) throw input_error("sample count must be positive");
    const int d = s.dim();
    constexpr std::uint64_t batch = 1u << 16;
    const std::uint64_t batches = (n + batch - 1) / batch;

    auto run = [&](std::size_t b) {
        std::vector<std::uint64_t> counts(eps.size(), 0);
        std::vector<double> x(d);
        const std::uint64_t end = std::min<std::uint64_t>(n, (b + 1) * batch);
        for (std::uint64_t i = b * batch; i < end; ++i) {
            for (int k = 0; k < d; ++k) x[k] = uniform01(seed, i * d + k);
            const double v = std::abs(s.eval(x));
            for (std::size_t e = 0; e < eps.size(); ++e)
                if (v < eps[e]) ++counts[e];
        }
        return counts;
    };
    const auto parts = ordered_map<std::vector<std::uint64_t>>(batches, run);

    std::vector<VolumeEstimate> out;
    for (std::size_t e = 0; e < eps.size(); ++e) {
        std::uint64_t c = 0;
        for (const auto& p : parts) c += p[e];
        const double p = static_cast<double>(c) / static_cast<double>(n);
        VolumeEstimate v{eps[e], p, std::sqrt(p * (1 - p) / static_cast<double>(n)), false};
        if (c == 0) {
            // Zero hits: the 95% upper bound 3/n is all that is known.
            v.error = 3.0 / static_cast<double>(n);
            v.inconclusive = true;
        }
        out.push_back(v);
    }
    return out;
}

/// Deterministic midpoint sum on m^d cells. The error bar counts cells whose corner
/// values straddle eps, which bounds the misclassified volume for phases monotone in
/// each coordinate on the box (every monomial) and is a heuristic otherwise.
inline std::vector<VolumeEstimate> sublevel_grid(const Phase& s, const std::vector<double>& eps, int m)
{
    detail::check_eps(eps);
    if (m < 2) throw input_error("grid needs m >= 2");
    const int d = s.dim();
    const double h = 1.0 / m;
    const double cell = std::pow(h, d);

    struct Counts {
        std::vector<std::uint64_t> inside, straddle;
    };
    auto run = [&](std::size_t i0) {
        Counts c{std::vector<std::uint64_t>(eps.size(), 0), std::vector<std::uint64_t>(eps.size(), 0)};
        std::vector<int> idx(d, 0);
        idx[0] = static_cast<int>(i0);
        std::vector<double> x(d), corner(d);
        for (;;) {
            for (int k = 0; k < d; ++k) x[k] = (idx[k] + 0.5) * h;
            const double mid = std::abs(s.eval(x));
            double lo = mid, hi = mid;
            for (int mask = 0; mask < (1 << d); ++mask) {
                for (int k = 0; k < d; ++k) corner[k] = (idx[k] + ((mask >> k) & 1)) * h;
                const double v = std::abs(s.eval(corner));
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            for (std::size_t e = 0; e < eps.size(); ++e) {
                if (mid < eps[e]) ++c.inside[e];
                if (lo < eps[e] && hi >= eps[e]) ++c.straddle[e];
            }
            int k = d - 1;
            while (k >= 1 && ++idx[k] == m) idx[k--] = 0;
            if (k < 1) break;
        }
        return c;
    };
    const auto parts = ordered_map<Counts>(static_cast<std::size_t>(m), run);

    std::vector<VolumeEstimate> out;
    for (std::size_t e = 0; e < eps.size(); ++e) {
        std::uint64_t in = 0, st = 0;
        for (const auto& p : parts) {
            in += p.inside[e];
            st += p.straddle[e];
        }
        VolumeEstimate v{eps[e], in * cell, st * cell, false};
        v.inconclusive = in == 0;
        out.push_back(v);
    }
    return out;
}

} // namespace newton_osc
