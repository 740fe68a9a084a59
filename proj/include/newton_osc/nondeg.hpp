#pragma once

#include "newton.hpp"
#include "phase.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace newton_osc {

inline constexpr double default_grid_h = 1.0 / 64.0;
inline constexpr double zero_threshold = 1e-9;

struct DegeneracyWitness {
    std::vector<double> point;
    std::vector<MultiIndex> face; // multi-indices of the compact face F
    double value = 0.0;           // D_d S_F at point
};

struct NondegeneracyVerdict {
    bool nondegenerate = true;
    std::optional<DegeneracyWitness> witness;
    double resolution = default_grid_h; // coarsest grid spacing actually used over all faces
};

/// Thrown when an operation that requires a nondegenerate phase receives a degenerate one.
class degenerate_phase_error : public std::logic_error {
public:
    explicit degenerate_phase_error(DegeneracyWitness w)
        : std::logic_error("phase is degenerate on a compact face of its Newton polyhedron"), witness(std::move(w))
    {
    }
    DegeneracyWitness witness;
};

namespace detail {

// Largest grid a single face scan may touch; beyond it the spacing is coarsened and
// the coarser spacing is reported.
inline constexpr std::size_t max_face_grid_points = 5'000'000;

inline int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Columns whose magnitudes can be normalized to one by the quasi-homogeneous scaling
// generated by the face's facet normals.
inline std::vector<int> normalizable_coordinates(const std::vector<RationalVector>& normals, int d)
{
    std::vector<int> chosen;
    std::vector<RationalVector> columns;
    for (int j = 0; j < d; ++j) {
        RationalVector col;
        for (const auto& n : normals) col.push_back(n[j]);
        auto trial = columns;
        trial.push_back(col);
        if (rank(trial) > static_cast<int>(columns.size())) {
            columns = std::move(trial);
            chosen.push_back(j);
        }
    }
    return chosen;
}

inline std::optional<DegeneracyWitness> scan_face(const Phase& mixed, const std::vector<MultiIndex>& face,
                                                  const std::vector<int>& fixed, double& h)
{
    const int d = mixed.dim();
    std::vector<int> free_axes;
    for (int j = 0; j < d; ++j)
        if (std::find(fixed.begin(), fixed.end(), j) == fixed.end()) free_axes.push_back(j);

    auto grid_size = [&](double spacing) {
        const std::size_t k = static_cast<std::size_t>(std::floor(1.0 / spacing + 1e-9));
        double n = std::pow(2.0 * k, free_axes.size()) * std::pow(2.0, fixed.size());
        return n;
    };
    while (grid_size(h) > static_cast<double>(max_face_grid_points)) h *= 2.0;

    const int k = static_cast<int>(std::floor(1.0 / h + 1e-9));
    std::vector<double> axis_values;
    for (int i = k; i >= 1; --i) axis_values.push_back(-i * h);
    for (int i = 1; i <= k; ++i) axis_values.push_back(i * h);
    const int na = static_cast<int>(axis_values.size());

    // Mixed radix: free axes take na values, fixed axes take {-1, +1}.
    std::vector<int> radix(d);
    for (int j = 0; j < d; ++j) radix[j] = std::find(fixed.begin(), fixed.end(), j) != fixed.end() ? 2 : na;
    std::size_t total = 1;
    for (int r : radix) total *= static_cast<std::size_t>(r);

    auto coordinate = [&](int axis, int idx) {
        return radix[axis] == 2 ? (idx == 0 ? -1.0 : 1.0) : axis_values[idx];
    };

    std::vector<double> values(total);
    std::vector<double> x(d);
    std::vector<int> idx(d, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (int j = 0; j < d; ++j) x[j] = coordinate(j, idx[j]);
        values[flat] = mixed.eval(x);
        if (std::abs(values[flat]) < zero_threshold) return DegeneracyWitness{x, face, values[flat]};
        for (int j = d - 1; j >= 0; --j) {
            if (++idx[j] < radix[j]) break;
            idx[j] = 0;
        }
    }

    std::vector<std::size_t> stride(d, 1);
    for (int j = d - 2; j >= 0; --j) stride[j] = stride[j + 1] * radix[j + 1];

    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (int axis : free_axes) {
            const int i = idx[axis];
            // Neighbours on the same side of the coordinate hyperplane only.
            if (i + 1 >= na || i + 1 == k) continue;
            const std::size_t next = flat + stride[axis];
            if (sign_of(values[flat]) * sign_of(values[next]) >= 0) continue;

            for (int j = 0; j < d; ++j) x[j] = coordinate(j, idx[j]);
            double lo = axis_values[i], hi = axis_values[i + 1];
            double f_lo = values[flat];
            double best_x = lo, best_v = f_lo;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                x[axis] = mid;
                const double fm = mixed.eval(x);
                if (std::abs(fm) < std::abs(best_v)) {
                    best_v = fm;
                    best_x = mid;
                }
                if (std::abs(fm) < zero_threshold || mid == lo || mid == hi) break;
                if (sign_of(fm) == sign_of(f_lo)) {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            x[axis] = best_x;
            return DegeneracyWitness{x, face, best_v};
        }
        for (int j = d - 1; j >= 0; --j) {
            if (++idx[j] < radix[j]) break;
            idx[j] = 0;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Numeric test that D_d S_F has no zero off the coordinate hyperplanes for every
/// compact face F. Each face polynomial is quasi-homogeneous, so magnitudes of as many
/// coordinates as the rank of its facet normals are pinned to one; the remaining
/// coordinates run over {+-h, +-2h, ..., +-1}. Zeros and sign changes along grid edges
/// (refined by bisection) produce a witness.
inline NondegeneracyVerdict check_nondegenerate(const Phase& phase, double grid_h = default_grid_h)
{
    if (!(grid_h > 0.0 && grid_h <= 0.1)) throw input_error("grid_h must lie in (0, 0.1]");
    const auto poly = NewtonPolyhedron::of(phase);
    const int d = phase.dim();

    NondegeneracyVerdict verdict;
    verdict.resolution = grid_h;
    for (const auto& face : poly.compact_faces()) {
        std::set<MultiIndex> indices;
        std::vector<MultiIndex> face_indices;
        for (auto v : face.vertices) {
            indices.insert(poly.vertices()[v]);
            face_indices.push_back(poly.vertices()[v]);
        }
        // Terms of the phase lying on the face but not vertices of it.
        std::vector<std::size_t> tight;
        for (std::size_t f = 0; f < poly.facets().size(); ++f) {
            bool all = std::all_of(face.vertices.begin(), face.vertices.end(), [&](auto v) {
                return poly.facets()[f].tight_at(to_rational(poly.vertices()[v]));
            });
            if (all) tight.push_back(f);
        }
        for (const auto& alpha : phase.support()) {
            auto ra = to_rational(alpha);
            if (std::all_of(tight.begin(), tight.end(), [&](auto f) { return poly.facets()[f].tight_at(ra); }))
                indices.insert(alpha);
        }

        const Phase mixed = mixed_derivative(face_restriction(phase, indices));
        if (mixed.empty()) {
            verdict.nondegenerate = false;
            verdict.witness = DegeneracyWitness{std::vector<double>(d, 1.0), face_indices, 0.0};
            return verdict;
        }
        if (mixed.size() == 1) continue; // a monomial never vanishes off the hyperplanes

        std::vector<RationalVector> normals;
        for (auto f : tight) normals.push_back(poly.facets()[f].normal);
        double h = grid_h;
        auto w = detail::scan_face(mixed, face_indices, detail::normalizable_coordinates(normals, d), h);
        verdict.resolution = std::max(verdict.resolution, h);
        if (w) {
            verdict.nondegenerate = false;
            verdict.witness = std::move(w);
            return verdict;
        }
    }
    return verdict;
}

enum class GrowthKind { upper, lower };

struct GrowthReport {
    GrowthKind kind = GrowthKind::upper;
    std::vector<std::vector<double>> scales;
    std::vector<double> constants;
    double uniformity_ratio = 1.0; // max / min over boxes
    double infimum = 0.0;          // min over boxes
};

/// Diagonal dyadic scales (2^-from, ..., 2^-to) in dimension d.
inline std::vector<std::vector<double>> dyadic_scales(int d, int from, int to)
{
    std::vector<std::vector<double>> out;
    for (int m = from; m <= to; ++m) out.emplace_back(static_cast<std::size_t>(d), std::ldexp(1.0, -m));
    return out;
}

namespace detail {

inline void validate_scales(const std::vector<std::vector<double>>& scales, int d)
{
    if (scales.empty()) throw input_error("no scales given");
    for (const auto& eps : scales) {
        if (static_cast<int>(eps.size()) != d) throw input_error("scale vector has the wrong dimension");
        for (double e : eps)
            if (!(e > 0.0 && e <= 0.5)) throw input_error("scales must lie in (0, 1/2]");
    }
}

// Calls f on the 5^d grid of the box prod [eps_j, 4 eps_j].
template <typename F>
void for_each_box_sample(const std::vector<double>& eps, F&& f)
{
    constexpr int per_axis = 5;
    const int d = static_cast<int>(eps.size());
    std::vector<int> idx(d, 0);
    std::vector<double> x(d);
    for (;;) {
        for (int j = 0; j < d; ++j) x[j] = eps[j] * (1.0 + 3.0 * idx[j] / (per_axis - 1));
        f(x);
        int j = d - 1;
        while (j >= 0 && ++idx[j] == per_axis) idx[j--] = 0;
        if (j < 0) break;
    }
}

inline double monomial_abs(const std::vector<double>& x, const MultiIndex& alpha, const MultiIndex& shift)
{
    double m = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) m *= std::pow(std::abs(x[j]), alpha[j] - shift[j]);
    return m;
}

inline void summarize(GrowthReport& r)
{
    auto [lo, hi] = std::minmax_element(r.constants.begin(), r.constants.end());
    r.infimum = *lo;
    r.uniformity_ratio = *lo > 0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Smallest C with |d^beta S(x)| <= C max_vertices |x^(alpha - beta)| on the samples of
/// each box prod [eps_j, 4 eps_j].
inline GrowthReport check_upper_growth(const Phase& phase, const MultiIndex& beta,
                                       const std::vector<std::vector<double>>& scales)
{
    detail::validate_scales(scales, phase.dim());
    const auto poly = NewtonPolyhedron::of(phase);
    const Phase deriv = partial_derivative(phase, beta);

    GrowthReport r{GrowthKind::upper, scales, {}, 1.0, 0.0};
    for (const auto& eps : scales) {
        double c = 0.0;
        detail::for_each_box_sample(eps, [&](const std::vector<double>& x) {
            double bound = 0.0;
            for (const auto& alpha : poly.vertices()) bound = std::max(bound, detail::monomial_abs(x, alpha, beta));
            c = std::max(c, std::abs(deriv.eval(x)) / bound);
        });
        r.constants.push_back(c);
    }
    detail::summarize(r);
    return r;
}

/// c(eps) = min over box samples of |D_d S| divided by max over vertices of eps^(alpha - 1).
inline GrowthReport check_lower_growth(const Phase& phase, const std::vector<std::vector<double>>& scales,
                                       const std::optional<NondegeneracyVerdict>& verdict = std::nullopt)
{
    detail::validate_scales(scales, phase.dim());
    const auto v = verdict ? *verdict : check_nondegenerate(phase);
    if (!v.nondegenerate) throw degenerate_phase_error(*v.witness);

    const auto poly = NewtonPolyhedron::of(phase);
    const Phase mixed = mixed_derivative(phase);
    const MultiIndex one = ones(phase.dim());

    GrowthReport r{GrowthKind::lower, scales, {}, 1.0, 0.0};
    for (const auto& eps : scales) {
        double low = std::numeric_limits<double>::infinity();
        detail::for_each_box_sample(eps, [&](const std::vector<double>& x) { low = std::min(low, std::abs(mixed.eval(x))); });
        double scale = 0.0;
        for (const auto& alpha : poly.vertices()) scale = std::max(scale, detail::monomial_abs(eps, alpha, one));
        r.constants.push_back(low / scale);
    }
    detail::summarize(r);
    return r;
}

inline nlohmann::json to_json(const NondegeneracyVerdict& v)
{
    nlohmann::json j{{"status", v.nondegenerate ? "nondegenerate (numeric)" : "degenerate"},
                     {"resolution", v.resolution}};
    if (v.witness) {
        j["witness"] = {{"point", v.witness->point}, {"face", v.witness->face}, {"value", v.witness->value}};
    }
    return j;
}

inline nlohmann::json to_json(const GrowthReport& r)
{
    return {{"kind", r.kind == GrowthKind::upper ? "upper" : "lower"},
            {"scales", r.scales},
            {"constants", r.constants},
            {"uniformity_ratio", r.uniformity_ratio},
            {"infimum", r.infimum}};
}

} // namespace newton_osc
