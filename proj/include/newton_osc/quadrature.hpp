#pragma once

#include "exponents.hpp"
#include "parallel.hpp"
#include "phase.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace newton_osc {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Roots of P_n by Newton iteration from the Chebyshev-like initial guesses.
inline GaussLegendre gauss_legendre(int n)
{
    if (n < 1) throw input_error("Gauss-Legendre order must be positive");
    GaussLegendre rule{std::vector<double>(n), std::vector<double>(n)};
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = 0.5 * (1.0 - z);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

/// One-dimensional cutoff profile on [0, 1]: equal to one on [0, 1/2], then the
/// quintic smoothstep down to zero at 1. C^2, so psi(x) = prod B(x_j) has two bounded
/// derivatives, and psi = 1 near the origin.
inline double cutoff_profile(double t)
{
    if (t <= 0.5) return t >= 0.0 ? 1.0 : 0.0;
    if (t >= 1.0) return 0.0;
    const double s = 2.0 * t - 1.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

inline constexpr double cutoff_profile_integral = 0.75;

/// One separable factor of a test function in a single coordinate.
struct AxisFactor {
    enum class Kind { one, indicator, power };
    Kind kind = Kind::one;
    double width = 1.0;    // indicator: 1[0, width]
    double exponent = 0.0; // power: x^exponent, exponent > -1

    static AxisFactor unit() { return {}; }
    static AxisFactor box(double w) { return {Kind::indicator, w, 0.0}; }
    static AxisFactor pow(double a) { return {Kind::power, 1.0, a}; }
};

/// f_j(x^_j) = prod_{k != j} factors[k](x_k); factors[j] is ignored.
struct TestFunction {
    std::vector<AxisFactor> factors;
};

inline std::vector<TestFunction> constant_test_functions(int d)
{
    return std::vector<TestFunction>(d, TestFunction{std::vector<AxisFactor>(d)});
}

/// f_j = prod_{k != j} 1[0, widths_k](x_k).
inline std::vector<TestFunction> box_test_functions(const std::vector<double>& widths)
{
    const int d = static_cast<int>(widths.size());
    std::vector<TestFunction> fs;
    for (int j = 0; j < d; ++j) {
        TestFunction f{std::vector<AxisFactor>(d)};
        for (int k = 0; k < d; ++k)
            if (k != j) f.factors[k] = AxisFactor::box(widths[k]);
        fs.push_back(std::move(f));
    }
    return fs;
}

/// Widths lambda^-n_k for a supporting normal n.
inline std::vector<double> sharpness_widths(const std::vector<double>& normal, double lambda)
{
    std::vector<double> w;
    for (double n : normal) w.push_back(std::pow(lambda, -n));
    return w;
}

/// Test functions for the off-diagonal extremal example with phase mu x_1...x_d:
/// f_j = 1[0,w](x_{d-1}) 1[0,w](x_d) for j <= d-2, f_{d-1} = 1[0,w](x_d), f_d = 1[0,w](x_{d-1}),
/// with w = |lambda mu|^(-1/2).
inline std::vector<TestFunction> off_diagonal_test_functions(int d, double lambda_mu)
{
    const double w = std::pow(lambda_mu, -0.5);
    std::vector<TestFunction> fs(d, TestFunction{std::vector<AxisFactor>(d)});
    for (int j = 0; j < d - 2; ++j) {
        fs[j].factors[d - 2] = AxisFactor::box(w);
        fs[j].factors[d - 1] = AxisFactor::box(w);
    }
    fs[d - 2].factors[d - 1] = AxisFactor::box(w);
    fs[d - 1].factors[d - 2] = AxisFactor::box(w);
    return fs;
}

/// ||f_j||_{L^p([0,1]^(d-1))} in closed form (finite p: product of 1-d norms).
inline double lp_norm(const TestFunction& f, int j, const std::optional<Rational>& p)
{
    double norm = 1.0;
    const double pd = p ? to_double(*p) : 0.0;
    for (int k = 0; k < static_cast<int>(f.factors.size()); ++k) {
        if (k == j) continue;
        const auto& g = f.factors[k];
        const double w = g.kind == AxisFactor::Kind::indicator ? std::min(1.0, g.width) : 1.0;
        const double a = g.kind == AxisFactor::Kind::power ? g.exponent : 0.0;
        if (!p) {
            if (a < 0) return std::numeric_limits<double>::infinity();
            norm *= std::pow(w, a);
            continue;
        }
        if (a * pd <= -1.0) return std::numeric_limits<double>::infinity();
        norm *= std::pow(std::pow(w, a * pd + 1.0) / (a * pd + 1.0), 1.0 / pd);
    }
    return norm;
}

inline double norm_product(const std::vector<TestFunction>& fs, const ExponentTuple& p)
{
    double prod = 1.0;
    for (int j = 0; j < static_cast<int>(fs.size()); ++j) prod *= lp_norm(fs[j], j, p.value(j));
    return prod;
}

struct QuadratureSpec {
    double lambda = 1.0;
    int panels_per_axis = 2;
    int nodes_per_panel = 4;
    int oversample = 4;
};

struct LambdaFormResult {
    std::complex<double> value;  // at 2 x panels_per_axis
    std::complex<double> coarse; // at panels_per_axis
    double relative_change = 0.0;
    bool converged = false;
    QuadratureSpec spec;
};

namespace detail {

// Combined weight on one axis: cutoff times every factor of the f_j with j != k,
// after the substitution x = b u^m that smooths power singularities at the origin.
struct AxisWeight {
    double upper = 1.0;    // b
    double exponent = 0.0; // total power
    int substitution = 1;  // m

    double x_of(double u) const { return upper * std::pow(u, substitution); }
    double weight(double u) const
    {
        const double x = x_of(u);
        double w = cutoff_profile(x) * upper * substitution * std::pow(u, substitution - 1);
        if (exponent != 0.0) w *= std::pow(x, exponent);
        return w;
    }
};

inline std::vector<AxisWeight> axis_weights(const std::vector<TestFunction>& fs, int d)
{
    if (static_cast<int>(fs.size()) != d) throw input_error("need one test function per coordinate");
    std::vector<AxisWeight> axes(d);
    for (int k = 0; k < d; ++k) {
        for (int j = 0; j < d; ++j) {
            if (j == k) continue;
            if (static_cast<int>(fs[j].factors.size()) != d) throw input_error("test function has the wrong dimension");
            const auto& g = fs[j].factors[k];
            if (g.kind == AxisFactor::Kind::indicator) {
                if (!(g.width > 0)) throw input_error("indicator width must be positive");
                axes[k].upper = std::min(axes[k].upper, g.width);
            } else if (g.kind == AxisFactor::Kind::power) {
                axes[k].exponent += g.exponent;
            }
        }
        const double a = axes[k].exponent;
        if (a <= -1.0) throw input_error("power weights must be integrable (total exponent > -1)");
        const bool smooth = a >= 0 && a == std::floor(a);
        axes[k].substitution = smooth ? 1 : static_cast<int>(std::ceil(3.0 / (a + 1.0)));
    }
    return axes;
}

struct AxisRule {
    std::vector<double> x;
    std::vector<double> w;
};

inline AxisRule axis_rule(const AxisWeight& a, int panels, const GaussLegendre& gl)
{
    // Uniform panels in u, except that one panel edge sits where x = 1/2: the cutoff is
    // only C^2 there and Gauss-Legendre loses its order across the seam.
    std::vector<double> edges{0.0};
    if (a.upper > 0.5) {
        const double seam = std::pow(0.5 / a.upper, 1.0 / a.substitution);
        const int left = std::clamp(static_cast<int>(std::lround(panels * seam)), 1, std::max(1, panels - 1));
        const int right = std::max(1, panels - left);
        for (int p = 1; p <= left; ++p) edges.push_back(seam * p / left);
        for (int p = 1; p <= right; ++p) edges.push_back(seam + (1.0 - seam) * p / right);
    } else {
        for (int p = 1; p <= panels; ++p) edges.push_back(static_cast<double>(p) / panels);
    }
    AxisRule r;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double lo = edges[p], len = edges[p + 1] - edges[p];
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double u = lo + len * gl.nodes[i];
            const double w = a.weight(u) * gl.weights[i] * len;
            if (w == 0.0) continue;
            r.x.push_back(a.x_of(u));
            r.w.push_back(w);
        }
    }
    return r;
}

// sup_k sup |d_k S| scaled to the unit parameter box.
inline std::vector<double> axis_lipschitz(const Phase& s, const std::vector<AxisWeight>& axes)
{
    std::vector<double> corner;
    for (const auto& a : axes) corner.push_back(a.upper);
    std::vector<double> lip;
    for (int k = 0; k < s.dim(); ++k)
        lip.push_back(partial_bound_on_box(s, k, corner) * axes[k].upper * axes[k].substitution);
    return lip;
}

inline int panels_for(double lambda, double lip, int oversample)
{
    int p = static_cast<int>(std::ceil(lambda * lip / (2.0 * std::numbers::pi))) * oversample;
    p = std::max(p, 2);
    return p + (p & 1);
}

// Tensor-product rule for a general polynomial phase.
inline std::complex<double> tensor_sum(const Phase& s, double lambda, const std::vector<AxisRule>& rules)
{
    const int d = s.dim();
    // Per-term, per-axis power tables so that S is a sum of products of table entries.
    struct Term {
        double c;
        std::vector<std::vector<double>> pw;
    };
    std::vector<Term> terms;
    for (const auto& [alpha, c] : s.terms()) {
        Term t{c, std::vector<std::vector<double>>(d)};
        for (int k = 0; k < d; ++k)
            for (double x : rules[k].x) t.pw[k].push_back(Phase::ipow(x, alpha[k]));
        terms.push_back(std::move(t));
    }

    auto slice = [&](std::size_t i0) {
        std::complex<double> acc = 0.0;
        std::vector<std::size_t> idx(d, 0);
        idx[0] = i0;
        std::vector<double> partial(terms.size());
        const std::size_t inner = rules[d - 1].x.size();
        for (;;) {
            double wprod = rules[0].w[i0];
            for (int k = 1; k < d - 1; ++k) wprod *= rules[k].w[idx[k]];
            for (std::size_t t = 0; t < terms.size(); ++t) {
                double m = terms[t].c;
                for (int k = 0; k < d - 1; ++k) m *= terms[t].pw[k][idx[k]];
                partial[t] = m;
            }
            std::complex<double> line = 0.0;
            for (std::size_t i = 0; i < inner; ++i) {
                double phase = 0.0;
                for (std::size_t t = 0; t < terms.size(); ++t) phase += partial[t] * terms[t].pw[d - 1][i];
                const double arg = lambda * phase;
                line += rules[d - 1].w[i] * std::complex<double>(std::cos(arg), std::sin(arg));
            }
            acc += wprod * line;
            int k = d - 2;
            while (k >= 1 && ++idx[k] == rules[k].x.size()) idx[k--] = 0;
            if (k < 1) break;
        }
        return acc;
    };

    const auto parts = ordered_map<std::complex<double>>(rules[0].x.size(), slice);
    std::complex<double> total = 0.0;
    for (const auto& p : parts) total += p;
    return total;
}

// Monomial phase c x^alpha, integrated as nested 1-d rules: at fixed outer coordinates
// the phase is omega x_k^alpha_k times the inner factors, so axis k gets a panel count
// matched to its local frequency omega instead of the global worst case.
inline std::complex<double> monomial_sum(const Phase& s, double lambda, const std::vector<AxisWeight>& axes,
                                         int base_panels, int oversample, int refine, const GaussLegendre& gl)
{
    const int d = s.dim();
    const auto& [alpha, c] = *s.terms().begin();

    // scale[k] bounds d/du_k of x_k^alpha_k prod_{i>k} x_i^alpha_i on the parameter box.
    std::vector<double> scale(d);
    double tail = 1.0;
    for (int k = d - 1; k >= 0; --k) {
        scale[k] = alpha[k] * Phase::ipow(axes[k].upper, alpha[k]) * axes[k].substitution * tail;
        tail *= Phase::ipow(axes[k].upper, alpha[k]);
    }

    struct Powered {
        std::vector<double> xa; // x^alpha_k
        std::vector<double> w;
    };
    using Cache = std::vector<std::map<int, Powered>>;
    auto rule = [&](Cache& cache, int k, int panels) -> const Powered& {
        auto it = cache[k].find(panels);
        if (it != cache[k].end()) return it->second;
        AxisRule r = axis_rule(axes[k], panels, gl);
        for (double& x : r.x) x = Phase::ipow(x, alpha[k]);
        return cache[k].emplace(panels, Powered{std::move(r.x), std::move(r.w)}).first->second;
    };

    std::function<std::complex<double>(Cache&, int, double)> nested = [&](Cache& cache, int k, double omega) {
        const int panels = panels_for(std::abs(omega), scale[k], oversample) * refine;
        const Powered& r = rule(cache, k, panels);
        std::complex<double> acc = 0.0;
        if (k == d - 1) {
            for (std::size_t i = 0; i < r.xa.size(); ++i) {
                const double arg = omega * r.xa[i];
                acc += r.w[i] * std::complex<double>(std::cos(arg), std::sin(arg));
            }
        } else {
            for (std::size_t i = 0; i < r.xa.size(); ++i) acc += r.w[i] * nested(cache, k + 1, omega * r.xa[i]);
        }
        return acc;
    };

    Cache top(d);
    const Powered& outer = rule(top, 0, base_panels * refine);
    auto slice = [&](std::size_t i) {
        Cache cache(d);
        return outer.w[i] * nested(cache, 1, lambda * c * outer.xa[i]);
    };
    const auto parts = ordered_map<std::complex<double>>(outer.xa.size(), slice);
    std::complex<double> total = 0.0;
    for (const auto& p : parts) total += p;
    return total;
}

} // namespace detail

/// Panel count meeting panels >= ceil(lambda Lip / 2 pi) * oversample, Lip taken over
/// the effective support of the integrand.
inline QuadratureSpec auto_quadrature_spec(const Phase& s, double lambda, const std::vector<TestFunction>& fs,
                                           int nodes_per_panel = 4, int oversample = 4)
{
    const auto axes = detail::axis_weights(fs, s.dim());
    const auto lip = detail::axis_lipschitz(s, axes);
    QuadratureSpec spec{lambda, 2, nodes_per_panel, oversample};
    for (int k = 0; k < s.dim(); ++k)
        spec.panels_per_axis = std::max(spec.panels_per_axis, detail::panels_for(lambda, lip[k], oversample));
    return spec;
}

/// Lambda_d(f_1..f_d) = int e^(i lambda S) psi prod f_j(x^_j) dx over [0,1]^d with the
/// fixed cutoff psi(x) = prod cutoff_profile(x_j). Evaluated at panels and 2 x panels;
/// converged iff the two agree to 1%.
inline LambdaFormResult eval_lambda_form(const Phase& s, const std::vector<TestFunction>& fs, const QuadratureSpec& spec)
{
    const int d = s.dim();
    const bool monomial = s.size() == 1;
    if (d > 4 || (d == 4 && !monomial))
        throw input_error("quadrature supports d <= 3, or d = 4 for a single monomial phase");
    if (spec.panels_per_axis < 2 || spec.nodes_per_panel < 1) throw input_error("invalid quadrature spec");
    if (s.empty()) throw input_error("empty phase");

    const auto axes = detail::axis_weights(fs, d);
    const auto gl = gauss_legendre(spec.nodes_per_panel);

    auto run = [&](int refine) {
        const int panels = spec.panels_per_axis * refine;
        if (monomial)
            return detail::monomial_sum(s, spec.lambda, axes, spec.panels_per_axis, spec.oversample, refine, gl);
        std::vector<detail::AxisRule> rules;
        for (int k = 0; k < d; ++k) rules.push_back(detail::axis_rule(axes[k], panels, gl));
        return detail::tensor_sum(s, spec.lambda, rules);
    };

    LambdaFormResult r;
    r.spec = spec;
    r.coarse = run(1);
    r.value = run(2);
    const double scale = std::abs(r.value);
    r.relative_change = scale > 0 ? std::abs(r.value - r.coarse) / scale : std::abs(r.value - r.coarse);
    r.converged = r.relative_change <= 0.01;
    return r;
}

/// int psi over [0,1]^d for the fixed cutoff.
inline double cutoff_integral(int d) { return std::pow(cutoff_profile_integral, d); }

} // namespace newton_osc
