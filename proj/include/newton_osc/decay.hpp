#pragma once

#include "exponents.hpp"
#include "newton.hpp"
#include "nondeg.hpp"
#include "phase.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace newton_osc {

/// The on-diagonal threshold p(d) = (d - 1) 2^(d-1) / (2^(d-1) - 1).
inline Rational on_diagonal_threshold(int d)
{
    if (d < 3) throw input_error("on-diagonal threshold needs d >= 3");
    const Rational g = pow2(d - 1);
    return Rational(d - 1) * g / (g - 1);
}

/// (2^(d-1), 2^(d-1), 2^(d-2), ..., 4, 2); its reciprocals sum to one.
inline ExponentTuple off_diagonal_tuple(int d)
{
    if (d < 3) throw input_error("off-diagonal tuple needs d >= 3");
    std::vector<std::optional<Rational>> p;
    p.emplace_back(pow2(d - 1));
    for (int j = 2; j <= d; ++j) p.emplace_back(pow2(d + 1 - j));
    return ExponentTuple::from_values(p);
}

/// Largest j-th threshold of the off-diagonal hypothesis: p_1, p_2 >= 2^(d-1), p_j >= 2^(d+1-j).
inline Rational off_diagonal_bound(int d, int j /* 1-based */)
{
    return j <= 2 ? pow2(d - 1) : pow2(d + 1 - j);
}

struct HypothesisCheck {
    bool off_diagonal = false;
    bool on_diagonal = false;
    bool direction_positive = false;
    std::vector<std::string> diagnostics;

    bool any() const { return off_diagonal || on_diagonal; }
    std::string verdict() const
    {
        if (off_diagonal && on_diagonal) return "off-diagonal-ok,on-diagonal-ok";
        if (off_diagonal) return "off-diagonal-ok";
        if (on_diagonal) return "on-diagonal-ok";
        return "neither";
    }
};

/// Never throws: reports which of the two exponent hypotheses hold, and why not.
inline HypothesisCheck validate_hypotheses(const ExponentTuple& p)
{
    HypothesisCheck c;
    const int d = p.dim();
    if (d < 3) {
        c.diagnostics.push_back("dimension " + std::to_string(d) + " < 3: neither hypothesis applies");
        c.direction_positive = p.direction_positive();
        return c;
    }
    // p_j >= b  <=>  1/p_j <= 1/b, with 1/inf = 0.
    c.off_diagonal = true;
    for (int j = 1; j <= d; ++j) {
        const Rational bound = off_diagonal_bound(d, j);
        if (p.reciprocals()[j - 1] > 1 / bound) {
            c.off_diagonal = false;
            c.diagnostics.push_back("off-diagonal: p_" + std::to_string(j) + " = " + p.value_string(j - 1) + " < " +
                                    to_string(bound));
        }
    }
    const Rational pd = on_diagonal_threshold(d);
    c.on_diagonal = true;
    for (int j = 1; j <= d; ++j) {
        if (p.reciprocals()[j - 1] > 1 / pd) {
            c.on_diagonal = false;
            c.diagnostics.push_back("on-diagonal: p_" + std::to_string(j) + " = " + p.value_string(j - 1) + " < p(d) = " +
                                    to_string(pd));
        }
    }
    c.direction_positive = p.direction_positive();
    if (!c.direction_positive) c.diagnostics.push_back("some 1 - P + 1/p_j is not positive");
    if (!c.any()) c.diagnostics.push_back("neither hypothesis holds");
    return c;
}

/// Violated exponent hypotheses; carries the diagnostics.
class invalid_exponents_error : public std::logic_error {
public:
    explicit invalid_exponents_error(HypothesisCheck c)
        : std::logic_error("exponents satisfy neither hypothesis"), check(std::move(c))
    {
    }
    HypothesisCheck check;
};

enum class Regime { above_critical, critical, below_critical };

inline std::string to_string(Regime r)
{
    switch (r) {
    case Regime::above_critical: return "above-critical";
    case Regime::critical: return "critical";
    case Regime::below_critical: return "below-critical";
    }
    return "?";
}

/// |Lambda_d| <~ lambda^-rate log^log_power(lambda) times the norm product.
struct DecayEstimate {
    Rational rate;
    int log_power = 0;
    Regime regime = Regime::below_critical;
    Rational delta;
    int k = 0; // codimension of the boundary face at delta * v
    int dim = 0;
    bool upper_bound_only = false; // all exponents infinite: sharpness is not known
};

/// gamma = 2^(d-1).
inline Rational critical_distance(int d) { return pow2(d - 1); }

/// Regime selection from delta and the face codimension k at delta * v.
///
/// Above the critical distance the log power is k - 1: a boundary point of codimension
/// k is a convex combination of d - k + 1 independent boundary vectors, and the dyadic
/// summation loses one log per coordinate left uncovered by them.
inline DecayEstimate estimate_from_distance(const Rational& delta, int k, int d)
{
    DecayEstimate e;
    e.delta = delta;
    e.k = k;
    e.dim = d;
    const Rational gamma = critical_distance(d);
    if (delta > gamma) {
        e.regime = Regime::above_critical;
        e.rate = 1 / delta;
        e.log_power = k - 1;
    } else if (delta == gamma) {
        e.regime = Regime::critical;
        e.rate = 1 / delta;
        e.log_power = d;
    } else {
        e.regime = Regime::below_critical;
        e.rate = 1 / gamma;
        e.log_power = 0;
    }
    return e;
}

/// Predicted decay of Lambda_d for a nondegenerate phase and admissible exponents.
inline DecayEstimate predict(const Phase& phase, const ExponentTuple& p,
                             const std::optional<NondegeneracyVerdict>& verdict = std::nullopt)
{
    if (p.dim() != phase.dim()) throw input_error("exponent tuple and phase have different dimensions");
    auto check = validate_hypotheses(p);
    if (!check.any() || !check.direction_positive) throw invalid_exponents_error(std::move(check));
    const auto v = verdict ? *verdict : check_nondegenerate(phase);
    if (!v.nondegenerate) throw degenerate_phase_error(*v.witness);

    const auto poly = NewtonPolyhedron::of(phase);
    const auto nd = newton_distance(poly, p.direction());
    auto e = estimate_from_distance(nd.delta, nd.point.codim, phase.dim());
    e.upper_bound_only = p.all_infinite();
    return e;
}

/// 1/q_j = theta 1/p_j + (1 - theta) 1/r_j.
inline ExponentTuple interpolate_tuples(const ExponentTuple& p, const ExponentTuple& r, const Rational& theta)
{
    if (!(theta > 0 && theta < 1)) throw input_error("interpolation weight must lie in (0, 1)");
    if (p.dim() != r.dim()) throw input_error("interpolating tuples of different dimensions");
    RationalVector inv;
    for (int j = 0; j < p.dim(); ++j) inv.push_back(theta * p.reciprocals()[j] + (1 - theta) * r.reciprocals()[j]);
    return ExponentTuple::from_reciprocals(std::move(inv));
}

/// Interpolation against the classical Loomis-Whitney tuple (d - 1, ..., d - 1).
inline ExponentTuple interpolate_tuple(const ExponentTuple& p, const Rational& theta)
{
    return interpolate_tuples(p, ExponentTuple::constant(p.dim(), Rational(p.dim() - 1)), theta);
}

struct InterpolatedDistance {
    Rational delta;
    Rational delta_interpolated;
    ExponentTuple q;
    bool check = false;
};

/// Newton distances for p and for q = interpolate_tuple(p, theta); the identity says
/// delta' = delta / theta. Only the polyhedron matters, so no nondegeneracy is required.
inline InterpolatedDistance interpolated_delta_identity(const Phase& phase, const ExponentTuple& p, const Rational& theta)
{
    if (!p.direction_positive()) throw input_error("exponent direction is not strictly positive");
    const auto poly = NewtonPolyhedron::of(phase);
    InterpolatedDistance out;
    out.q = interpolate_tuple(p, theta);
    out.delta = newton_distance(poly, p.direction()).delta;
    out.delta_interpolated = newton_distance(poly, out.q.direction()).delta;
    const Rational expected = out.delta / theta;
    const Rational rel = abs(out.delta_interpolated - expected) / expected;
    out.check = to_double(rel) < 1e-9;
    return out;
}

/// Sublevel bound M(1/eps) with M(lambda) = lambda^-rate log^log_power(2 + lambda).
struct SublevelBound {
    Rational exponent; // power of eps
    int log_power = 0;
    double submultiplicative_constant = 1.0; // A with M(l1 l2) <= A M(l1) M(l2), l1, l2 >= 2

    double M(double lambda) const
    {
        return std::pow(lambda, -to_double(exponent)) * std::pow(std::log(2.0 + lambda), log_power);
    }
    double operator()(double eps) const { return M(1.0 / eps); }
};

/// The decay M(lambda) transferred to sublevel sets. log(2 + ab) <= log(2 + a) + log(2 + b)
/// and 1/x + 1/y <= 2/log 2 for x, y >= log 2 give A = (2 / log 2)^s.
inline SublevelBound decay_to_sublevel(const DecayEstimate& est)
{
    if (est.rate <= 0) throw std::logic_error("sublevel conversion needs a positive decay rate");
    SublevelBound b;
    b.exponent = est.rate;
    b.log_power = est.log_power;
    b.submultiplicative_constant = std::pow(2.0 / std::log(2.0), est.log_power);
    return b;
}

/// Checks M(l1 l2) <= A M(l1) M(l2) on an n x n grid of lambda values in [2, lambda_max].
inline bool verify_submultiplicative(const SublevelBound& b, double lambda_max = 1e8, int n = 100)
{
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double l1 = 2.0 * std::pow(lambda_max / 2.0, static_cast<double>(i) / (n - 1));
            const double l2 = 2.0 * std::pow(lambda_max / 2.0, static_cast<double>(k) / (n - 1));
            if (b.M(l1 * l2) > b.submultiplicative_constant * b.M(l1) * b.M(l2) * (1.0 + 1e-12)) return false;
        }
    return true;
}

struct SharpnessExponents {
    Rational norm_product; // prod ||f_j||_{p_j} ~ lambda^norm_product
    Rational lambda_form;  // |Lambda_d| ~ lambda^lambda_form
    Rational ratio;        // quotient ~ lambda^ratio = lambda^(-1/delta)
    Rational delta;
    RationalVector normal;
};

/// Predicted exponents for the box test functions f_j = prod_{k != j} 1[0, lambda^-n_k](x_k),
/// where n supports the Newton polyhedron (n . alpha >= 1 on it) and is tight at delta v.
inline SharpnessExponents sharpness_prediction(const Phase& phase, const ExponentTuple& p, const RationalVector& n)
{
    const auto poly = NewtonPolyhedron::of(phase);
    if (static_cast<int>(n.size()) != phase.dim()) throw input_error("normal has the wrong dimension");
    for (const auto& x : n)
        if (x < 0) throw input_error("supporting normal must be nonnegative");
    for (const auto& v : poly.vertices())
        if (dot(n, to_rational(v)) < 1) throw input_error("normal does not support the Newton polyhedron at level 1");
    const auto nd = newton_distance(poly, p.direction());
    if (dot(n, nd.point.coords) != 1) throw input_error("normal is not tight at the Newton distance point");

    Rational one_n = 0;
    for (const auto& x : n) one_n += x;
    SharpnessExponents s;
    s.delta = nd.delta;
    s.normal = n;
    s.norm_product = 1 / nd.delta - one_n;
    s.lambda_form = -one_n;
    s.ratio = -1 / nd.delta;
    return s;
}

/// Mean of the level-one facet normals tight at delta v: a supporting normal that is
/// tight there (for x1...xd at (1,...,1) this is (1/d, ..., 1/d)).
inline RationalVector default_sharpness_normal(const Phase& phase, const ExponentTuple& p)
{
    const auto poly = NewtonPolyhedron::of(phase);
    const auto nd = newton_distance(poly, p.direction());
    RationalVector n(phase.dim(), Rational(0));
    for (auto f : nd.point.tight_facets)
        for (int j = 0; j < phase.dim(); ++j) n[j] += poly.facets()[f].normal[j];
    for (auto& x : n) x /= static_cast<int>(nd.point.tight_facets.size());
    return n;
}

inline nlohmann::json to_json(const DecayEstimate& e)
{
    nlohmann::json j{{"rate", to_string(e.rate)},
                     {"log_power", e.log_power},
                     {"regime", to_string(e.regime)},
                     {"delta", to_string(e.delta)},
                     {"k", e.k}};
    if (e.upper_bound_only) j["note"] = "upper-bound regime only";
    return j;
}

inline nlohmann::json to_json(const HypothesisCheck& c)
{
    return {{"verdict", c.verdict()},
            {"off_diagonal", c.off_diagonal},
            {"on_diagonal", c.on_diagonal},
            {"direction_positive", c.direction_positive},
            {"diagnostics", c.diagnostics}};
}

} // namespace newton_osc
