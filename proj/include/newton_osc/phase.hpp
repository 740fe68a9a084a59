#pragma once

#include "rational.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace newton_osc {

inline constexpr int max_dimension = 6;

/// Exponent vector of a monomial x^alpha.
using MultiIndex = std::vector<int>;

inline MultiIndex ones(int d) { return MultiIndex(static_cast<std::size_t>(d), 1); }

inline std::string to_string(const MultiIndex& a)
{
    std::string s = "(";
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
    return s + ")";
}

/// Sparse real polynomial in d variables, sum of c_alpha x^alpha.
///
/// Terms are kept sorted lexicographically by multi-index and never hold a zero
/// coefficient. Construction through add_term enforces both.
class Phase {
public:
    using TermMap = std::map<MultiIndex, double>;

    explicit Phase(int dim) : dim_(dim)
    {
        if (dim < 2 || dim > max_dimension)
            throw input_error("phase dimension must be in [2, " + std::to_string(max_dimension) + "], got " +
                              std::to_string(dim));
    }

    /// Builds a phase from (alpha, coeff) pairs; duplicate multi-indices are rejected.
    static Phase from_terms(int dim, const std::vector<std::pair<MultiIndex, double>>& terms)
    {
        Phase p(dim);
        for (const auto& [alpha, c] : terms) {
            p.check_index(alpha);
            if (p.terms_.count(alpha)) throw input_error("duplicate multi-index " + to_string(alpha));
            if (c != 0.0) p.terms_.emplace(alpha, c);
        }
        return p;
    }

    static Phase monomial(const MultiIndex& alpha, double c = 1.0)
    {
        return from_terms(static_cast<int>(alpha.size()), {{alpha, c}});
    }

    int dim() const noexcept { return dim_; }
    const TermMap& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    std::vector<MultiIndex> support() const
    {
        std::vector<MultiIndex> out;
        out.reserve(terms_.size());
        for (const auto& [alpha, c] : terms_) out.push_back(alpha);
        return out;
    }

    /// Accumulates c x^alpha, dropping the term if the coefficient cancels.
    void add_term(const MultiIndex& alpha, double c)
    {
        check_index(alpha);
        auto it = terms_.find(alpha);
        if (it == terms_.end()) {
            if (c != 0.0) terms_.emplace(alpha, c);
            return;
        }
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }

    double coefficient(const MultiIndex& alpha) const
    {
        auto it = terms_.find(alpha);
        return it == terms_.end() ? 0.0 : it->second;
    }

    double operator()(std::span<const double> x) const { return eval(x); }

    double eval(std::span<const double> x) const
    {
        if (static_cast<int>(x.size()) != dim_)
            throw input_error("point has dimension " + std::to_string(x.size()) + ", phase has " +
                              std::to_string(dim_));
        double s = 0.0;
        for (const auto& [alpha, c] : terms_) {
            double m = c;
            for (int j = 0; j < dim_; ++j)
                if (alpha[j]) m *= ipow(x[j], alpha[j]);
            s += m;
        }
        return s;
    }

    /// True iff every exponent of every term is at least one.
    bool vanishes_on_coordinate_hyperplanes() const
    {
        for (const auto& [alpha, c] : terms_)
            if (std::any_of(alpha.begin(), alpha.end(), [](int a) { return a < 1; })) return false;
        return true;
    }

    friend bool operator==(const Phase& a, const Phase& b) { return a.dim_ == b.dim_ && a.terms_ == b.terms_; }

    Phase& operator+=(const Phase& o)
    {
        if (o.dim_ != dim_) throw input_error("dimension mismatch in phase sum");
        for (const auto& [alpha, c] : o.terms_) add_term(alpha, c);
        return *this;
    }

    Phase& operator*=(double s)
    {
        if (s == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [alpha, c] : terms_) c *= s;
        return *this;
    }

    friend Phase operator+(Phase a, const Phase& b) { return a += b; }
    friend Phase operator*(double s, Phase a) { return a *= s; }

    static double ipow(double x, int n)
    {
        double r = 1.0;
        while (n > 0) {
            if (n & 1) r *= x;
            x *= x;
            n >>= 1;
        }
        return r;
    }

private:
    void check_index(const MultiIndex& alpha) const
    {
        if (static_cast<int>(alpha.size()) != dim_)
            throw input_error("multi-index " + to_string(alpha) + " does not have dimension " + std::to_string(dim_));
        for (int a : alpha)
            if (a < 0) throw input_error("negative exponent in multi-index " + to_string(alpha));
    }

    int dim_;
    TermMap terms_;
};

/// d^beta S, exact on coefficients. Terms whose exponent would drop below zero vanish.
inline Phase partial_derivative(const Phase& s, const MultiIndex& beta)
{
    if (static_cast<int>(beta.size()) != s.dim())
        throw input_error("derivative order " + to_string(beta) + " does not match phase dimension");
    Phase out(s.dim());
    for (const auto& [alpha, c] : s.terms()) {
        double coeff = c;
        MultiIndex lowered = alpha;
        bool zero = false;
        for (int j = 0; j < s.dim() && !zero; ++j) {
            if (beta[j] < 0) throw input_error("negative derivative order");
            if (beta[j] > alpha[j]) {
                zero = true;
                break;
            }
            for (int k = 0; k < beta[j]; ++k) coeff *= alpha[j] - k;
            lowered[j] -= beta[j];
        }
        if (!zero) out.add_term(lowered, coeff);
    }
    return out;
}

/// The mixed derivative d_1 d_2 ... d_d.
inline Phase mixed_derivative(const Phase& s) { return partial_derivative(s, ones(s.dim())); }

/// The sub-polynomial keeping only the listed multi-indices.
inline Phase face_restriction(const Phase& s, const std::set<MultiIndex>& face)
{
    Phase out(s.dim());
    for (const auto& alpha : face) {
        auto it = s.terms().find(alpha);
        if (it == s.terms().end()) throw input_error("multi-index " + to_string(alpha) + " is not a term of the phase");
        out.add_term(alpha, it->second);
    }
    return out;
}

/// Sum of |c_alpha| * |d_j x^alpha| at the box corner b, which bounds sup |d_j S| on
/// the box [0, b] when all exponents are nonnegative.
inline double partial_bound_on_box(const Phase& s, int axis, std::span<const double> corner)
{
    double bound = 0.0;
    for (const auto& [alpha, c] : s.terms()) {
        if (alpha[axis] == 0) continue;
        double m = std::abs(c) * alpha[axis];
        for (int j = 0; j < s.dim(); ++j) {
            int e = alpha[j] - (j == axis ? 1 : 0);
            m *= Phase::ipow(std::abs(corner[j]), e);
        }
        bound += m;
    }
    return bound;
}

inline nlohmann::json to_json(const Phase& s)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [alpha, c] : s.terms()) terms.push_back({{"alpha", alpha}, {"coeff", c}});
    return {{"dim", s.dim()}, {"terms", terms}};
}

/// Parses the interchange form {"dim": d, "terms": [{"alpha": [...], "coeff": c}, ...]}.
inline Phase phase_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw input_error("phase: expected a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer()) throw input_error("phase.dim: expected an integer");
    if (!j.contains("terms") || !j["terms"].is_array()) throw input_error("phase.terms: expected an array");
    const int dim = j["dim"].get<int>();
    Phase p(dim);
    std::set<MultiIndex> seen;
    std::size_t i = 0;
    for (const auto& t : j["terms"]) {
        const std::string where = "phase.terms[" + std::to_string(i++) + "]";
        if (!t.is_object() || !t.contains("alpha") || !t["alpha"].is_array())
            throw input_error(where + ".alpha: expected an integer array");
        if (!t.contains("coeff") || !t["coeff"].is_number()) throw input_error(where + ".coeff: expected a number");
        MultiIndex alpha;
        for (const auto& a : t["alpha"]) {
            if (!a.is_number_integer()) throw input_error(where + ".alpha: expected integers");
            alpha.push_back(a.get<int>());
        }
        if (static_cast<int>(alpha.size()) != dim)
            throw input_error(where + ".alpha: length " + std::to_string(alpha.size()) + " != dim " +
                              std::to_string(dim));
        if (!seen.insert(alpha).second) throw input_error(where + ".alpha: duplicate multi-index " + to_string(alpha));
        double c = t["coeff"].get<double>();
        if (c == 0.0) throw input_error(where + ".coeff: zero coefficients are not stored");
        p.add_term(alpha, c);
    }
    return p;
}

} // namespace newton_osc
