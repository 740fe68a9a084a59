#pragma once

#include "rational.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace newton_osc {

/// Lebesgue exponents (p_1, ..., p_d), each in [1, inf], held through their exact
/// reciprocals so that p = inf is simply 1/p = 0.
class ExponentTuple {
public:
    ExponentTuple() = default;

    static ExponentTuple from_reciprocals(RationalVector inv)
    {
        ExponentTuple t;
        for (const auto& r : inv)
            if (r < 0 || r > 1) throw input_error("exponent outside [1, inf]: reciprocal " + to_string(r));
        t.inv_ = std::move(inv);
        return t;
    }

    /// Finite values are exact rationals; std::nullopt stands for infinity.
    static ExponentTuple from_values(const std::vector<std::optional<Rational>>& p)
    {
        RationalVector inv;
        for (const auto& v : p) {
            if (!v) {
                inv.emplace_back(0);
                continue;
            }
            if (*v < 1) throw input_error("exponent " + to_string(*v) + " is below 1");
            inv.push_back(1 / *v);
        }
        return from_reciprocals(std::move(inv));
    }

    static ExponentTuple constant(int d, const Rational& p)
    {
        return from_values(std::vector<std::optional<Rational>>(static_cast<std::size_t>(d), p));
    }

    static ExponentTuple infinite(int d) { return from_reciprocals(RationalVector(static_cast<std::size_t>(d), Rational(0))); }

    /// Comma separated list of "p/q", decimals, or "inf".
    static ExponentTuple parse(const std::string& text)
    {
        std::vector<std::optional<Rational>> values;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::string t = detail::trim(item);
            if (t == "inf" || t == "infinity" || t == "Inf") {
                values.emplace_back(std::nullopt);
            } else {
                values.emplace_back(parse_rational(t));
            }
        }
        if (values.empty()) throw input_error("empty exponent list");
        return from_values(values);
    }

    int dim() const noexcept { return static_cast<int>(inv_.size()); }
    const RationalVector& reciprocals() const noexcept { return inv_; }

    bool is_infinite(int j) const { return inv_[j] == 0; }
    bool all_infinite() const
    {
        for (const auto& r : inv_)
            if (r != 0) return false;
        return true;
    }

    /// p_j, or std::nullopt for infinity.
    std::optional<Rational> value(int j) const
    {
        if (inv_[j] == 0) return std::nullopt;
        return Rational(1 / inv_[j]);
    }

    /// P = sum_j 1/p_j.
    Rational P() const
    {
        Rational s = 0;
        for (const auto& r : inv_) s += r;
        return s;
    }

    /// v_j = 1 - P + 1/p_j.
    RationalVector direction() const
    {
        const Rational p = P();
        RationalVector v;
        for (const auto& r : inv_) v.push_back(1 - p + r);
        return v;
    }

    bool direction_positive() const
    {
        for (const auto& x : direction())
            if (x <= 0) return false;
        return true;
    }

    std::string value_string(int j) const { return inv_[j] == 0 ? "inf" : to_string(Rational(1 / inv_[j])); }

    std::vector<std::string> strings() const
    {
        std::vector<std::string> out;
        for (int j = 0; j < dim(); ++j) out.push_back(value_string(j));
        return out;
    }

    friend bool operator==(const ExponentTuple& a, const ExponentTuple& b) { return a.inv_ == b.inv_; }

private:
    RationalVector inv_;
};

} // namespace newton_osc
