#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace newton_osc {

/// Exact rational scalar used for all polyhedral geometry and exponent algebra.
using Rational = boost::multiprecision::mpq_rational;
using RationalVector = std::vector<Rational>;

/// Malformed or out-of-contract input.
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::vector<double> to_double(const RationalVector& v)
{
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(to_double(q));
    return out;
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q)
{
    const auto num = boost::multiprecision::numerator(q);
    const auto den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

namespace detail {

inline std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline bool all_digits(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace detail

/// Parses an integer, "p/q", or a finite decimal ("2.5", "-0.125", "1e-3") exactly.
inline Rational parse_rational(std::string_view text)
{
    std::string s = detail::trim(text);
    if (s.empty()) throw input_error("empty rational literal");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw input_error("zero denominator in '" + s + "'");
        return num / den;
    }

    bool negative = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = s[pos] == '-';
        ++pos;
    }

    long exponent = 0;
    std::string mantissa = s.substr(pos);
    if (auto e = mantissa.find_first_of("eE"); e != std::string::npos) {
        std::string exp_text = mantissa.substr(e + 1);
        mantissa = mantissa.substr(0, e);
        std::string digits = exp_text;
        if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) digits = digits.substr(1);
        if (!detail::all_digits(digits) || digits.size() > 6)
            throw input_error("bad exponent in '" + s + "'");
        exponent = std::stol(exp_text);
    }

    std::string int_part = mantissa, frac_part;
    if (auto dot = mantissa.find('.'); dot != std::string::npos) {
        int_part = mantissa.substr(0, dot);
        frac_part = mantissa.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) throw input_error("not a number: '" + s + "'");
    if ((!int_part.empty() && !detail::all_digits(int_part)) ||
        (!frac_part.empty() && !detail::all_digits(frac_part)))
        throw input_error("not a number: '" + s + "'");

    using boost::multiprecision::mpz_int;
    mpz_int digits(int_part.empty() && !frac_part.empty() ? frac_part : int_part + frac_part);
    exponent -= static_cast<long>(frac_part.size());
    mpz_int scale = boost::multiprecision::pow(mpz_int(10), static_cast<unsigned>(std::labs(exponent)));
    Rational value = exponent >= 0 ? Rational(digits * scale) : Rational(digits, scale);
    return negative ? Rational(-value) : value;
}

/// 2^e for integer e, exactly.
inline Rational pow2(int e)
{
    using boost::multiprecision::mpz_int;
    mpz_int p = mpz_int(1) << std::abs(e);
    return e >= 0 ? Rational(p) : Rational(mpz_int(1), p);
}

/// Ceiling of a rational as a plain integer.
inline long ceil_to_long(const Rational& q)
{
    using boost::multiprecision::mpz_int;
    const mpz_int num = boost::multiprecision::numerator(q);
    const mpz_int den = boost::multiprecision::denominator(q);
    mpz_int fl = num / den; // truncates toward zero
    if (fl * den != num && num > 0) fl += 1;
    return fl.convert_to<long>();
}

/// Rank of a set of rational row vectors, by exact Gaussian elimination.
inline int rank(std::vector<RationalVector> rows)
{
    if (rows.empty()) return 0;
    const std::size_t cols = rows.front().size();
    int r = 0;
    for (std::size_t c = 0; c < cols && r < static_cast<int>(rows.size()); ++c) {
        std::size_t pivot = r;
        while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[pivot], rows[r]);
        for (std::size_t i = r + 1; i < rows.size(); ++i) {
            if (rows[i][c] == 0) continue;
            Rational f = rows[i][c] / rows[r][c];
            for (std::size_t k = c; k < cols; ++k) rows[i][k] -= f * rows[r][k];
        }
        ++r;
    }
    return r;
}

/// Basis of the right null space of a rational matrix (rows x cols).
inline std::vector<RationalVector> null_space(std::vector<RationalVector> m, std::size_t cols)
{
    std::vector<int> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[r]);
        Rational inv = 1 / m[r][c];
        for (std::size_t k = 0; k < cols; ++k) m[r][k] *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (std::size_t k = 0; k < cols; ++k) m[i][k] -= f * m[r][k];
        }
        pivot_col.push_back(static_cast<int>(c));
        ++r;
    }
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[c] = true;

    std::vector<RationalVector> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        RationalVector v(cols, Rational(0));
        v[free] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -m[i][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solves the square system A x = b exactly; returns false if A is singular.
inline bool solve(std::vector<RationalVector> a, RationalVector b, RationalVector& x)
{
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return false;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rational f = a[i][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[i][k] -= f * a[c][k];
            b[i] -= f * b[c];
        }
    }
    x.assign(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

inline Rational dot(const RationalVector& a, const RationalVector& b)
{
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace newton_osc
