#pragma once

#include "rational.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace newton_osc::lp {

template <typename T>
struct Tolerance {
    static bool is_zero(const T& x) { return x == 0; }
    static bool positive(const T& x) { return x > 0; }
    static bool negative(const T& x) { return x < 0; }
};

template <>
struct Tolerance<double> {
    static constexpr double eps = 1e-11;
    static bool is_zero(double x) { return std::abs(x) <= eps; }
    static bool positive(double x) { return x > eps; }
    static bool negative(double x) { return x < -eps; }
};

/// Dense two-phase simplex for   min c.x  s.t.  A x = b, x >= 0.
///
/// Bland's rule throughout, so it terminates on degenerate problems. Exact when T is
/// Rational; with double it uses a fixed absolute pivot tolerance.
template <typename T>
class Simplex {
public:
    using Row = std::vector<T>;
    enum class Status { optimal, infeasible, unbounded };

    struct Result {
        Status status;
        T objective{};
        std::vector<T> x;
    };

    static Result solve(std::vector<Row> a, Row b, const Row& c)
    {
        const std::size_t m = a.size();
        const std::size_t n = c.size();
        for (std::size_t i = 0; i < m; ++i)
            if (b[i] < 0) {
                for (auto& v : a[i]) v = -v;
                b[i] = -b[i];
            }

        // Tableau with n structural + m artificial columns, last column = rhs.
        const std::size_t cols = n + m + 1;
        std::vector<Row> t(m, Row(cols, T(0)));
        std::vector<std::size_t> basis(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
            t[i][n + i] = 1;
            t[i][cols - 1] = b[i];
            basis[i] = n + i;
        }

        Row phase1(cols, T(0));
        for (std::size_t i = 0; i < m; ++i) phase1[n + i] = 1;
        if (!run(t, basis, phase1, n + m)) return {Status::unbounded, {}, {}};
        T infeas = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] >= n) infeas += t[i][cols - 1];
        if (!Tolerance<T>::is_zero(infeas)) return {Status::infeasible, {}, {}};

        // Drive remaining artificials out of the basis where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (!Tolerance<T>::is_zero(t[i][j])) {
                    pivot(t, basis, i, j);
                    break;
                }
        }

        Row phase2(cols, T(0));
        for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
        if (!run(t, basis, phase2, n)) return {Status::unbounded, {}, {}};

        Result r{Status::optimal, T(0), std::vector<T>(n, T(0))};
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < n) r.x[basis[i]] = t[i][cols - 1];
        for (std::size_t j = 0; j < n; ++j) r.objective += c[j] * r.x[j];
        return r;
    }

    /// Feasibility of A x = b, x >= 0.
    static std::optional<std::vector<T>> feasible_point(const std::vector<Row>& a, const Row& b)
    {
        const std::size_t n = a.empty() ? 0 : a.front().size();
        auto r = solve(a, b, Row(n, T(0)));
        if (r.status != Status::optimal) return std::nullopt;
        return r.x;
    }

private:
    static void pivot(std::vector<Row>& t, std::vector<std::size_t>& basis, std::size_t row, std::size_t col)
    {
        const std::size_t cols = t[row].size();
        const T p = t[row][col];
        for (std::size_t k = 0; k < cols; ++k) t[row][k] /= p;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i == row || t[i][col] == 0) continue;
            const T f = t[i][col];
            for (std::size_t k = 0; k < cols; ++k) t[i][k] -= f * t[row][k];
        }
        basis[row] = col;
    }

    // Minimizes cost over the first `active` columns. Returns false if unbounded.
    static bool run(std::vector<Row>& t, std::vector<std::size_t>& basis, const Row& cost, std::size_t active)
    {
        const std::size_t m = t.size();
        const std::size_t rhs = cost.size() - 1;
        for (;;) {
            std::size_t enter = active;
            for (std::size_t j = 0; j < active && enter == active; ++j) {
                T reduced = cost[j];
                for (std::size_t i = 0; i < m; ++i) reduced -= cost[basis[i]] * t[i][j];
                if (Tolerance<T>::negative(reduced)) enter = j;
            }
            if (enter == active) return true;

            std::size_t leave = m;
            T best{};
            for (std::size_t i = 0; i < m; ++i) {
                if (!Tolerance<T>::positive(t[i][enter])) continue;
                T ratio = t[i][rhs] / t[i][enter];
                if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m) return false;
            pivot(t, basis, leave, enter);
        }
    }
};

/// Whether `point` lies in conv(generators) + R_+^d, i.e. some convex combination of
/// the generators is componentwise <= point.
template <typename T>
bool in_upward_hull(const std::vector<std::vector<T>>& generators, const std::vector<T>& point)
{
    if (generators.empty()) return false;
    const std::size_t d = point.size();
    const std::size_t g = generators.size();
    // Variables: theta_1..theta_g, slack_1..slack_d.
    std::vector<std::vector<T>> a(d + 1, std::vector<T>(g + d, T(0)));
    std::vector<T> b(d + 1, T(0));
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < g; ++i) a[k][i] = generators[i][k];
        a[k][g + k] = 1;
        b[k] = point[k];
    }
    for (std::size_t i = 0; i < g; ++i) a[d][i] = 1;
    b[d] = 1;
    return Simplex<T>::feasible_point(a, b).has_value();
}

} // namespace newton_osc::lp
