#pragma once

#include "lp.hpp"
#include "phase.hpp"
#include "rational.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace newton_osc {

/// Half-space {alpha : normal . alpha >= level}.
struct Facet {
    RationalVector normal;
    Rational level{1};

    bool tight_at(const RationalVector& x) const { return dot(normal, x) == level; }
    bool holds_at(const RationalVector& x) const { return dot(normal, x) >= level; }
};

/// A point of the boundary together with the facets it lies on.
struct BoundaryPoint {
    RationalVector coords;
    std::vector<std::size_t> tight_facets;
    int codim = 0;
};

struct CompactFace {
    std::vector<std::size_t> vertices; // indices into NewtonPolyhedron::vertices()
    int dim = 0;
};

struct ConvexDecomposition {
    std::vector<RationalVector> vectors;
    RationalVector weights;
    bool over_compact_face = false;
};

struct NewtonDistance {
    Rational delta;
    BoundaryPoint point;
};

inline RationalVector to_rational(const MultiIndex& a)
{
    RationalVector v;
    v.reserve(a.size());
    for (int x : a) v.emplace_back(x);
    return v;
}

/// conv(union of alpha + R_+^d) for a finite set of positive multi-indices.
///
/// Facets are normalized to level 1 (every facet of an upward-closed polyhedron that
/// misses the origin has a positive level). All geometry is exact.
class NewtonPolyhedron {
public:
    static NewtonPolyhedron build(const std::vector<MultiIndex>& points)
    {
        if (points.empty()) throw input_error("Newton polyhedron of an empty point set");
        const int d = static_cast<int>(points.front().size());
        if (d < 1 || d > max_dimension) throw input_error("dimension out of range: " + std::to_string(d));
        for (const auto& p : points) {
            if (static_cast<int>(p.size()) != d) throw input_error("mixed dimensions in point set");
            for (int a : p)
                if (a < 1) throw input_error("multi-index " + to_string(p) + " has a component below one");
        }

        NewtonPolyhedron poly;
        poly.dim_ = d;
        poly.vertices_ = extreme_points(points);
        poly.facets_ = enumerate_facets(poly.vertices_, d);
        poly.faces_ = enumerate_compact_faces(poly);
        return poly;
    }

    static NewtonPolyhedron of(const Phase& s) { return build(s.support()); }

    int dim() const noexcept { return dim_; }
    const std::vector<MultiIndex>& vertices() const noexcept { return vertices_; }
    const std::vector<Facet>& facets() const noexcept { return facets_; }
    const std::vector<CompactFace>& compact_faces() const noexcept { return faces_; }

    bool contains(const RationalVector& x) const
    {
        return std::all_of(facets_.begin(), facets_.end(), [&](const Facet& f) { return f.holds_at(x); });
    }

    std::vector<std::size_t> tight_facets(const RationalVector& x) const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < facets_.size(); ++i)
            if (facets_[i].tight_at(x)) out.push_back(i);
        return out;
    }

    bool on_boundary(const RationalVector& x) const { return contains(x) && !tight_facets(x).empty(); }

    int rank_of(const std::vector<std::size_t>& facet_ids) const
    {
        std::vector<RationalVector> rows;
        for (auto i : facet_ids) rows.push_back(facets_[i].normal);
        return rank(rows);
    }

    BoundaryPoint boundary_point(const RationalVector& x) const
    {
        if (!on_boundary(x)) throw input_error("point is not on the boundary of the Newton polyhedron");
        BoundaryPoint bp{x, tight_facets(x), 0};
        bp.codim = rank_of(bp.tight_facets);
        return bp;
    }

    /// A face cut out by facets is bounded iff the facet normals jointly have every
    /// coordinate in their support; otherwise some e_j is a recession direction.
    bool face_is_compact(const std::vector<std::size_t>& facet_ids) const
    {
        std::vector<bool> covered(dim_, false);
        for (auto i : facet_ids)
            for (int j = 0; j < dim_; ++j)
                if (facets_[i].normal[j] > 0) covered[j] = true;
        return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
    }

    std::vector<std::size_t> vertices_on(const std::vector<std::size_t>& facet_ids) const
    {
        std::vector<std::size_t> out;
        for (std::size_t v = 0; v < vertices_.size(); ++v) {
            auto rv = to_rational(vertices_[v]);
            if (std::all_of(facet_ids.begin(), facet_ids.end(), [&](auto f) { return facets_[f].tight_at(rv); }))
                out.push_back(v);
        }
        return out;
    }

private:
    // Drops duplicates and points lying in conv(others) + R_+^d (decided by exact LP).
    static std::vector<MultiIndex> extreme_points(std::vector<MultiIndex> pts)
    {
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

        // Componentwise domination is the cheap special case of the LP test.
        std::vector<MultiIndex> kept;
        for (const auto& p : pts) {
            bool dominated = std::any_of(pts.begin(), pts.end(), [&](const MultiIndex& q) {
                if (q == p) return false;
                for (std::size_t j = 0; j < p.size(); ++j)
                    if (q[j] > p[j]) return false;
                return true;
            });
            if (!dominated) kept.push_back(p);
        }

        std::vector<MultiIndex> vertices;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            std::vector<RationalVector> others;
            for (std::size_t k = 0; k < kept.size(); ++k)
                if (k != i) others.push_back(to_rational(kept[k]));
            if (!lp::in_upward_hull<Rational>(others, to_rational(kept[i]))) vertices.push_back(kept[i]);
        }
        return vertices;
    }

    // Every facet passes through d affinely independent generators drawn from the
    // vertices and the recession rays e_1..e_d, with at least one vertex among them.
    static std::vector<Facet> enumerate_facets(const std::vector<MultiIndex>& vertices, int d)
    {
        std::vector<RationalVector> verts;
        for (const auto& v : vertices) verts.push_back(to_rational(v));
        const std::size_t nv = verts.size();
        const std::size_t total = nv + static_cast<std::size_t>(d);

        std::set<RationalVector> seen;
        std::vector<Facet> facets;
        std::vector<std::size_t> pick(d);
        // Combinations in lexicographic order over [0, total).
        for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) pick[i] = i;
        if (total < static_cast<std::size_t>(d)) return facets;
        for (;;) {
            if (pick.front() < nv) {
                // Unknowns (n_1..n_d, h); rows n.v - h = 0 for vertices, n.e_j = 0 for rays.
                std::vector<RationalVector> rows;
                for (auto g : pick) {
                    RationalVector row(d + 1, Rational(0));
                    if (g < nv) {
                        for (int j = 0; j < d; ++j) row[j] = verts[g][j];
                        row[d] = -1;
                    } else {
                        row[g - nv] = 1;
                    }
                    rows.push_back(std::move(row));
                }
                auto ns = null_space(rows, d + 1);
                if (ns.size() == 1) {
                    RationalVector n(ns[0].begin(), ns[0].begin() + d);
                    Rational h = ns[0][d];
                    bool any_pos = false, any_neg = false;
                    for (const auto& x : n) {
                        any_pos |= x > 0;
                        any_neg |= x < 0;
                    }
                    if (!(any_pos && any_neg) && (any_pos || any_neg)) {
                        if (any_neg) {
                            for (auto& x : n) x = -x;
                            h = -h;
                        }
                        if (h > 0) {
                            for (auto& x : n) x /= h;
                            bool valid = std::all_of(verts.begin(), verts.end(),
                                                     [&](const RationalVector& v) { return dot(n, v) >= 1; });
                            if (valid && seen.insert(n).second) facets.push_back({n, Rational(1)});
                        }
                    }
                }
            }
            // Advance combination.
            int i = d - 1;
            while (i >= 0 && pick[i] == total - d + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int k = i + 1; k < d; ++k) pick[k] = pick[k - 1] + 1;
        }
        std::sort(facets.begin(), facets.end(), [](const Facet& a, const Facet& b) { return a.normal < b.normal; });
        return facets;
    }

    static std::vector<CompactFace> enumerate_compact_faces(const NewtonPolyhedron& p)
    {
        // Vertex sets of faces are the intersections of facet vertex sets; close the
        // family under intersection, then keep the bounded ones.
        std::set<std::vector<std::size_t>> family;
        for (std::size_t f = 0; f < p.facets_.size(); ++f) {
            auto vs = p.vertices_on({f});
            if (!vs.empty()) family.insert(vs);
        }
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<std::vector<std::size_t>> current(family.begin(), family.end());
            for (std::size_t i = 0; i < current.size(); ++i)
                for (std::size_t k = i + 1; k < current.size(); ++k) {
                    std::vector<std::size_t> inter;
                    std::set_intersection(current[i].begin(), current[i].end(), current[k].begin(), current[k].end(),
                                          std::back_inserter(inter));
                    if (!inter.empty() && family.insert(inter).second) grew = true;
                }
        }
        for (std::size_t v = 0; v < p.vertices_.size(); ++v) family.insert({v});

        std::vector<CompactFace> faces;
        for (const auto& vs : family) {
            // Smallest face containing vs: all facets tight on every vertex of vs.
            std::vector<std::size_t> facet_ids;
            for (std::size_t f = 0; f < p.facets_.size(); ++f) {
                bool all = std::all_of(vs.begin(), vs.end(),
                                       [&](auto v) { return p.facets_[f].tight_at(to_rational(p.vertices_[v])); });
                if (all) facet_ids.push_back(f);
            }
            if (!p.face_is_compact(facet_ids)) continue;
            if (p.vertices_on(facet_ids) != vs) continue;
            std::vector<RationalVector> diffs;
            for (std::size_t i = 1; i < vs.size(); ++i) {
                RationalVector diff(p.dim_);
                for (int j = 0; j < p.dim_; ++j) diff[j] = p.vertices_[vs[i]][j] - p.vertices_[vs[0]][j];
                diffs.push_back(std::move(diff));
            }
            faces.push_back({vs, rank(diffs)});
        }
        std::sort(faces.begin(), faces.end(), [](const CompactFace& a, const CompactFace& b) {
            return a.dim != b.dim ? a.dim < b.dim : a.vertices < b.vertices;
        });
        return faces;
    }

    int dim_ = 0;
    std::vector<MultiIndex> vertices_;
    std::vector<Facet> facets_;
    std::vector<CompactFace> faces_;
};

/// The t > 0 with t v on the boundary: max over facets of level / (v . normal).
inline NewtonDistance newton_distance(const NewtonPolyhedron& poly, const RationalVector& v)
{
    if (static_cast<int>(v.size()) != poly.dim()) throw input_error("direction has the wrong dimension");
    for (const auto& x : v)
        if (x <= 0) throw input_error("direction must be strictly positive, got component " + to_string(x));
    Rational delta = 0;
    for (const auto& f : poly.facets()) {
        Rational t = f.level / dot(v, f.normal);
        if (t > delta) delta = t;
    }
    RationalVector point(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) point[j] = delta * v[j];
    return {delta, poly.boundary_point(point)};
}

/// Writes a boundary point as a positive combination of linearly independent boundary
/// vectors. On a compact minimal face the vectors are that face's vertices, chosen as
/// the smallest subset (then lexicographically first) carrying strictly positive
/// weights; otherwise the point itself is returned with weight one.
inline ConvexDecomposition convex_decomposition(const NewtonPolyhedron& poly, const RationalVector& point)
{
    if (!poly.on_boundary(point)) throw input_error("point is not on the boundary of the Newton polyhedron");
    const auto tight = poly.tight_facets(point);
    if (!poly.face_is_compact(tight)) return {{point}, {Rational(1)}, false};

    const auto face_vertices = poly.vertices_on(tight);
    const int d = poly.dim();
    const std::size_t nv = face_vertices.size();
    for (std::size_t size = 1; size <= std::min<std::size_t>(nv, d); ++size) {
        std::vector<std::size_t> pick(size);
        for (std::size_t i = 0; i < size; ++i) pick[i] = i;
        for (;;) {
            std::vector<RationalVector> vecs;
            for (auto i : pick) vecs.push_back(to_rational(poly.vertices()[face_vertices[i]]));
            if (rank(vecs) == static_cast<int>(size)) {
                // Gram system of the independent vectors; accepted only if it recombines exactly.
                std::vector<RationalVector> gram(size, RationalVector(size));
                RationalVector rhs(size);
                for (std::size_t a = 0; a < size; ++a) {
                    for (std::size_t b = 0; b < size; ++b) gram[a][b] = dot(vecs[a], vecs[b]);
                    rhs[a] = dot(vecs[a], point);
                }
                RationalVector theta;
                if (solve(gram, rhs, theta)) {
                    bool ok = std::all_of(theta.begin(), theta.end(), [](const Rational& t) { return t > 0; });
                    RationalVector recombined(d, Rational(0));
                    for (std::size_t a = 0; a < size; ++a)
                        for (int j = 0; j < d; ++j) recombined[j] += theta[a] * vecs[a][j];
                    if (ok && recombined == point) return {vecs, theta, true};
                }
            }
            int i = static_cast<int>(size) - 1;
            while (i >= 0 && pick[i] == nv - size + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (std::size_t k = i + 1; k < size; ++k) pick[k] = pick[k - 1] + 1;
        }
    }
    // Unreachable for a point inside a compact face; keep the trivially valid answer.
    return {{point}, {Rational(1)}, false};
}

inline nlohmann::json rational_json(const RationalVector& v)
{
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : v) a.push_back(to_string(x));
    return a;
}

inline nlohmann::json to_json(const NewtonPolyhedron& p)
{
    nlohmann::json facets = nlohmann::json::array();
    for (const auto& f : p.facets())
        facets.push_back({{"normal", rational_json(f.normal)}, {"level", to_string(f.level)}});
    nlohmann::json faces = nlohmann::json::array();
    for (const auto& face : p.compact_faces()) {
        nlohmann::json vs = nlohmann::json::array();
        for (auto v : face.vertices) vs.push_back(p.vertices()[v]);
        faces.push_back({{"vertices", vs}, {"dim", face.dim}});
    }
    return {{"dim", p.dim()}, {"vertices", p.vertices()}, {"facets", facets}, {"compact_faces", faces}};
}

inline nlohmann::json to_json(const BoundaryPoint& b)
{
    return {{"coords", rational_json(b.coords)}, {"tight_facets", b.tight_facets}, {"codim", b.codim}};
}

} // namespace newton_osc
