#include <newton_osc/newton.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace newton_osc;

namespace {

RationalVector rv(std::initializer_list<Rational> xs) { return RationalVector(xs); }

std::set<std::vector<std::string>> normals_of(const NewtonPolyhedron& p)
{
    std::set<std::vector<std::string>> out;
    for (const auto& f : p.facets()) {
        EXPECT_EQ(f.level, 1);
        std::vector<std::string> n;
        for (const auto& x : f.normal) n.push_back(to_string(x));
        out.insert(n);
    }
    return out;
}

std::vector<MultiIndex> random_points(std::mt19937_64& rng, int d)
{
    std::uniform_int_distribution<int> e(1, 9), n(1, 6);
    std::vector<MultiIndex> pts(n(rng));
    for (auto& p : pts) {
        p.resize(d);
        for (auto& x : p) x = e(rng);
    }
    return pts;
}

} // namespace

TEST(Newton, OrthantTranslate)
{
    const auto p = NewtonPolyhedron::build({{1, 1, 1}});
    EXPECT_EQ(p.vertices(), (std::vector<MultiIndex>{{1, 1, 1}}));
    EXPECT_EQ(normals_of(p), (std::set<std::vector<std::string>>{{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}}));
}

TEST(Newton, DominatedPointIsNotAVertex)
{
    const auto p = NewtonPolyhedron::build({{4, 1, 1}, {1, 1, 4}, {3, 2, 3}});
    EXPECT_EQ(p.vertices(), (std::vector<MultiIndex>{{1, 1, 4}, {4, 1, 1}}));
}

TEST(Newton, TriangleFacet)
{
    const auto p = NewtonPolyhedron::build({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}});
    EXPECT_EQ(p.vertices().size(), 3u);
    EXPECT_TRUE(normals_of(p).count({"1/4", "1/4", "1/4"}));
}

// Facet normals frozen from a truncated convex hull computed with scipy (tests/oracles).
TEST(Newton, FacetsMatchHullOracle)
{
    using S = std::set<std::vector<std::string>>;
    EXPECT_EQ(normals_of(NewtonPolyhedron::build({{4, 1, 1}, {1, 1, 4}})),
              (S{{"0", "0", "1"}, {"0", "1", "0"}, {"1", "0", "0"}, {"1/5", "0", "1/5"}}));
    EXPECT_EQ(normals_of(NewtonPolyhedron::build({{6, 1}, {1, 6}, {2, 2}})),
              (S{{"0", "1"}, {"1", "0"}, {"1/10", "2/5"}, {"2/5", "1/10"}}));
    EXPECT_EQ(normals_of(NewtonPolyhedron::build({{2, 1, 1}, {1, 2, 1}, {1, 1, 3}})),
              (S{{"0", "0", "1"}, {"0", "1", "0"}, {"1", "0", "0"}, {"2/7", "2/7", "1/7"}}));
}

TEST(Newton, BuildErrors)
{
    EXPECT_THROW(NewtonPolyhedron::build({}), input_error);
    EXPECT_THROW(NewtonPolyhedron::build({{1, 0, 2}}), input_error);
}

TEST(Newton, DistanceExamples)
{
    const auto xyz = NewtonPolyhedron::build({{1, 1, 1}});
    auto nd = newton_distance(xyz, rv({1, 1, 1}));
    EXPECT_EQ(nd.delta, 1);
    EXPECT_EQ(nd.point.codim, 3);
    EXPECT_EQ(nd.point.tight_facets.size(), 3u);

    const auto edge = NewtonPolyhedron::build({{4, 1, 1}, {1, 1, 4}});
    nd = newton_distance(edge, rv({1, 1, 1}));
    EXPECT_EQ(nd.delta, Rational(5, 2));
    EXPECT_EQ(nd.point.coords, rv({Rational(5, 2), Rational(5, 2), Rational(5, 2)}));

    EXPECT_EQ(newton_distance(xyz, rv({Rational(1, 4), Rational(1, 4), Rational(1, 4)})).delta, 4);
    EXPECT_EQ(newton_distance(NewtonPolyhedron::build({{2, 2, 2}}), rv({1, 1, 1})).delta, 2);
    EXPECT_THROW(newton_distance(xyz, rv({1, 0, 1})), input_error);
}

// Values frozen from an LP solved with scipy (tests/oracles).
TEST(Newton, DistanceMatchesLpOracle)
{
    EXPECT_EQ(newton_distance(NewtonPolyhedron::build({{1, 3}, {3, 1}}), rv({1, 1})).delta, 2);
    EXPECT_EQ(newton_distance(NewtonPolyhedron::build({{3, 1, 2, 1}, {1, 2, 1, 3}, {2, 2, 2, 1}}), rv({1, 1, 1, 1})).delta,
              Rational(9, 5));
    EXPECT_EQ(newton_distance(NewtonPolyhedron::build({{6, 1}, {1, 6}, {2, 2}}), rv({1, 2})).delta, Rational(5, 3));
}

TEST(Newton, CompactFaces)
{
    const auto xyz = NewtonPolyhedron::build({{1, 1, 1}});
    ASSERT_EQ(xyz.compact_faces().size(), 1u);
    EXPECT_EQ(xyz.compact_faces()[0].dim, 0);

    const auto edge = NewtonPolyhedron::build({{4, 1, 1}, {1, 1, 4}});
    std::vector<std::pair<int, std::size_t>> shape;
    for (const auto& f : edge.compact_faces()) shape.emplace_back(f.dim, f.vertices.size());
    EXPECT_EQ(shape, (std::vector<std::pair<int, std::size_t>>{{0, 1}, {0, 1}, {1, 2}}));

    const auto tri = NewtonPolyhedron::build({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}});
    int counts[3] = {0, 0, 0};
    for (const auto& f : tri.compact_faces()) ++counts[f.dim];
    EXPECT_EQ(counts[0], 3);
    EXPECT_EQ(counts[1], 3);
    EXPECT_EQ(counts[2], 1);
}

TEST(Newton, ConvexDecompositionExamples)
{
    const auto xyz = NewtonPolyhedron::build({{1, 1, 1}});
    auto cd = convex_decomposition(xyz, rv({1, 1, 1}));
    EXPECT_EQ(cd.vectors, (std::vector<RationalVector>{rv({1, 1, 1})}));
    EXPECT_EQ(cd.weights, rv({1}));

    // (5/2,5/2,5/2) lies only on the facet x + z >= 5, whose face is unbounded in y.
    const auto edge = NewtonPolyhedron::build({{4, 1, 1}, {1, 1, 4}});
    const auto half = rv({Rational(5, 2), Rational(5, 2), Rational(5, 2)});
    cd = convex_decomposition(edge, half);
    EXPECT_FALSE(cd.over_compact_face);
    EXPECT_EQ(cd.vectors, std::vector<RationalVector>{half});
    // The projected edge point itself decomposes over the two vertices.
    cd = convex_decomposition(edge, rv({Rational(5, 2), 1, Rational(5, 2)}));
    EXPECT_TRUE(cd.over_compact_face);
    EXPECT_EQ(cd.weights, rv({Rational(1, 2), Rational(1, 2)}));

    const auto tri = NewtonPolyhedron::build({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}});
    cd = convex_decomposition(tri, rv({Rational(4, 3), Rational(4, 3), Rational(4, 3)}));
    EXPECT_EQ(cd.weights, rv({Rational(1, 3), Rational(1, 3), Rational(1, 3)}));

    EXPECT_THROW(convex_decomposition(xyz, rv({2, 2, 2})), input_error);
}

TEST(Newton, Homogeneity)
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto poly = NewtonPolyhedron::build(random_points(rng, 3));
        const RationalVector v = rv({1, 2, 3});
        const Rational c(7, 3);
        RationalVector cv;
        for (const auto& x : v) cv.push_back(c * x);
        EXPECT_EQ(newton_distance(poly, cv).delta, newton_distance(poly, v).delta / c);
    }
}

TEST(Newton, AddingInteriorPointChangesNothing)
{
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        auto pts = random_points(rng, 3);
        const auto poly = NewtonPolyhedron::build(pts);
        auto extra = pts.front();
        for (auto& x : extra) x += 1;
        pts.push_back(extra);
        const auto again = NewtonPolyhedron::build(pts);
        EXPECT_EQ(again.vertices(), poly.vertices());
        EXPECT_EQ(normals_of(again), normals_of(poly));
    }
}

TEST(Newton, StructuralInvariants)
{
    std::mt19937_64 rng(13);
    for (int t = 0; t < 30; ++t) {
        const int d = 2 + t % 3;
        const auto pts = random_points(rng, d);
        const auto poly = NewtonPolyhedron::build(pts);
        const RationalVector origin(d, Rational(0));
        EXPECT_FALSE(poly.contains(origin));
        for (const auto& p : pts) EXPECT_TRUE(poly.contains(to_rational(p)));
        for (const auto& f : poly.facets())
            for (const auto& x : f.normal) EXPECT_GE(x, 0);
        for (const auto& v : poly.vertices()) {
            const auto tight = poly.tight_facets(to_rational(v));
            EXPECT_EQ(poly.rank_of(tight), d);
        }
        RationalVector dir;
        for (int j = 0; j < d; ++j) dir.emplace_back(j + 1, 2);
        const auto nd = newton_distance(poly, dir);
        EXPECT_TRUE(poly.on_boundary(nd.point.coords));
        EXPECT_GE(nd.point.codim, 1);
        EXPECT_LE(nd.point.codim, d);

        const auto cd = convex_decomposition(poly, nd.point.coords);
        RationalVector sum(d, Rational(0));
        Rational wsum = 0;
        for (std::size_t i = 0; i < cd.vectors.size(); ++i) {
            EXPECT_GT(cd.weights[i], 0);
            EXPECT_TRUE(poly.on_boundary(cd.vectors[i]));
            wsum += cd.weights[i];
            for (int j = 0; j < d; ++j) sum[j] += cd.weights[i] * cd.vectors[i][j];
        }
        EXPECT_EQ(wsum, 1);
        EXPECT_EQ(sum, nd.point.coords);
        EXPECT_EQ(rank(cd.vectors), static_cast<int>(cd.vectors.size()));
    }
}

TEST(Newton, JsonSummary)
{
    const auto j = to_json(NewtonPolyhedron::build({{4, 1, 1}, {1, 1, 4}}));
    EXPECT_EQ(j["dim"], 3);
    EXPECT_EQ(j["vertices"].size(), 2u);
    EXPECT_EQ(j["facets"].size(), 4u);
}
