#include <newton_osc/dyadic.hpp>
#include <newton_osc/experiment.hpp>
#include <newton_osc/quadrature.hpp>
#include <newton_osc/rate_fit.hpp>
#include <newton_osc/sublevel.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace newton_osc;

namespace {

const Phase xyz = Phase::monomial({1, 1, 1});

double lam(int m) { return std::ldexp(1.0, m); }

std::vector<std::pair<double, double>> synthetic(int from, int to, double r, int s)
{
    std::vector<std::pair<double, double>> out;
    for (int m = from; m <= to; ++m) {
        const double t = lam(m);
        out.emplace_back(t, 3.0 * std::pow(t, -r) * std::pow(std::log(t), s));
    }
    return out;
}

} // namespace

// Nodes and weights frozen from numpy.polynomial.legendre.leggauss(4) mapped to [0,1].
TEST(Quadrature, GaussLegendreMatchesReference)
{
    const auto gl = gauss_legendre(4);
    const double nodes[] = {0.069431844202973714, 0.33000947820757187, 0.66999052179242813, 0.93056815579702623};
    const double weights[] = {0.17392742256872684, 0.3260725774312731, 0.3260725774312731, 0.17392742256872684};
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(gl.nodes[i], nodes[i], 1e-15);
        EXPECT_NEAR(gl.weights[i], weights[i], 1e-15);
    }
}

TEST(Quadrature, GaussLegendreExactOnPolynomials)
{
    for (int n : {1, 3, 8, 20}) {
        const auto gl = gauss_legendre(n);
        for (int k = 0; k < 2 * n; ++k) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += gl.weights[i] * std::pow(gl.nodes[i], k);
            EXPECT_NEAR(s, 1.0 / (k + 1), 1e-13) << "n=" << n << " k=" << k;
        }
    }
}

TEST(Quadrature, CutoffProfile)
{
    EXPECT_EQ(cutoff_profile(0.0), 1.0);
    EXPECT_EQ(cutoff_profile(0.5), 1.0);
    EXPECT_EQ(cutoff_profile(1.0), 0.0);
    EXPECT_NEAR(cutoff_profile(0.75), 0.5, 1e-15);
    const auto gl = gauss_legendre(8);
    double s = 0;
    for (int p = 0; p < 2; ++p)
        for (int i = 0; i < 8; ++i) s += 0.5 * gl.weights[i] * cutoff_profile(0.5 * (p + gl.nodes[i]));
    EXPECT_NEAR(s, cutoff_profile_integral, 1e-14);
}

TEST(Quadrature, NonOscillatoryLimit)
{
    const QuadratureSpec spec{0.05, 2, 4, 4};
    const auto r = eval_lambda_form(xyz, constant_test_functions(3), spec);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(std::abs(r.value) / cutoff_integral(3), 1.0, 0.005);
}

TEST(Quadrature, SharpnessInstanceMatchesSupportVolume)
{
    for (int m = 4; m <= 12; ++m) {
        const double l = lam(m);
        const auto fs = box_test_functions(sharpness_widths({1.0 / 3, 1.0 / 3, 1.0 / 3}, l));
        const auto spec = auto_quadrature_spec(xyz, l, fs);
        const auto r = eval_lambda_form(xyz, fs, spec);
        EXPECT_TRUE(r.converged);
        // psi = 1 on the support and lambda xyz <= 1 there.
        const double ratio = std::abs(r.value) * l;
        EXPECT_GT(ratio, 0.5);
        EXPECT_LT(ratio, 2.0);
    }
}

// On [0,1] x [0, w]^2 with w = lambda^(-1/2) the phase is at most lambda w^2 = 1, and the
// support volume with the cutoff is w^2 * int B = 0.75 / lambda.
TEST(Quadrature, OffDiagonalInstanceMatchesSupportVolume)
{
    for (int m = 4; m <= 12; m += 2) {
        const double l = lam(m);
        const auto fs = off_diagonal_test_functions(3, l);
        const auto r = eval_lambda_form(xyz, fs, auto_quadrature_spec(xyz, l, fs));
        EXPECT_TRUE(r.converged);
        const double ratio = std::abs(r.value) * l;
        EXPECT_GT(ratio, 0.5);
        EXPECT_LT(ratio, 2.0);
        EXPECT_LE(ratio, 0.75 + 1e-12);
    }
}

TEST(Quadrature, TensorPathMatchesReference)
{
    // Reference by mpmath 2-d adaptive quadrature.
    const auto s = Phase::from_terms(2, {{{1, 1}, 1.0}, {{2, 1}, 1.0}});
    const auto fs = constant_test_functions(2);
    const auto r = eval_lambda_form(s, fs, auto_quadrature_spec(s, 10.0, fs));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value.real(), 0.134521037858006057984954796297, 1e-9);
    EXPECT_NEAR(r.value.imag(), 0.179338727956390357163504678345, 1e-9);
}

TEST(Quadrature, MonomialPathMatchesTensorPath)
{
    // A negligible second term forces the tensor route for the same integrand.
    const auto s = Phase::from_terms(3, {{{1, 1, 1}, 1.0}, {{3, 3, 3}, 1e-300}});
    const auto fs = constant_test_functions(3);
    for (double l : {8.0, 32.0}) {
        const auto spec = auto_quadrature_spec(xyz, l, fs);
        const auto a = eval_lambda_form(xyz, fs, spec);
        const auto b = eval_lambda_form(s, fs, spec);
        EXPECT_NEAR(std::abs(a.value - b.value), 0.0, 1e-10);
    }
}

TEST(Quadrature, PowerWeightSubstitution)
{
    // int B(x) x^(-1/2) dx and int B(x) x^(1/2) dx from mpmath.
    const auto s = Phase::monomial({1, 1});
    std::vector<TestFunction> fs = constant_test_functions(2);
    fs[1].factors[0] = AxisFactor::pow(-0.5);
    auto r = eval_lambda_form(s, fs, QuadratureSpec{1e-12, 2, 8, 4});
    EXPECT_NEAR(r.value.real(), 1.72857332631025598467647766469 * 0.75, 1e-6);
    fs[1].factors[0] = AxisFactor::pow(0.5);
    r = eval_lambda_form(s, fs, QuadratureSpec{1e-12, 2, 8, 4});
    EXPECT_NEAR(r.value.real(), 0.435596215085423053507939194493 * 0.75, 1e-6);
    fs[1].factors[0] = AxisFactor::pow(-1.0);
    EXPECT_THROW(eval_lambda_form(s, fs, QuadratureSpec{}), input_error);
}

TEST(Quadrature, UnderResolvedRunIsFlagged)
{
    const QuadratureSpec spec{2000.0, 2, 2, 4};
    const auto r = eval_lambda_form(Phase::from_terms(2, {{{1, 1}, 1.0}, {{2, 1}, 1.0}}), constant_test_functions(2), spec);
    EXPECT_FALSE(r.converged);
}

TEST(Quadrature, PanelInvariant)
{
    for (double l : {16.0, 256.0, 4096.0}) {
        const auto fs = constant_test_functions(3);
        const auto spec = auto_quadrature_spec(xyz, l, fs);
        EXPECT_GE(spec.panels_per_axis, static_cast<int>(std::ceil(l / (2 * std::numbers::pi))) * 4);
        EXPECT_GE(spec.oversample, 4);
    }
}

TEST(Quadrature, DimensionLimits)
{
    const auto fs4 = constant_test_functions(4);
    EXPECT_NO_THROW(eval_lambda_form(Phase::monomial({1, 1, 1, 1}), fs4, QuadratureSpec{1.0, 2, 4, 4}));
    EXPECT_THROW(eval_lambda_form(Phase::from_terms(4, {{{1, 1, 1, 1}, 1.0}, {{2, 1, 1, 1}, 1.0}}), fs4, QuadratureSpec{}),
                 input_error);
    EXPECT_THROW(eval_lambda_form(Phase::monomial({1, 1, 1, 1, 1}), constant_test_functions(5), QuadratureSpec{}),
                 input_error);
}

TEST(Quadrature, NormsInClosedForm)
{
    TestFunction f{std::vector<AxisFactor>(3)};
    f.factors[1] = AxisFactor::box(0.25);
    f.factors[2] = AxisFactor::box(0.5);
    EXPECT_NEAR(lp_norm(f, 0, Rational(2)), std::sqrt(0.125), 1e-15);
    EXPECT_NEAR(lp_norm(f, 0, std::nullopt), 1.0, 0);
    f.factors[1] = AxisFactor::pow(1.0);
    EXPECT_NEAR(lp_norm(f, 0, Rational(1)), 0.5 * 0.5, 1e-15);
    // Off-diagonal instance: exponent -5/8 in lambda for (4,4,2).
    const double a = norm_product(off_diagonal_test_functions(3, 256), ExponentTuple::parse("4,4,2"));
    EXPECT_NEAR(a, std::pow(256.0, -5.0 / 8), 1e-15);
}

// Values frozen from mpmath direct summation (tests/oracles).
TEST(Dyadic, MatchesDirectSummation)
{
    struct Case {
        DyadicSumInput in;
        double at6, at10;
    };
    const Case cases[] = {
        {{{{1, 1, 1}}, {1, 1, 1}, 1, 4}, 4.66244205783563, 2.58930839454106},
        {{{{1, 1, 1}}, {0.25, 0.25, 0.25}, 4, 4}, 75.9104707330962, 118.644018018476},
        {{{{4, 1, 1}, {1, 1, 4}}, {1, 1, 1}, 2.5, 4}, 3.92680188851235, 2.60205255124282},
        {{{{8, 2, 5}, {2, 8, 5}}, {1, 1, 1}, 5, 4}, 3.9869299888134, 2.93067837697081},
    };
    for (const auto& c : cases) {
        EXPECT_NEAR(dyadic_min_sum(c.in, lam(6)), c.at6, 1e-11 * c.at6);
        EXPECT_NEAR(dyadic_min_sum(c.in, lam(10)), c.at10, 1e-11 * c.at10);
    }
}

TEST(Dyadic, CriticalEnvelopeBounded)
{
    const DyadicSumInput in{{{1, 1, 1}}, {0.25, 0.25, 0.25}, 4, 4};
    for (int m = 6; m <= 20; ++m) {
        const double r = dyadic_min_sum(in, lam(m)) / (std::pow(lam(m), -0.25) * std::pow(m, 3));
        EXPECT_GE(r, 1.0 / 64);
        EXPECT_LE(r, 64.0);
    }
}

TEST(Dyadic, UnitVertexIsOrderLambdaToMinusQuarter)
{
    const DyadicSumInput in{{{1, 1, 1}}, {1, 1, 1}, 1, 4};
    for (int m = 6; m <= 20; m += 2) {
        const double r = dyadic_min_sum(in, lam(m)) * std::pow(lam(m), 0.25);
        EXPECT_GT(r, 1.0);
        EXPECT_LT(r, 16.0);
    }
}

TEST(Dyadic, InteriorPointsDoNotChangeTheSum)
{
    // Vertex-only evaluation equals evaluation over a dense sample of N(S).
    DyadicSumInput in{{{4, 1, 1}, {1, 1, 4}}, {1, 1, 1}, 2.5, 4};
    DyadicSumInput dense = in;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 40; ++i) {
        const double t = u(rng);
        dense.vertices.push_back({4 - 3 * t + 2 * u(rng), 1 + u(rng), 1 + 3 * t + u(rng)});
    }
    for (int m : {6, 9, 12}) EXPECT_EQ(dyadic_min_sum(in, lam(m)), dyadic_min_sum(dense, lam(m)));
}

TEST(Dyadic, PermutationInvariant)
{
    const DyadicSumInput a{{{4, 1, 2}, {1, 3, 4}}, {1, 0.5, 0.75}, 3, 4};
    const DyadicSumInput b{{{2, 4, 1}, {4, 1, 3}}, {0.75, 1, 0.5}, 3, 4};
    for (int m : {6, 10, 14}) EXPECT_NEAR(dyadic_min_sum(a, lam(m)), dyadic_min_sum(b, lam(m)), 1e-12);
}

// The untruncated sum is nonincreasing in lambda (only the lambda^(-1/gamma) branch
// moves). Holding the truncation fixed isolates that property.
TEST(Dyadic, NonincreasingAtFixedTruncation)
{
    const DyadicSumInput cases[] = {
        {{{1, 1, 1}}, {1, 1, 1}, 1, 4},
        {{{4, 1, 1}, {1, 1, 4}}, {1, 1, 1}, 2.5, 4},
        {{{8, 2, 5}, {2, 8, 5}}, {1, 1, 1}, 5, 4},
    };
    for (const auto& in : cases) {
        auto fixed = [&](int m) {
            std::vector<double> c;
            for (double ck : dyadic_cutoffs(in)) c.push_back(ck * 24.0 / m);
            return dyadic_min_sum(in, lam(m), c);
        };
        double prev = fixed(6);
        for (int m = 7; m <= 20; ++m) {
            const double cur = fixed(m);
            EXPECT_LE(cur, prev * (1 + 1e-12)) << "m=" << m;
            prev = cur;
        }
    }
}

// With the lambda-dependent cutoffs new terms enter whenever some ceil(c_k log2 lambda)
// steps up, so the truncated sum can rise; it stays within the discarded tail of the
// fixed-truncation sum, d lambda^(-1/delta) prod_k 1/(1 - 2^-v_k).
TEST(Dyadic, TruncationWithinTailBound)
{
    const DyadicSumInput in{{{8, 2, 5}, {2, 8, 5}}, {1, 1, 1}, 5, 4};
    bool rose = false;
    double prev = dyadic_min_sum(in, lam(6));
    for (int m = 6; m <= 20; ++m) {
        std::vector<double> c;
        for (double ck : dyadic_cutoffs(in)) c.push_back(ck * 60.0 / m);
        const double full = dyadic_min_sum(in, lam(m), c);
        const double trunc = dyadic_min_sum(in, lam(m));
        double geom = 3.0 * std::pow(lam(m), -1.0 / in.delta);
        for (double vk : in.v) geom /= 1 - std::pow(2.0, -vk);
        EXPECT_LE(trunc, full * (1 + 1e-12));
        EXPECT_LE(full - trunc, geom);
        rose = rose || trunc > prev;
        prev = trunc;
    }
    EXPECT_TRUE(rose);
}

TEST(Dyadic, Errors)
{
    EXPECT_THROW(dyadic_min_sum(DyadicSumInput{{}, {1, 1, 1}, 1, 4}, 16), input_error);
    EXPECT_THROW(dyadic_min_sum(DyadicSumInput{{{1, 1, 1}}, {1, 1, 1}, 1, 4}, 1.5), input_error);
}

TEST(TailBound, Examples)
{
    auto t = tail_bound_check(1, 1, 10);
    EXPECT_DOUBLE_EQ(t.tail, std::ldexp(1.0, -9));
    EXPECT_DOUBLE_EQ(t.ratio, 2.0);
    EXPECT_TRUE(t.within);
    t = tail_bound_check(4, Rational(1, 4), 10);
    EXPECT_NEAR(t.bound, 1.0 / (1.0 - std::pow(2.0, -0.25)), 1e-12);
    EXPECT_LE(t.ratio, t.bound * (1 + 1e-15));
    t = tail_bound_check(3, Rational(2, 3), 1);
    EXPECT_TRUE(std::isfinite(t.ratio));
    EXPECT_TRUE(t.within);
}

TEST(TailBound, NeverExceedsGeometricBound)
{
    for (int a = 1; a <= 5; ++a)
        for (int b = 1; b <= 5; ++b)
            for (int m : {1, 7}) {
                const Rational delta(a + 1, 2), v(b, 4);
                const auto t = tail_bound_check(delta, v, m);
                EXPECT_TRUE(t.within);
                EXPECT_LE(t.ratio, t.bound * (1 + 1e-15));
            }
}

TEST(Sublevel, MonteCarloAgreesWithClosedForm)
{
    const std::vector<double> eps{1.0 / 16, 1.0 / 256, 1.0 / 4096};
    const auto mc = sublevel_monte_carlo(xyz, eps, 1'000'000, 2024);
    for (const auto& v : mc) {
        EXPECT_FALSE(v.inconclusive);
        EXPECT_LE(std::abs(v.estimate - xyz_sublevel_volume(v.epsilon)), 3 * v.error);
    }
    // Closed form frozen from sympy's iterated integral (tests/oracles).
    EXPECT_NEAR(xyz_sublevel_volume(1.0 / 16), 0.476013302099087, 1e-14);
    EXPECT_NEAR(xyz_sublevel_volume(1.0 / 4096), 0.0107203083908276, 1e-15);
}

TEST(Sublevel, MonteCarloIsDeterministic)
{
    const auto a = sublevel_monte_carlo(xyz, {0.01}, 100000, 7);
    const auto b = sublevel_monte_carlo(xyz, {0.01}, 100000, 7);
    const auto c = sublevel_monte_carlo(xyz, {0.01}, 100000, 8);
    EXPECT_EQ(a[0].estimate, b[0].estimate);
    EXPECT_NE(a[0].estimate, c[0].estimate);
    EXPECT_EQ(uniform01(7, 123), uniform01(7, 123));
}

TEST(Sublevel, GridAndMonteCarloAgree)
{
    const auto s = Phase::from_terms(3, {{{1, 1, 1}, 1.0}, {{2, 1, 1}, 0.5}});
    const std::vector<double> eps{1.0 / 8, 1.0 / 32};
    const auto mc = sublevel_monte_carlo(s, eps, 400000, 3);
    const auto grid = sublevel_grid(s, eps, 120);
    for (std::size_t i = 0; i < eps.size(); ++i)
        EXPECT_LE(std::abs(mc[i].estimate - grid[i].estimate), 3 * (mc[i].error + grid[i].error));
    const auto g = sublevel_grid(xyz, {1.0 / 16}, 100);
    EXPECT_LE(std::abs(g[0].estimate - xyz_sublevel_volume(1.0 / 16)), g[0].error);
}

TEST(Sublevel, WholeBoxAtEpsOne)
{
    const auto s = Phase::from_terms(3, {{{1, 1, 1}, 0.5}, {{2, 1, 1}, 0.25}});
    EXPECT_EQ(sublevel_monte_carlo(s, {1.0}, 10000, 1)[0].estimate, 1.0);
    EXPECT_DOUBLE_EQ(sublevel_grid(s, {1.0}, 10)[0].estimate, 1.0);
}

// The volume is sqrt(eps) (1 + L/2 + L^2/8), L = log(1/eps); the fit uses the leading log
// power 2 of that closed form.
TEST(Sublevel, SquaredMonomialExponent)
{
    std::vector<double> eps;
    for (int k = 8; k <= 24; k += 2) eps.push_back(std::ldexp(1.0, -k));
    const auto mc = sublevel_monte_carlo(Phase::monomial({2, 2, 2}), eps, 1'000'000, 5);
    std::vector<std::pair<double, double>> pts;
    for (const auto& v : mc) pts.emplace_back(1 / v.epsilon, v.estimate);
    const auto fit = rate_fit(pts, {2});
    EXPECT_GE(fit.rate, 0.45);
    EXPECT_LE(fit.rate, 0.55);
}

TEST(Sublevel, TooFewSamplesIsInconclusive)
{
    const auto v = sublevel_monte_carlo(xyz, {1e-6}, 100, 1);
    EXPECT_TRUE(v[0].inconclusive);
    EXPECT_GE(v[0].error, xyz_sublevel_volume(1e-6));
    EXPECT_THROW(sublevel_monte_carlo(xyz, {0.0}, 100, 1), input_error);
}

TEST(RateFit, PurePower)
{
    const auto f = rate_fit(synthetic(4, 12, 0.25, 0), {0, 1, 2, 3});
    EXPECT_NEAR(f.rate, 0.25, 1e-10);
    EXPECT_EQ(f.log_power, 0);
    EXPECT_LT(f.residual, 1e-10);
}

TEST(RateFit, PowerTimesLogCubed)
{
    const auto f = rate_fit(synthetic(6, 20, 0.25, 3), {0, 1, 2, 3});
    EXPECT_NEAR(f.rate, 0.25, 1e-10);
    EXPECT_EQ(f.log_power, 3);
    EXPECT_LT(f.residual, 1e-10);
    EXPECT_NEAR(f.constant, 3.0, 1e-8);
}

TEST(RateFit, NoisyData)
{
    auto pts = synthetic(4, 16, 0.5, 0);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (auto& [t, v] : pts) v *= 1 + u(rng);
    EXPECT_NEAR(rate_fit(pts).rate, 0.5, 0.03);
}

TEST(RateFit, Errors)
{
    EXPECT_THROW(rate_fit(synthetic(4, 6, 0.25, 0)), input_error);
    auto pts = synthetic(4, 10, 0.25, 0);
    pts[2].second = 0;
    EXPECT_THROW(rate_fit(pts), input_error);
}

TEST(Experiment, JsonLinesRoundTrip)
{
    const std::vector<ExperimentRecord> rs{{"sharpness", "lambda", 16, 0.0625, 1e-9, true},
                                           {"sublevel", "epsilon", 0.125, 0.5, 1e-3, false}};
    std::stringstream ss;
    write_records(ss, rs);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')),
              R"({"converged":true,"error":1e-09,"experiment":"sharpness","lambda":16.0,"value":0.0625})");
    const auto back = read_records(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].variable, "epsilon");
    EXPECT_EQ(back[1].x, 0.125);
    EXPECT_FALSE(back[1].converged);
}

TEST(Experiment, MalformedLinesAreReported)
{
    std::stringstream ss("{\"experiment\":\"x\",\"lambda\":2,\"value\":1,\"error\":0,\"converged\":true}\nnot json\n");
    try {
        read_records(ss);
        FAIL();
    } catch (const input_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    std::stringstream missing("{\"experiment\":\"x\",\"lambda\":2,\"error\":0,\"converged\":true}\n");
    EXPECT_THROW(read_records(missing), input_error);
}
