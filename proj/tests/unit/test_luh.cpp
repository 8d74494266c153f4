#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lindyn/luh.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace lindyn;
using namespace lindyn::luh;
using lindyn::testing::random_poly;
using lindyn::testing::uniform;
using lindyn::testing::uniform_int;

namespace {

constexpr double kPi = std::numbers::pi;

LuhTask small_task(std::vector<ComplexPoly> targets, std::vector<int> orders) {
    LuhTask t;
    t.domain = PlanarDomain::right_half_plane();
    t.phi = SelfMap::translation(1.0);
    t.targets = std::move(targets);
    t.compacts = {CompactSet::disk(2.0, 0.5)};
    t.orders = std::move(orders);
    t.tolerances = {0.1};
    return t;
}

// sup over the boundary of |h^(j)(z + n) - f(z)| with quadrature calculus; the error is
// holomorphic, so the boundary carries its maximum.
double oracle_error(const ComplexPoly& h, const ComplexPoly& f, const CompactSet& K, int j, std::int64_t n,
                    int density) {
    const auto q = oracle::gauss_legendre(std::max(64, h.degree() / 2 + 8));
    const auto Kd = K.with_density(K.boundary_samples() * density);
    auto hv = [&](cplx z) { return h(z); };
    double err = 0.0;
    for (int i = 0; i < Kd.boundary_samples(); ++i) {
        const cplx z = Kd.samples()[static_cast<std::size_t>(i)];
        const cplx v = oracle::order_value(hv, z + static_cast<double>(n), j, q, 0.25, h.degree() + 64);
        err = std::max(err, std::abs(v - f(z)));
    }
    return err;
}

}  // namespace

TEST(LuhSchedule, WorkedValues) {
    EXPECT_NEAR(schedule_epsilon(1, 1.0, 4.0 * kPi, 0.4), 0.01, 1e-15);
    EXPECT_NEAR(schedule_epsilon_direct(1, 1.0, 4.0 * kPi, 0.4), 0.01, 1e-15);
    // Second branch: 0.3^4 / (4! 2^5 2) = 0.0081 / 1536.
    const double e2 = schedule_epsilon(2, 0.5, 8.0 * kPi, 0.3);
    EXPECT_NEAR(e2, 0.0081 / 1536.0, 1e-18);
    EXPECT_NEAR(e2, 5.273e-6, 5e-10);
    // First branch alone: 2 pi 0.5^4 / (3! 8 pi 4) = 6.510e-4 exceeds it.
    EXPECT_NEAR(2.0 * kPi * std::pow(0.5, 4) / (6.0 * 8.0 * kPi * 4.0), 6.510e-4, 1e-7);
}

TEST(LuhSchedule, LogFormMatchesDirectForm) {
    for (int trial = 0; trial < 200; ++trial) {
        const int n = uniform_int(1, 8);
        const double d = uniform(0.05, 1.0), L = uniform(1.0, 100.0), r = uniform(0.01, 0.99) / n;
        const double a = schedule_epsilon(n, d, L, r), b = schedule_epsilon_direct(n, d, L, r);
        EXPECT_GT(a, 0.0);
        EXPECT_LE(std::abs(a - b), 1e-9 * b);
        EXPECT_NEAR(schedule_log_epsilon(n, d, L, r), std::log(b), 1e-9);
    }
    EXPECT_THROW(schedule_epsilon_direct(90, 1.0, 10.0, 0.001), std::range_error);
    // eps_90 itself is ~e^-2000 and underflows; the log form stays finite and matches a
    // term-by-term sum of logarithms.
    double t1 = std::log(2.0 * kPi) - std::log(10.0) - 2.0 * std::log(90.0);
    double t2 = 180.0 * std::log(0.001) - 181.0 * std::log(2.0) - std::log(90.0);
    for (int k = 2; k <= 179; ++k) t1 -= std::log(static_cast<double>(k));
    for (int k = 2; k <= 180; ++k) t2 -= std::log(static_cast<double>(k));
    EXPECT_NEAR(schedule_log_epsilon(90, 1.0, 10.0, 0.001), std::min(t1, t2), 1e-9 * std::abs(std::min(t1, t2)));
}

TEST(LuhSchedule, ChainInvariants) {
    for (const auto& dom : {PlanarDomain::right_half_plane(), PlanarDomain::open_disk({0.0, 1.0}, 3.0)}) {
        const auto ch = make_disk_chain(dom, 10);
        ASSERT_EQ(ch.stages(), 10);
        EXPECT_EQ(ch.d[0], 1.0);
        for (int n = 1; n <= 10; ++n) {
            EXPECT_GT(ch.d[n], 0.0);
            EXPECT_LE(ch.d[n], 1.0);
            EXPECT_GT(ch.eps[n - 1], 0.0);
            EXPECT_LT(ch.r[n - 1], 1.0 / n);
            EXPECT_NEAR(ch.L[n - 1], 2.0 * kPi * ch.G[n - 1].radius(), 1e-12);
            const auto& a = ch.G[n - 1];
            const auto& b = ch.G[n];
            EXPECT_LT(std::abs(a.center() - b.center()) + a.radius(), b.radius());
            EXPECT_TRUE(dom.contains(b, 0.0));
            EXPECT_NEAR(ch.eps[n - 1], schedule_epsilon(n, ch.d[n - 1], ch.L[n - 1], ch.r[n - 1]), 1e-15);
        }
    }
}

TEST(LuhSchedule, ShortExhaustionIsInfeasible) {
    const auto dom = PlanarDomain::right_half_plane().with_exhaustion(
        {CompactSet::disk(2.0, 0.5), CompactSet::disk(3.0, 1.5)});
    try {
        make_disk_chain(dom, 5);
        FAIL() << "chain longer than the exhaustion must be refused";
    } catch (const InfeasibleChain& e) {
        EXPECT_EQ(e.stage(), 3);
    }
}

TEST(LuhMergelyan, ReproducesPolynomialTargets) {
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_poly(uniform_int(0, 12));
        const auto f = holo::as_evaluable(p);
        const auto A = CompactSet::disk(0.0, 0.5), B = CompactSet::disk(3.0, 0.5);
        // Degree-12 targets reach ~1e6 on B, so the tolerance scales with the target.
        const double tol = 1e-12 * std::max(holo::sup_norm_on(f, A), holo::sup_norm_on(f, B));
        const auto r = mergelyan_fit(A, f, B, f, tol, 40);
        EXPECT_LT(r.residual_A, tol);
        EXPECT_LT(r.residual_B, tol);
        EXPECT_LE(r.degree, p.degree());
    }
}

TEST(LuhMergelyan, SeparatedStepFunction) {
    // Dense column-pivoted QR on shifted monomials over the same samples first reaches the
    // tolerance at degree 21 with max residual 6.449e-4.
    const auto r = mergelyan_fit(CompactSet::disk(0.0, 0.5), [](cplx) { return cplx{}; },
                                 CompactSet::disk(3.0, 0.5), [](cplx) { return cplx{1.0}; }, 1e-3, 60);
    EXPECT_EQ(r.degree, 21);
    EXPECT_LE(r.degree, 40);
    EXPECT_NEAR(std::max(r.residual_A, r.residual_B), 6.449e-4, 1e-7);
}

TEST(LuhMergelyan, OverlappingDisagreementFails) {
    try {
        mergelyan_fit(CompactSet::disk(0.0, 1.0), [](cplx) { return cplx{}; }, CompactSet::disk(0.5, 1.0),
                      [](cplx) { return cplx{1.0}; }, 1e-3, 30);
        FAIL() << "inconsistent constraints must not fit";
    } catch (const fit::FitFailure& e) {
        EXPECT_GE(e.best_residual(), 0.5 - 1e-9);
    }
}

TEST(LuhTaskValidation, NamesTheField) {
    auto t = small_task({ComplexPoly({1.0})}, {0});
    EXPECT_NO_THROW(t.validate());
    auto bad = t;
    bad.compacts = {CompactSet::disk(-3.0, 0.5)};
    try {
        bad.validate();
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_EQ(std::string(e.what()).rfind("compacts[0]", 0), 0u) << e.what();
    }
    bad = t;
    bad.tolerances = {0.1, 0.2};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = t;
    bad.targets.clear();
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(LuhRequirements, DiagonalEnumeration) {
    auto t = small_task({ComplexPoly({1.0}), ComplexPoly({0.0, 1.0})}, {-1, 0, 1});
    const auto reqs = enumerate_requirements(t);
    ASSERT_EQ(reqs.size(), 6u);
    EXPECT_EQ(reqs[0].target, 0);
    EXPECT_EQ(reqs[0].order, 0);
    for (const auto& r : reqs) EXPECT_EQ(r.eps, 0.1);
    for (std::size_t a = 0; a < reqs.size(); ++a)
        for (std::size_t b = a + 1; b < reqs.size(); ++b) EXPECT_FALSE(reqs[a] == reqs[b]);
}

TEST(LuhPlan, SmallestFreshIndex) {
    auto t = small_task({ComplexPoly({1.0})}, {0, 1});
    t.params.enlarge = 0.0;
    t.params.placement_gap = 0.0;
    auto st = initial_state(t, make_disk_chain(t.domain, 4));
    Placement prior{1, 0, 0, 2, {CompactSet::disk(4.0, 0.5)}};
    st.placements.push_back(prior);
    const auto plan = plan_stage(st, t, Requirement{0, 1, 0, 0, 0.1}, {1});
    ASSERT_EQ(plan.placements.size(), 1u);
    EXPECT_EQ(plan.placements[0].index, 3);
    EXPECT_EQ(plan.stage, 2);
}

TEST(LuhPlan, PlacesTwoNPlusOneDisjointDisks) {
    auto t = small_task({ComplexPoly({1.0}), ComplexPoly({0.0, 1.0})}, {-2, -1, 0, 1, 2});
    auto st = initial_state(t, make_disk_chain(t.domain, 4));
    const auto p1 = plan_stage(st, t, Requirement{0, 0, 0, 0, 0.1});
    EXPECT_EQ(p1.stage, 1);
    EXPECT_EQ(p1.placements.size(), 3u);
    st = with_plan(st, p1);
    const auto p2 = plan_stage(st, t, Requirement{1, 0, 0, 0, 0.1});
    EXPECT_EQ(p2.stage, 2);
    ASSERT_EQ(p2.placements.size(), 5u);
    EXPECT_EQ(p2.separations.size(), 10u);
    for (double s : p2.separations) EXPECT_GT(s, 0.0);
    std::int64_t prev = p1.placements.back().index;
    for (const auto& p : p2.placements) {
        EXPECT_GT(p.index, prev);
        prev = p.index;
    }
}

TEST(LuhBuild, ZeroTargetsGiveZero) {
    const auto t = small_task({ComplexPoly()}, {-1, 0, 1});
    const auto run = run_luh(t, make_disk_chain(t.domain, 4), 10);
    EXPECT_TRUE(run.h.is_zero());
    EXPECT_TRUE(run.certificate.complete());
    for (const auto& e : run.certificate.entries) EXPECT_EQ(e.error, 0.0);
    for (const auto& r : run.state.records) EXPECT_EQ(r.correction_sup, 0.0);
}

TEST(LuhBuild, StagesAccumulateExactly) {
    const auto t = small_task({ComplexPoly({1.0}), ComplexPoly({0.0, 1.0})}, {0});
    auto st = initial_state(t, make_disk_chain(t.domain, 4));
    const auto p1 = plan_stage(st, t, Requirement{0, 0, 0, 0, 0.1});
    st = build_stage(st, p1, t);
    const auto p2 = plan_stage(st, t, Requirement{1, 0, 0, 0, 0.1});
    st = build_stage(st, p2, t);
    ASSERT_EQ(st.records.size(), 2u);
    const auto sum = st.records[0].correction + st.records[1].correction;
    for (auto z : {cplx{2.0}, cplx{7.5, 1.0}, cplx{30.0, -2.0}})
        EXPECT_LE(std::abs(sum(z) - st.h_partial(z)), 1e-12 * std::max(1.0, std::abs(sum(z))));
    // Stage 1 is exempt from the 2/n^2 bound but stays below 2.
    EXPECT_LT(st.records[0].correction_sup, 2.0);
    EXPECT_LE(st.records[1].correction_sup, 2.0 / 4.0);
    EXPECT_THROW(build_stage(st, p1, t), std::invalid_argument);
}

TEST(LuhBuild, SixRequirementsMetAndIndependentlyVerified) {
    const auto t = small_task({ComplexPoly({1.0}), ComplexPoly({0.0, 1.0})}, {-1, 0, 1});
    const auto run = run_luh(t, make_disk_chain(t.domain, 6), 20);
    ASSERT_EQ(run.certificate.entries.size(), 6u);
    EXPECT_TRUE(run.certificate.complete());
    for (const auto& e : run.certificate.entries) {
        EXPECT_TRUE(e.met);
        EXPECT_LT(e.error, 0.3);
        ASSERT_TRUE(e.dense_error.has_value());
        const auto& K = t.compacts[static_cast<std::size_t>(e.requirement.compact)];
        const auto& f = t.targets[static_cast<std::size_t>(e.requirement.target)];
        const double ref = oracle_error(run.h, f, K, e.requirement.order, e.witness, 10);
        EXPECT_LT(ref, 0.3);
        EXPECT_LE(std::abs(ref - e.error), 0.2 * std::max(e.error, 1e-12) + 1e-12);
    }
    for (const auto& r : run.state.records)
        if (r.stage >= 2) EXPECT_LE(r.correction_sup, 2.0 / (r.stage * r.stage));
}

TEST(LuhBuild, PlainUniversalFunction) {
    const auto t = small_task({ComplexPoly({1.0}), ComplexPoly({0.0, 1.0}), ComplexPoly({0.0, 0.0, 1.0})}, {0});
    const auto run = run_luh(t, make_disk_chain(t.domain, 6), 20);
    ASSERT_EQ(run.certificate.entries.size(), 3u);
    for (const auto& e : run.certificate.entries) {
        EXPECT_LT(e.error, 0.3);
        const auto& f = t.targets[static_cast<std::size_t>(e.requirement.target)];
        EXPECT_LT(oracle_error(run.h, f, t.compacts[0], 0, e.witness, 10), 0.3);
    }
}

TEST(LuhBuild, DeterministicH) {
    const auto t = small_task({ComplexPoly({1.0}), ComplexPoly({0.0, 1.0})}, {-1, 0, 1});
    const auto ch = make_disk_chain(t.domain, 6);
    const auto a = run_luh(t, ch, 20), b = run_luh(t, ch, 20);
    EXPECT_TRUE(a.h == b.h);
}

TEST(LuhBuild, BudgetExhaustionReportsUnmet) {
    const auto t = small_task({ComplexPoly({1.0}), ComplexPoly({0.0, 1.0})}, {-1, 0, 1});
    const auto run = run_luh(t, make_disk_chain(t.domain, 6), 1);
    EXPECT_FALSE(run.certificate.complete());
    EXPECT_FALSE(run.certificate.unmet().empty());
    EXPECT_EQ(run.certificate.stages_run, 1);
}

TEST(LuhProperty, DerivativeCommutesWithTranslation) {
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_poly(uniform_int(1, 20));
        const cplx b = lindyn::testing::random_complex(5.0);
        const auto lhs = holo::derivative(holo::compose_affine(p, 1.0, b), 1);
        const auto rhs = holo::compose_affine(holo::derivative(p, 1), 1.0, b);
        EXPECT_TRUE(lhs == rhs);
    }
}

TEST(LuhDense, Examples) {
    const auto dom = PlanarDomain::right_half_plane();
    const auto f0 = ComplexPoly({0.5, -1.0, 0.25});
    const auto zero = ComplexPoly();
    const auto a = dense_approx(f0, zero, dom, 0.2);
    EXPECT_LT(holo::frechet_distance(holo::as_evaluable(a.f), holo::as_evaluable(zero), dom).value, 0.2);

    const auto g = ComplexPoly({1.0, 2.0, 0.0, -1.0});
    const auto b = dense_approx(f0, g, dom, 0.5);
    EXPECT_LT(b.d_delta_f0, 0.25);
    EXPECT_LE(b.d_f_g, b.d_delta_f0 + 1e-12);
    EXPECT_LT(b.d_f_g, 0.5);

    // Constant 1: d(delta) = delta / (1 + delta) up to truncation, so delta near 0.005.
    const auto c = dense_approx(ComplexPoly({1.0}), zero, dom, 0.01);
    EXPECT_LE(c.delta, 0.01);
    EXPECT_LT(c.d_delta_f0, 0.005);
    EXPECT_NEAR(c.delta / (1.0 + c.delta), 0.005, 1e-8);
}

TEST(LuhDense, RandomTargets) {
    const auto dom = PlanarDomain::right_half_plane();
    const auto f0 = random_poly(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_poly(uniform_int(0, 4));
        const double eps = uniform(0.01, 0.5);
        const auto r = dense_approx(f0, g, dom, eps);
        const double d = holo::frechet_distance(holo::as_evaluable(r.f), holo::as_evaluable(g), dom).value;
        EXPECT_LT(d, eps);
    }
}
