#include <gtest/gtest.h>

#include <cmath>

#include "lindyn/cosine.hpp"
#include "support/grid_random.hpp"
#include "support/oracles.hpp"

using namespace lindyn;
using namespace lindyn::cosine;
using lindyn::testing::abs_of;
using lindyn::testing::max_rel_diff;
using lindyn::testing::max_scaled_diff;
using lindyn::testing::random_cells_per_unit;
using lindyn::testing::random_grid_function;
using lindyn::testing::random_spec;
using lindyn::testing::random_weight;
using lindyn::testing::shifted;
using lindyn::testing::uniform;
using lindyn::testing::uniform_int;

namespace {

std::vector<int> one_to(int n) {
    std::vector<int> v;
    for (int k = 1; k <= n; ++k) v.push_back(k);
    return v;
}

const Weight kExample = example_weight(4.0, 1.0);

}  // namespace

TEST(CosineGrid, IndicatorAndMass) {
    const auto chi = GridFunction::indicator(0.0, 1.0);
    EXPECT_EQ(chi.start(), 0);
    EXPECT_EQ(chi.size(), 16u);
    EXPECT_EQ(chi.at(0.0), 1.0);
    EXPECT_EQ(chi.at(0.999), 1.0);
    EXPECT_EQ(chi.at(1.0), 0.0);
    EXPECT_EQ(GridFunction::unit_mass(1.0).start(), 16);
    EXPECT_THROW(GridFunction(0), std::invalid_argument);
    EXPECT_TRUE(GridFunction::indicator(2.0, 1.0).support().empty());
}

TEST(CosineWeight, ExampleBranches) {
    EXPECT_EQ(kExample(-1.0), 4.0);
    EXPECT_EQ(kExample(0.0), 3.0);
    EXPECT_EQ(kExample(1.0), 2.0);
    EXPECT_EQ(kExample.left_limit(1.0), 2.0);
    EXPECT_EQ(kExample.left_limit(-1.0), 4.0);
    for (double t = -7.0; t <= 7.0; t += 0.0625) EXPECT_DOUBLE_EQ(kExample(t), oracle::example_weight(4.0, 1.0, t));
    EXPECT_NO_THROW(example_weight(4.0, 1.0));
    EXPECT_THROW(example_weight(3.0, 1.0), std::invalid_argument);
    EXPECT_THROW(example_weight(10.0, 0.5), std::invalid_argument);
    EXPECT_EQ(kExample.w_min(), 2.0);
    EXPECT_EQ(kExample.w_max(), 4.0);
}

TEST(CosineWeight, JumpIsRightContinuous) {
    const auto w = Weight::piecewise_linear({0.0, 0.0}, {1.0, 5.0});
    EXPECT_EQ(w(-0.5), 1.0);
    EXPECT_EQ(w(0.0), 5.0);
    EXPECT_EQ(w.left_limit(0.0), 1.0);
    EXPECT_THROW(Weight::piecewise_linear({0.0}, {0.0}), std::invalid_argument);
    EXPECT_THROW(Weight::piecewise_linear({1.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST(CosineOperators, Examples) {
    const auto one = Weight::constant(1.0);
    EXPECT_EQ(apply_T(GridFunction::indicator(0.0, 1.0), one), GridFunction::indicator(1.0, 2.0));
    EXPECT_EQ(apply_S(GridFunction::indicator(1.0, 2.0), one), GridFunction::indicator(0.0, 1.0));
    EXPECT_TRUE(apply_T(GridFunction(), kExample).support().empty());

    const auto Tm = apply_T(GridFunction::unit_mass(0.0), kExample);
    EXPECT_EQ(Tm, GridFunction::unit_mass(1.0) * 2.0);
    EXPECT_EQ(apply_S(GridFunction::unit_mass(1.0) * 2.0, kExample), GridFunction::unit_mass(0.0));
    EXPECT_EQ(power_T(GridFunction::unit_mass(0.0), kExample, 2), GridFunction::unit_mass(2.0) * 4.0);

    const auto f = random_grid_function(16);
    EXPECT_EQ(power_T(f, kExample, 1), apply_T(f, kExample));
    EXPECT_EQ(power_S(f, kExample, 1), apply_S(f, kExample));
    const auto c = Weight::constant(1.5);
    EXPECT_LT(max_rel_diff(power_T(f, c, 7), shifted(f, 7 * 16) * std::pow(1.5, 7)), 1e-15);
}

TEST(CosineOperators, CosineStepAverages) {
    const auto f = random_grid_function(8);
    const auto w = random_weight();
    const auto c = cosine_step(f, w, 3);
    EXPECT_LT(max_rel_diff(c, (power_T(f, w, 3) + power_S(f, w, 3)) * 0.5), 1e-15);
}

TEST(CosineOperators, OverflowIsReported) {
    EXPECT_THROW(power_T(GridFunction::unit_mass(0.0), Weight::constant(1e10), 40), std::overflow_error);
    EXPECT_THROW(power_S(GridFunction::unit_mass(0.0), Weight::constant(1e10), 40), std::overflow_error);
}

TEST(CosineProperty, InversePairAndPowers) {
    for (int trial = 0; trial < 100; ++trial) {
        const int m = random_cells_per_unit();
        const auto f = random_grid_function(m);
        const auto w = random_weight();
        EXPECT_LT(max_rel_diff(apply_S(apply_T(f, w), w), f), 1e-12);
        EXPECT_LT(max_rel_diff(apply_T(apply_S(f, w), w), f), 1e-12);
        const int n = uniform_int(1, 30);
        GridFunction t = f, s = f;
        for (int i = 0; i < n; ++i) {
            t = apply_T(t, w);
            s = apply_S(s, w);
        }
        EXPECT_LT(max_rel_diff(power_T(f, w, n), t), 1e-12);
        EXPECT_LT(max_rel_diff(power_S(f, w, n), s), 1e-12);
    }
}

TEST(CosineNorm, Examples) {
    const auto chi = GridFunction::indicator(0.0, 1.0);
    EXPECT_DOUBLE_EQ(norm(chi, NormSpec::lp(1.0)), 1.0);
    EXPECT_NEAR(norm(chi, NormSpec::orlicz_power(2.0)), 1.0, 1e-10);
    EXPECT_NEAR(norm(GridFunction::indicator(0.0, 2.0) * 3.0, NormSpec::lp(2.0)), 3.0 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(norm(GridFunction::indicator(0.0, 2.0) * 3.0, NormSpec::lp(2.0)), 4.2426, 1e-4);
    EXPECT_EQ(norm(chi * -7.0, NormSpec::sup()), 7.0);
    for (const auto& s : {NormSpec::lp(1.0), NormSpec::sup(), NormSpec::orlicz_power(2.0), NormSpec::orlicz_exp()})
        EXPECT_EQ(norm(GridFunction(), s), 0.0);
    // Luxemburg norm of chi_[0,1) under e^t - 1: (e^(1/l) - 1) = 1, so l = 1 / ln 2.
    EXPECT_NEAR(norm(chi, NormSpec::orlicz_exp()), 1.0 / std::log(2.0), 1e-10);
    EXPECT_THROW(NormSpec::lp(0.5), std::invalid_argument);
}

TEST(CosineProperty, NormAxioms) {
    for (int trial = 0; trial < 100; ++trial) {
        const int m = random_cells_per_unit();
        const auto f = random_grid_function(m);
        const auto spec = random_spec();
        // Solidity.
        auto g = f;
        std::vector<double> v = f.values();
        for (auto& x : v) x *= uniform(-1.0, 1.0);
        g = GridFunction(m, f.start(), v);
        EXPECT_LE(norm(g, spec), norm(f, spec)) << spec.name();
        // Translation invariance, exact.
        EXPECT_EQ(norm(shifted(f, m), spec), norm(f, spec)) << spec.name();
        EXPECT_EQ(norm(shifted(f, -m), spec), norm(f, spec)) << spec.name();
        // Homogeneity.
        const double c = uniform(0.01, 100.0);
        EXPECT_NEAR(norm(f * c, spec), c * norm(f, spec), 1e-12 * c * norm(f, spec)) << spec.name();
        // Orlicz t^p reduces to Lp.
        const double p = uniform(1.0, 4.0);
        const double lp = norm(f, NormSpec::lp(p));
        EXPECT_NEAR(norm(f, NormSpec::orlicz_power(p)), lp, 1e-9 * lp);
    }
}

TEST(CosineProperty, NormIdentities) {
    for (int trial = 0; trial < 50; ++trial) {
        const int m = random_cells_per_unit();
        const auto f = random_grid_function(m);
        const auto w = random_weight();
        const int n = uniform_int(1, 12);
        std::vector<double> back(f.size()), fwd(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double x = f.t(f.start() + static_cast<std::int64_t>(i));
            back[i] = f.values()[i] * weight_product(w, x, n, Direction::Backward);
            fwd[i] = f.values()[i] * weight_product(w, x, n, Direction::ForwardInverse);
        }
        const GridFunction Pb(m, f.start(), back), Pf(m, f.start(), fwd);
        for (const auto& spec : {NormSpec::lp(1.0), NormSpec::lp(2.0), NormSpec::sup(), NormSpec::orlicz_power(2.0)}) {
            const double a = norm(power_T(f, w, n), spec), b = norm(Pb, spec);
            EXPECT_NEAR(a, b, 1e-10 * b) << spec.name();
            const double c = norm(power_S(f, w, n), spec), d = norm(Pf, spec);
            EXPECT_NEAR(c, d, 1e-10 * d) << spec.name();
        }
    }
}

TEST(CosineProducts, Examples) {
    const auto one = Weight::constant(1.0);
    for (auto dir : {Direction::Backward, Direction::ForwardInverse})
        EXPECT_EQ(weight_product(one, uniform(-5.0, 5.0), uniform_int(1, 30), dir), 1.0);
    EXPECT_NEAR(weight_product(kExample, 0.0, 2, Direction::Backward), 4.0, 1e-14);
    EXPECT_NEAR(weight_product(kExample, 0.0, 2, Direction::ForwardInverse), 1.0 / 12.0, 1e-15);
    EXPECT_NEAR(weight_product(kExample, 0.0, 2, Direction::ForwardInverse), 0.08333, 1e-5);
}

TEST(CosineProducts, CellSupIsTheSupOverTheClosedCell) {
    // Knots at least 1/2 apart keep the log-product's curvature small enough for a fine scan
    // (plus the shifted knots, where the product has kinks) to pin the sup to 1e-6.
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> knots, values;
        double t = uniform(-4.0, -2.0);
        for (int i = uniform_int(1, 5); i > 0; --i, t += uniform(0.5, 2.0)) {
            knots.push_back(t);
            values.push_back(uniform(0.5, 3.0));
        }
        const auto w = Weight::piecewise_linear(knots, values);
        const int m = random_cells_per_unit(), n = uniform_int(1, 8);
        const std::int64_t cell = uniform_int(-5 * m, 5 * m);
        std::vector<double> kinks;
        for (double k : knots)
            for (int j = -n; j <= n; ++j) kinks.push_back(k + j);
        for (auto dir : {Direction::Backward, Direction::ForwardInverse}) {
            const double lib = cell_sup_product(w, cell, m, n, dir);
            const double a = static_cast<double>(cell) / m, b = static_cast<double>(cell + 1) / m;
            const double scan = oracle::product_scan([&](double s) { return w(s); }, a, b, n,
                                                     dir == Direction::Backward, 20000, kinks);
            EXPECT_GE(lib, scan * (1.0 - 1e-12));
            EXPECT_LE(lib, scan * (1.0 + 1e-6));
        }
    }
}

TEST(CosinePartition, BuiltInsSatisfyTheConstraints) {
    const CellSet K = GridInterval{-2.0, 2.0}.cells(4);
    EXPECT_EQ(K.size(), 16u);
    const auto pw = PartitionScheme::whole().at(1, 1, K, kExample, 4);
    EXPECT_EQ(pw.E, K);
    EXPECT_EQ(pw.F, K);
    EXPECT_TRUE(pw.D.empty());
    const auto pt = PartitionScheme::threshold().at(3, 3, K, kExample, 4);
    EXPECT_EQ(pt.E, K);
    EXPECT_EQ(pt.D.size() + pt.F.size(), K.size());
}

TEST(CosinePartition, ExplicitSetsAreValidated) {
    const CellSet K = GridInterval{0.0, 2.0}.cells(2);
    const auto good = PartitionScheme::explicit_sets({{{{0.0, 2.0}}, {{0.0, 1.0}}, {{1.0, 2.0}}}});
    EXPECT_NO_THROW(good.at(1, 1, K, kExample, 2));
    const auto overlap = PartitionScheme::explicit_sets({{{{0.0, 2.0}}, {{0.0, 1.5}}, {{1.0, 2.0}}}});
    EXPECT_THROW(overlap.at(1, 1, K, kExample, 2), std::invalid_argument);
    const auto outside = PartitionScheme::explicit_sets({{{{0.0, 3.0}}, {}, {{0.0, 3.0}}}});
    EXPECT_THROW(outside.at(1, 1, K, kExample, 2), std::invalid_argument);
    const auto missing = PartitionScheme::explicit_sets({{{{0.0, 2.0}}, {}, {{0.0, 1.0}}}});
    EXPECT_THROW(missing.at(1, 1, K, kExample, 2), std::invalid_argument);
}

TEST(CosineConditions, UnitWeightFails) {
    const auto rep = check_conditions(Weight::constant(1.0), {-5.0, 5.0}, PartitionScheme::whole(), one_to(20),
                                      NormSpec::lp(1.0), 1e-6);
    EXPECT_FALSE(rep.pass);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(rep.seq[0][i], 0.0);
        EXPECT_EQ(rep.seq[1][i], 0.0);
        EXPECT_EQ(rep.seq[2][i], 1.0);
        EXPECT_EQ(rep.seq[3][i], 0.0);
        EXPECT_EQ(rep.seq[4][i], 1.0);
        EXPECT_EQ(rep.seq[5][i], 0.0);
        EXPECT_EQ(rep.seq[6][i], 1.0);
    }
}

TEST(CosineConditions, ExampleWeightMatchesTheProductScan) {
    const auto rep = check_conditions(kExample, {-5.0, 5.0}, PartitionScheme::whole(), one_to(50), NormSpec::lp(1.0),
                                      1e-6);
    EXPECT_TRUE(rep.pass);
    auto w = [](double t) { return oracle::example_weight(4.0, 1.0, t); };
    for (int k = 1; k <= 50; ++k) {
        const double b = oracle::product_scan(w, -5.0, 5.0, k, true, 16);
        const double f = oracle::product_scan(w, -5.0, 5.0, k, false, 16);
        const double f2 = oracle::product_scan(w, -5.0, 5.0, 2 * k, false, 16);
        EXPECT_NEAR(rep.seq[2][k - 1], f2, 1e-12 * f2);
        EXPECT_NEAR(rep.seq[4][k - 1], b * f, 1e-12 * b * f);
        EXPECT_NEAR(rep.seq[6][k - 1], f * f, 1e-12 * f * f);
        EXPECT_NEAR(rep.one_sided_backward[k - 1], b, 1e-12 * b);
        EXPECT_GE(rep.one_sided_backward[k - 1], 1.0);  // one-sided products do not decay
    }
    // Frozen scan values: 2^10 2^-k from k = 10 on, first below 1e-6 at k = 30.
    EXPECT_NEAR(rep.seq[4][29], 1024.0 * std::ldexp(1.0, -30), 1e-18);
    EXPECT_GE(rep.seq[4][28], 1e-6);
    EXPECT_NEAR(rep.seq[2][0], 0.25, 1e-15);
    EXPECT_NEAR(rep.seq[2][2], 1.0 / 96.0, 1e-15);
}

TEST(CosineConditions, VerdictRule) {
    EXPECT_TRUE(sequence_passes({5, 4, 3, 2, 1, 0.5, 1e-7}, 1e-6));
    EXPECT_FALSE(sequence_passes({5, 4, 3, 2, 1e-7, 2e-7, 1e-7}, 1e-6));
    EXPECT_TRUE(sequence_passes({9, 1, 2, 1, 1, 1, 1, 0.0}, 1e-6));  // the bump lies before the window
    EXPECT_FALSE(sequence_passes({1.0}, 1e-6));
    EXPECT_FALSE(sequence_passes({}, 1e-6));
    EXPECT_THROW(check_conditions(kExample, {-1.0, 1.0}, PartitionScheme::whole(), {1, 1}, NormSpec::lp(1.0), 1e-6),
                 std::invalid_argument);
}

TEST(CosineWitness, HandExample) {
    const auto one = Weight::constant(1.0);
    const auto chi = GridFunction::indicator(0.0, 1.0);
    const CellSet E = GridInterval{0.0, 1.0}.cells(16);
    const auto wit = build_v(chi, chi, E, {}, E, 1, one, NormSpec::lp(1.0));
    EXPECT_DOUBLE_EQ(wit.A, 2.0);
    EXPECT_DOUBLE_EQ(wit.B, 1.0);
    EXPECT_NEAR(wit.lambda, 1.0 / std::sqrt(2.0), 1e-15);
    const auto expect = chi + GridFunction::indicator(-1.0, 0.0) * (2.0 * std::sqrt(2.0));
    EXPECT_LT(max_rel_diff(wit.v, expect), 1e-15);
    // Re-check through the operators: v = chi + 2 sqrt(2) S(chi).
    EXPECT_LT(max_rel_diff(wit.v, chi + apply_S(chi, one) * (2.0 * std::sqrt(2.0))), 1e-15);
}

TEST(CosineWitness, DegeneratePartitions) {
    const auto chi = GridFunction::indicator(0.0, 1.0);
    const CellSet E = GridInterval{0.0, 1.0}.cells(16), far = GridInterval{5.0, 6.0}.cells(16);
    EXPECT_THROW(build_v(chi, chi, far, {}, far, 1, kExample, NormSpec::lp(1.0)), DegeneratePartition);
    EXPECT_THROW(build_v(chi, GridFunction::indicator(5.0, 6.0), E, {}, E, 1, kExample, NormSpec::lp(1.0)),
                 DegeneratePartition);
}

TEST(CosineProperty, WitnessDecomposition) {
    for (int trial = 0; trial < 30; ++trial) {
        const int m = random_cells_per_unit();
        const auto f = random_grid_function(m), g = random_grid_function(m);
        const auto w = random_weight();
        const int n = uniform_int(1, 10);
        CellSet E, D, F;
        for (std::int64_t c = -3 * m; c < 7 * m; ++c) {
            if (uniform(0.0, 1.0) < 0.3) continue;
            E.push_back(c);
            (uniform(0.0, 1.0) < 0.5 ? D : F).push_back(c);
        }
        Witness wit;
        try {
            wit = build_v(f, g, E, D, F, n, w, random_spec());
        } catch (const DegeneratePartition&) {
            continue;
        }
        const auto lhs = cosine_step(wit.v, w, n) * wit.lambda - restrict_to(g, E);
        const auto fE = restrict_to(f, E);
        const auto t1 = power_T(fE, w, n) * (wit.lambda / 2.0), t2 = power_S(fE, w, n) * (wit.lambda / 2.0);
        const auto t3 = power_T(restrict_to(g, D), w, 2 * n), t4 = power_S(restrict_to(g, F), w, 2 * n);
        const auto scale = abs_of(t1) + abs_of(t2) + abs_of(t3) + abs_of(t4) + abs_of(restrict_to(g, E));
        EXPECT_LT(max_scaled_diff(lhs, t1 + t2 + t3 + t4, scale), 1e-12);
    }
}

TEST(CosineDemo, UnitWeightMisses) {
    const auto chi = GridFunction::indicator(0.0, 1.0);
    const auto rep = supercyclicity_demo(chi, chi, Weight::constant(1.0), PartitionScheme::whole(), one_to(10),
                                         NormSpec::lp(1.0), 1e-3);
    EXPECT_FALSE(rep.hit);
    ASSERT_FALSE(rep.rows.empty());
    EXPECT_NEAR(rep.rows[0].b, 1.0 + 1.0 / std::sqrt(2.0), 1e-12);
    for (const auto& r : rep.rows) EXPECT_GE(r.b, 1.0 + 1.0 / std::sqrt(2.0) - 1e-12);
    ASSERT_TRUE(rep.best.has_value());
}

TEST(CosineDemo, FirstSummandIsF) {
    // E contains supp f, so v - f is exactly the scaled correction term.
    const auto chi = GridFunction::indicator(0.0, 1.0);
    const auto one = Weight::constant(1.0);
    const auto rep = supercyclicity_demo(chi, chi, one, PartitionScheme::whole(), {1, 2, 3}, NormSpec::lp(1.0), 1e-3);
    for (const auto& r : rep.rows) {
        const auto wit = build_v(chi, chi, GridInterval{0.0, 1.0}.cells(16), {}, GridInterval{0.0, 1.0}.cells(16), r.n,
                                 one, NormSpec::lp(1.0));
        EXPECT_NEAR(r.a, 2.0 * std::sqrt(wit.A / wit.B) * wit.B, 1e-12);
    }
}

TEST(CosineDemo, AllDegenerateGivesNoRows) {
    const auto chi = GridFunction::indicator(0.0, 1.0);
    const auto empty = PartitionScheme::explicit_sets({{{}, {}, {}}});
    const auto rep = supercyclicity_demo(chi, chi, kExample, empty, one_to(5), NormSpec::lp(1.0), 1e-3);
    EXPECT_TRUE(rep.rows.empty());
    EXPECT_EQ(rep.skipped.size(), 5u);
    EXPECT_FALSE(rep.hit);
    EXPECT_FALSE(rep.best.has_value());
}
