#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lindyn/holo.hpp"
#include "support/random.hpp"

using namespace lindyn;
using namespace lindyn::holo;
using lindyn::testing::random_complex;
using lindyn::testing::random_poly;
using lindyn::testing::uniform;
using lindyn::testing::uniform_int;

namespace {

void expect_coeffs(const ComplexPoly& p, const std::vector<cplx>& want, double tol = 0.0) {
    ASSERT_TRUE(p.is_standard());
    const auto& c = p.coeffs();
    const std::size_t n = std::max(c.size(), want.size());
    for (std::size_t k = 0; k < n; ++k) {
        const cplx a = k < c.size() ? c[k] : cplx{};
        const cplx b = k < want.size() ? want[k] : cplx{};
        EXPECT_LE(std::abs(a - b), tol) << "coefficient " << k;
    }
}

// Naive sum of c_k z^k with explicit powers, independent of Horner.
cplx power_sum(const std::vector<cplx>& c, cplx z) {
    cplx acc{};
    for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * std::pow(z, static_cast<int>(k));
    return acc;
}

}  // namespace

TEST(HoloEval, ZeroPolynomialIsZeroEverywhere) {
    EXPECT_EQ(ComplexPoly(std::vector<cplx>{0.0})(cplx{5.0, 2.0}), cplx{});
    EXPECT_EQ(ComplexPoly()(cplx{5.0, 2.0}), cplx{});
    EXPECT_EQ(ComplexPoly().degree(), kZeroDegree);
}

TEST(HoloEval, RootOfOnePlusZSquared) {
    const ComplexPoly p({1.0, 0.0, 1.0});
    EXPECT_LT(std::abs(p(cplx{0.0, 1.0})), 1e-15);
}

TEST(HoloEval, LinearAtOnePlusI) {
    const ComplexPoly p({2.0, 3.0});
    const cplx z{1.0, 1.0};
    EXPECT_EQ(p(z), cplx(5.0, 3.0));
    EXPECT_EQ(power_sum(p.coeffs(), z), cplx(5.0, 3.0));
    EXPECT_EQ(horner(p.coeffs(), z), cplx(5.0, 3.0));
}

TEST(HoloDerivative, Examples) {
    expect_coeffs(derivative(ComplexPoly({0.0, 0.0, 1.0}), 1), {0.0, 2.0});
    expect_coeffs(derivative(ComplexPoly({0.0, 0.0, 0.0, 1.0}), 3), {6.0});
    const auto p = random_poly(7);
    EXPECT_EQ(derivative(p, 0), p);
    EXPECT_TRUE(derivative(ComplexPoly({1.0, 2.0}), 2).is_zero());
}

TEST(HoloAntiderivative, Examples) {
    expect_coeffs(antiderivative(ComplexPoly({1.0}), 1), {0.0, 1.0});
    expect_coeffs(antiderivative(ComplexPoly({0.0, 2.0}), 1), {0.0, 0.0, 1.0});
    expect_coeffs(antiderivative(ComplexPoly({6.0}), 3), {0.0, 0.0, 0.0, 1.0});
}

TEST(HoloAntiderivative, LowOrderCoefficientsVanish) {
    for (int trial = 0; trial < 20; ++trial) {
        const int j = uniform_int(1, 10);
        const auto P = antiderivative(random_poly(uniform_int(0, 20)), j);
        for (int k = 0; k < j; ++k) EXPECT_EQ(P.coeffs()[k], cplx{});
    }
}

TEST(HoloProperty, DerivativeUndoesAntiderivative) {
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_poly(uniform_int(0, 50));
        const int j = uniform_int(0, 10);
        const auto q = derivative(antiderivative(p, j), j);
        ASSERT_EQ(q.coeffs().size(), p.coeffs().size());
        for (std::size_t k = 0; k < p.coeffs().size(); ++k)
            EXPECT_LE(std::abs(q.coeffs()[k] - p.coeffs()[k]), 1e-12 * std::abs(p.coeffs()[k]));
    }
}

TEST(HoloProperty, DerivativeAndAntiderivativeAreLinear) {
    for (int trial = 0; trial < 100; ++trial) {
        const int deg = uniform_int(0, 30), j = uniform_int(0, 8);
        const auto p = random_poly(deg), q = random_poly(deg);
        const cplx a = random_complex(2.0), b = random_complex(2.0);
        for (int mode = 0; mode < 2; ++mode) {
            auto op = [&](const ComplexPoly& x) { return mode == 0 ? derivative(x, j) : antiderivative(x, j); };
            const auto lhs = op(a * p + b * q);
            const auto rhs = a * op(p) + b * op(q);
            const std::size_t n = std::max(lhs.coeffs().size(), rhs.coeffs().size());
            for (std::size_t k = 0; k < n; ++k) {
                const cplx x = k < lhs.coeffs().size() ? lhs.coeffs()[k] : cplx{};
                const cplx y = k < rhs.coeffs().size() ? rhs.coeffs()[k] : cplx{};
                EXPECT_LE(std::abs(x - y), 1e-12 * std::max(1.0, std::abs(y)));
            }
        }
    }
}

// Basis changes are compared where each basis is meant to be used: the unit disk of the
// power variable and a Bernstein ellipse around the Chebyshev segment.  Far outside, any
// change of basis amplifies rounding by roughly |u|^degree.
TEST(HoloBasis, NonStandardBasesEvaluateConsistently) {
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = random_poly(uniform_int(1, 12));
        const PowerBasis pb{random_complex(3.0), cplx{uniform(0.5, 3.0), uniform(-1.0, 1.0)}};
        const ChebyshevBasis cb{random_complex(4.0), random_complex(4.0) + cplx{9.0, 0.0}};
        for (const Basis& b : {Basis{pb}, Basis{cb}}) {
            const auto q = rebase(p, b);
            EXPECT_EQ(q.basis(), b);
            const auto back = to_standard(q);
            std::vector<cplx> zs;
            for (int s = 0; s < 20; ++s) {
                const cplx u = std::polar(uniform(0.0, 1.0), uniform(0.0, 2.0 * std::numbers::pi));
                if (std::holds_alternative<PowerBasis>(b)) {
                    zs.push_back(pb.center + pb.scale * u);
                } else {
                    const cplx x = std::abs(u) < 0.5 ? u : 0.5 * (1.5 * u + 1.0 / (1.5 * u));
                    zs.push_back(0.5 * (cb.a + cb.b) + 0.5 * (cb.b - cb.a) * x);
                }
            }
            double sup = 0.0;
            for (auto z : zs) sup = std::max(sup, std::abs(p(z)));
            for (auto z : zs) {
                EXPECT_LE(std::abs(q(z) - p(z)), 1e-11 * sup);
                EXPECT_LE(std::abs(back(z) - p(z)), 1e-11 * sup);
            }
        }
    }
}

TEST(HoloBasis, CalculusCommutesWithChangeOfBasis) {
    const auto p = random_poly(9);
    const ChebyshevBasis cb{cplx{-2.0, 1.0}, cplx{6.0, -1.0}};
    const PowerBasis pb{cplx{1.0, 1.0}, cplx{2.0, 0.5}};
    for (int j = 0; j <= 4; ++j) {
        const auto dp = derivative(p, j), Ip = antiderivative(p, j);
        for (const Basis& b : {Basis{cb}, Basis{pb}}) {
            const auto q = rebase(p, b);
            const auto dq = derivative(q, j);
            for (int s = 0; s < 8; ++s) {
                const cplx z = random_complex(2.0);
                EXPECT_LT(lindyn::testing::rel_err(dq(z), dp(z)), 1e-8);
            }
            // Antiderivatives in other bases are normalized at 0 too.
            const auto Iq = antiderivative(q, j);
            for (int s = 0; s < 8; ++s) {
                const cplx z = random_complex(2.0);
                EXPECT_LT(lindyn::testing::rel_err(Iq(z), Ip(z)), 1e-8);
            }
        }
    }
}

TEST(HoloBasis, ComposeAffineMatchesPointwise) {
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_poly(uniform_int(0, 10));
        const cplx alpha = random_complex(2.0) + cplx{0.1, 0.0}, beta = random_complex(3.0);
        const auto q = compose_affine(p, alpha, beta);
        for (int s = 0; s < 10; ++s) {
            const cplx z = random_complex(2.0);
            EXPECT_LT(lindyn::testing::rel_err(q(z), p(alpha * z + beta)), 1e-10);
        }
    }
}

TEST(HoloCompact, DiskSamplesStayInside) {
    const auto K = CompactSet::disk({3.0, -1.0}, 0.7, 16);
    EXPECT_GE(K.samples().size(), 8u);
    for (auto z : K.samples()) EXPECT_LE(std::abs(z - K.center()), K.radius() + 1e-12);
    EXPECT_THROW(CompactSet::disk(0.0, 1.0, 4), std::invalid_argument);
    EXPECT_THROW(CompactSet::disk(0.0, -1.0), std::invalid_argument);
}

TEST(HoloSupNorm, Examples) {
    const auto K = CompactSet::disk(0.0, 1.0);
    EXPECT_EQ(sup_norm_on([](cplx) { return cplx{}; }, K), 0.0);
    EXPECT_NEAR(sup_norm_on([](cplx z) { return z; }, K), 1.0, 1e-12);
    EXPECT_NEAR(sup_norm_on(ComplexPoly({0.0, 0.0, 1.0}), CompactSet::disk(2.0, 0.5)), 6.25, 1e-12);
}

TEST(HoloProperty, SupNormMonotoneUnderRefinement) {
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_poly(uniform_int(1, 15));
        const int n = uniform_int(8, 64);
        const auto K = CompactSet::disk(random_complex(2.0), uniform(0.1, 2.0), n);
        EXPECT_GE(sup_norm_on(p, K.with_density(2 * n)), sup_norm_on(p, K));
    }
}

TEST(HoloDomain, ExhaustionIsNestedAndInside) {
    for (const auto& dom : {PlanarDomain::right_half_plane(), PlanarDomain::open_disk({1.0, 1.0}, 2.0)}) {
        for (int n = 1; n < 20; ++n) {
            const auto a = dom.exhaustion(n), b = dom.exhaustion(n + 1);
            EXPECT_TRUE(dom.contains(a, 0.0));
            for (auto z : a.samples()) EXPECT_LE(std::abs(z - b.center()), b.radius() + 1e-12);
        }
    }
    const auto bad = std::vector<CompactSet>{CompactSet::disk(3.0, 1.0), CompactSet::disk(10.0, 1.0)};
    EXPECT_THROW(PlanarDomain::right_half_plane().with_exhaustion(bad), std::invalid_argument);
    EXPECT_THROW(PlanarDomain::right_half_plane().with_exhaustion({CompactSet::disk(0.5, 1.0)}),
                 std::invalid_argument);
}

TEST(HoloFrechet, Examples) {
    const auto dom = PlanarDomain::right_half_plane();
    auto one = [](cplx) { return cplx{1.0}; };
    auto zero = [](cplx) { return cplx{}; };
    auto f = as_evaluable(ComplexPoly({1.0, 2.0, 3.0}));
    EXPECT_EQ(frechet_distance(f, f, dom).value, 0.0);
    const auto d10 = frechet_distance(one, zero, dom, 10);
    EXPECT_NEAR(d10.value, 0.5 * (1.0 - std::ldexp(1.0, -10)), 1e-15);
    EXPECT_NEAR(d10.value, 0.49951, 5e-6);
    EXPECT_EQ(d10.truncation_bound, std::ldexp(1.0, -10));
    EXPECT_NEAR(frechet_distance(one, zero, dom, 60).value, 0.5, 1e-15);
}

TEST(HoloFrechet, MetricAxiomsOnRandomTriples) {
    const auto dom = PlanarDomain::right_half_plane();
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = as_evaluable(random_poly(uniform_int(0, 4), 0.3));
        const auto g = as_evaluable(random_poly(uniform_int(0, 4), 0.3));
        const auto h = as_evaluable(random_poly(uniform_int(0, 4), 0.3));
        const double fg = frechet_distance(f, g, dom, 12).value;
        const double gf = frechet_distance(g, f, dom, 12).value;
        const double gh = frechet_distance(g, h, dom, 12).value;
        const double fh = frechet_distance(f, h, dom, 12).value;
        EXPECT_EQ(fg, gf);
        EXPECT_GE(fg, 0.0);
        EXPECT_LT(fg, 1.0);
        EXPECT_LE(fh, fg + gh + 1e-12);
    }
}

TEST(HoloFrechet, ConvergenceMatchesUniformConvergenceOnCompacts) {
    const auto dom = PlanarDomain::open_disk(0.0, 2.0);
    const auto f = as_evaluable(ComplexPoly({1.0, -1.0, 0.5}));
    double prev_d = 1.0;
    for (int k = 1; k <= 40; ++k) {
        const double inv_fact = std::exp(-std::lgamma(k + 1.0));
        auto fk = [&](cplx z) { return f(z) + std::pow(z, k) * inv_fact; };
        const double d = frechet_distance(fk, f, dom, 20).value;
        // Past k ~ 25 the increment is below rounding of f itself and fk == f exactly.
        EXPECT_LE(d, prev_d);
        if (k >= 3 && k <= 15) EXPECT_LT(d, prev_d);
        prev_d = d;
        for (int n = 1; n <= 4; ++n) {
            const double s = sup_norm_on([&](cplx z) { return fk(z) - f(z); }, dom.exhaustion(n));
            const double r = dom.exhaustion(n).radius();
            EXPECT_NEAR(s, std::pow(r, k) * inv_fact, 1e-12 * std::max(1.0, s));
        }
    }
    EXPECT_LT(prev_d, 1e-30);
}

TEST(HoloFrechet, VanishesOnlyWhenSamplesVanish) {
    const auto dom = PlanarDomain::right_half_plane();
    auto bump = [](cplx z) { return std::abs(z - cplx{40.0, 0.0}) < 0.5 ? cplx{1.0} : cplx{}; };
    auto zero = [](cplx) { return cplx{}; };
    EXPECT_EQ(frechet_distance(bump, zero, dom, 10).value, 0.0);  // bump outside K_1..K_10 samples
    EXPECT_GT(frechet_distance(bump, zero, dom, 30).value, 0.0);
}
