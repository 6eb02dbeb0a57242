#include <gtest/gtest.h>

#include "configlab/transforms.hpp"
#include "oracles.hpp"

using namespace configlab;

namespace {
SetFunction rnd(const DiscreteGround& g, Stream& rng) {
    return SetFunction::tabulate(g, [&](Mask) { return rng.uniform(-1, 1); });
}
const DiscreteGround G7({0.4, 1.0, 1.3, 0.8, 2.0, 0.6, 1.1});
} // namespace

TEST(KTransform, MatchesNaiveAndInverts) {
    Stream rng(1);
    for (int t = 0; t < 5; ++t) {
        const auto f = rnd(G7, rng);
        EXPECT_LE(oracle::max_abs_diff(k_transform(f), oracle::K(f)), 1e-12);
        EXPECT_LE(oracle::max_abs_diff(k_inverse(f), oracle::Kinv(f)), 1e-12);
        EXPECT_LE(max_abs_diff(k_transform(f), reference::k_transform_naive(f)), 1e-12);
        EXPECT_LE(max_abs_diff(k_inverse(k_transform(f)), f), 1e-12);
    }
}

TEST(KTransform, DeltaAndIndicatorImages) {
    const auto g = DiscreteGround::uniform(4);
    // K δ_∅ ≡ 1, K 1_{η} = 1[η ⊆ ·]
    EXPECT_EQ(k_transform(SetFunction::delta_empty(g)).values(), std::vector<double>(16, 1.0));
    const auto f = k_transform(SetFunction::indicator(g, 0b0110));
    for (Mask m = 0; m < 16; ++m) EXPECT_EQ(f[m], (m & 0b0110) == 0b0110 ? 1.0 : 0.0);
}

TEST(Convolutions, MatchDefinitions) {
    Stream rng(2);
    const auto a = rnd(G7, rng), b = rnd(G7, rng);
    EXPECT_LE(oracle::max_abs_diff(conv_disjoint(a, b), oracle::star(a, b)), 1e-12);
    EXPECT_LE(oracle::max_abs_diff(conv_union(a, b), oracle::star_union(a, b)), 1e-12);
}

TEST(Convolutions, KIsAHomomorphismForStarUnion) {
    Stream rng(3);
    const auto a = rnd(G7, rng), b = rnd(G7, rng);
    EXPECT_LE(max_abs_diff(k_transform(conv_union(a, b)), multiply(k_transform(a), k_transform(b))), 1e-11);
}

TEST(Convolutions, PowersAndExpVectors) {
    const auto g = DiscreteGround::uniform(5);
    const auto k = SetFunction::power(g, 0.5);
    // (c^{|·|})^{∗p} = (p c)^{|·|}
    EXPECT_LE(max_abs_diff(conv_power(k, 3), SetFunction::power(g, 1.5)), 1e-12);
    EXPECT_EQ(conv_power(k, 0).values(), SetFunction::delta_empty(g).values());
    const std::vector<double> f = {0.1, -0.4, 0.7, 1.2, -1.0};
    std::vector<double> f1(f);
    for (double& x : f1) x += 1;
    EXPECT_LE(max_abs_diff(k_transform(exp_vector(g, f)), exp_vector(g, f1)), 1e-12);
    EXPECT_THROW(exp_vector(g, {1.0}), ValidationError);
}

TEST(Minlos, BothSidesAgreeWithOracle) {
    Stream rng(4);
    const auto H = rnd(G7, rng), a = rnd(G7, rng), b = rnd(G7, rng);
    const double z = 1.3;
    const auto p = minlos_pairing(H, a, b, z);
    const double want = oracle::minlos_rhs(H, a, b, z);
    EXPECT_NEAR(p.lhs, want, 1e-10 * std::max(1.0, std::abs(want)));
    EXPECT_NEAR(p.rhs, want, 1e-10 * std::max(1.0, std::abs(want)));
}

TEST(NormFit, AttainedAtWorstMask) {
    const auto g = DiscreteGround::uniform(3);
    std::vector<double> v(8, 0.0);
    v[0] = 1;
    v[0b011] = 8;
    v[0b111] = 12;
    const auto f = norm_fit(SetFunction(g, v), 2.0, 0.0);
    EXPECT_DOUBLE_EQ(f.norm, 2.0);  // 8 / 2^2
    EXPECT_EQ(f.attained_at, 0b011u);
    EXPECT_THROW(norm_fit(SetFunction(g, v), 0.0, 0.0), ValidationError);
}

TEST(PolyBound, HoldsForBoundedSupport) {
    Stream rng(5);
    const auto g = DiscreteGround::uniform(6);
    const auto G = SetFunction::tabulate(g, [&](Mask m) { return card(m) <= 2 && !(m & 0b110000) ? rng.uniform(-1, 1) : 0.0; });
    const auto b = poly_bound_check(G, 0b001111);
    EXPECT_TRUE(b.holds);
    EXPECT_LE(b.N, 2);
    EXPECT_THROW(poly_bound_check(G, 0b000011), ValidationError);
}
