#include <gtest/gtest.h>

#include "configlab/generators.hpp"
#include "oracles.hpp"

using namespace configlab;

namespace {
SetFunction rnd(const DiscreteGround& g, Stream& rng) {
    return SetFunction::tabulate(g, [&](Mask) { return rng.uniform(-1, 1); });
}
const DiscreteGround G5({0.6, 1.0, 1.4, 0.8, 1.2});
} // namespace

TEST(Kernel, Validation) {
    EXPECT_THROW(BirthDeathKernel(G5, 1, {{0, 0b11, 1.0}}, {}), ValidationError);
    EXPECT_THROW(BirthDeathKernel(G5, 2, {{0, 0b1, -1.0}}, {}), ValidationError);
    EXPECT_THROW(BirthDeathKernel(G5, 2, {{7, 0, 1.0}}, {}), ValidationError);
    EXPECT_THROW(BirthDeathKernel(G5, 2, {{0, 0, 1.0}, {0, 0, 2.0}}, {}), ValidationError);
    std::vector<std::vector<double>> asym(5, std::vector<double>(5, 0.0));
    asym[0][1] = 1;
    EXPECT_THROW(BirthDeathKernel::contact(G5, asym), ValidationError);
    EXPECT_THROW(hat_L_closed(BirthDeathKernel::pure_death(DiscreteGround::uniform(13))), CapacityError);
}

TEST(Generator, ClosedFormMatchesLiteralOracle) {
    Stream rng(1);
    for (int t = 0; t < 6; ++t) {
        const auto k = random_kernel(G5, 1 + t % 3, 0.4, rng);
        const auto C = hat_L_closed(k);
        const auto M = oracle::hat_L(k);
        double e = 0;
        for (std::size_t i = 0; i < M.size(); ++i) e = std::max(e, std::abs(M[i] - C.data()[i]));
        EXPECT_LE(e, 1e-11);
        EXPECT_LE(max_abs_diff(C, hat_L_bruteforce(k)), 1e-11);
        EXPECT_LE(max_abs_diff(C, hat_L_columns(k)), 1e-11);
    }
}

TEST(Generator, ExcludingCoincidencesBreaksTheClosedForm) {
    Stream rng(2);
    const auto k = random_kernel(G5, 2, 0.5, rng);
    EXPECT_GT(max_abs_diff(hat_L_closed(k), hat_L_bruteforce(k, CoincidencePolicy::Exclude)), 1e-3);
}

TEST(Generator, PureDeathIsMinusCardinality) {
    // L̂ for unit deaths with no offspring: (L̂G)(η) = −|η| G(η)
    const auto C = hat_L_closed(BirthDeathKernel::pure_death(G5));
    for (Mask r = 0; r < 32; ++r)
        for (Mask c = 0; c < 32; ++c) EXPECT_NEAR(C(r, c), r == c ? -double(card(r)) : 0.0, 1e-14);
}

TEST(Contact, ApplyMatchesKernelForm) {
    Stream rng(3);
    std::vector<std::vector<double>> a(5, std::vector<double>(5, 0.0));
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < x; ++y) a[x][y] = a[y][x] = rng.uniform();
    const auto k = BirthDeathKernel::contact(G5, a);
    const auto F = rnd(G5, rng);
    for (Mask g = 0; g < 32; ++g) {
        EXPECT_NEAR(apply_contact(G5, a, F, g), apply_L(k, F, g), 1e-12);
        EXPECT_NEAR(apply_contact(G5, a, F, g, CoincidencePolicy::Exclude), apply_L(k, F, g, CoincidencePolicy::Exclude), 1e-12);
    }
}

TEST(Derivation, HoldsOnAllDisjointPairs) {
    Stream rng(4);
    const auto C = hat_L_closed(random_kernel(G5, 2, 0.4, rng));
    EXPECT_LE(derivation_residual_all(C, rnd(G5, rng)), 1e-12);
    EXPECT_THROW(check_derivation(C, rnd(G5, rng), 0b11, 0b10), ValidationError);
}

TEST(Adjoint, PairingAndLeibniz) {
    Stream rng(5);
    const auto C = hat_L_closed(random_kernel(G5, 2, 0.4, rng));
    const auto G = rnd(G5, rng), k = rnd(G5, rng);
    for (double z : {1.0, 0.7}) {
        const double lhs = pairing(C.apply(G), k, z), rhs = pairing(G, adjoint_hat_L(C, z).apply(k), z);
        EXPECT_NEAR(lhs, rhs, 1e-11 * std::max(1.0, std::abs(lhs)));
    }
    // disjoint supports: plain Leibniz rule
    auto on = [&](Mask s) {
        const auto f = rnd(G5, rng);
        return SetFunction::tabulate(G5, [&](Mask m) { return (m & ~s) ? 0.0 : f[m]; });
    };
    const auto d = check_adjoint_leibniz(C, on(0b00111), on(0b11000));
    EXPECT_TRUE(d.supports_disjoint);
    EXPECT_LE(d.raw, 1e-12);
    // overlapping supports: the residual is exactly the coincidence term
    const auto rep = check_adjoint_leibniz(C, rnd(G5, rng), rnd(G5, rng));
    EXPECT_GT(rep.raw, 1e-3);
    EXPECT_LE(rep.corrected, 1e-11);
}

TEST(Invariance, FrozenSectorsAndNullSpace) {
    Stream rng(6);
    const auto k = random_kernel(G5, 2, 0.4, rng, 0b11100);
    const Mask fr = frozen_sites(k);
    EXPECT_EQ(fr, 0b00011u);
    const auto C = hat_L_closed(k);
    const auto f = rnd(G5, rng);
    const auto inv = SetFunction::tabulate(G5, [&](Mask m) { return (m & ~fr) ? 0.0 : f[m]; });
    EXPECT_LE(invariance_residual(C, inv).max_entry(), 1e-12);
    const auto cl = convolution_closure_check(C, inv, inv);
    EXPECT_TRUE(cl.precondition_ok);
    EXPECT_TRUE(cl.holds);
    const auto bad = convolution_closure_check(C, rnd(G5, rng), inv);
    EXPECT_FALSE(bad.precondition_ok);
    EXPECT_EQ(bad.failing_input, "k1");
    // every basis vector of ker L̂* is invariant; the frozen sector gives 2^{|frozen|} of them
    const auto basis = invariant_basis(C);
    EXPECT_GE(basis.size(), 4u);
    for (const auto& b : basis) EXPECT_LE(invariance_residual(C, b).max_entry(), 1e-9);
}

TEST(Contact, FirstOrderStationarity) {
    Stream rng(7);
    std::vector<std::vector<double>> S(5, std::vector<double>(5, 0.0));
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < x; ++y) S[x][y] = S[y][x] = rng.uniform(0.1, 1.0);
    const auto a = row_normalized_dispersal(G5, S);
    for (int x = 0; x < 5; ++x) {
        double r = 0;
        for (int y = 0; y < 5; ++y) r += a[x][y] * G5.weight(y);
        EXPECT_NEAR(r, 1.0, 1e-14);
    }
    const auto C = hat_L_closed(BirthDeathKernel::contact(G5, a));
    for (double c : {0.5, 1.0, 3.0}) {
        const auto k = SetFunction::tabulate(G5, [c](Mask m) { return std::pow(c, card(m)); });
        EXPECT_LE(invariance_residual(C, k).entrywise[1], 1e-12);
    }
    // a non-normalized dispersal is not stationary at order one
    const auto C2 = hat_L_closed(BirthDeathKernel::contact(G5, S));
    EXPECT_GT(invariance_residual(C2, SetFunction::constant(G5, 1.0)).entrywise[1], 1e-3);
}
