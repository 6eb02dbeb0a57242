#include <gtest/gtest.h>

#include "configlab/config_core.hpp"
#include "oracles.hpp"

using namespace configlab;

TEST(Mask, Helpers) {
    EXPECT_EQ(card(0b1011u), 3);
    EXPECT_EQ(full_mask(5), 31u);
    EXPECT_EQ(mask_to_string(0), "{}");
    EXPECT_TRUE(has(bit(4), 4));
    EXPECT_DOUBLE_EQ(factorial(5), 120.0);
}

TEST(DiscreteGround, CapacityAndWeights) {
    EXPECT_THROW(DiscreteGround::uniform(25), CapacityError);
    EXPECT_THROW(DiscreteGround({1.0, -1.0}), ValidationError);
    const DiscreteGround g({0.5, 2.0, 1.5});
    EXPECT_EQ(g.table_size(), 8u);
    EXPECT_DOUBLE_EQ(g.total_mass(), 4.0);
    EXPECT_DOUBLE_EQ(g.weight_of(0b101), 0.75);
    EXPECT_DOUBLE_EQ(g.weight_of(0), 1.0);
}

TEST(ContinuumWindow, ContainsIsHalfOpen) {
    const ContinuumWindow w({{0, 2}, {-1, 1}});
    EXPECT_DOUBLE_EQ(w.volume(), 4.0);
    const double in[] = {0.0, -1.0}, out[] = {2.0, 0.0};
    EXPECT_TRUE(w.contains(std::span<const double>(in)));
    EXPECT_FALSE(w.contains(std::span<const double>(out)));
    EXPECT_THROW(ContinuumWindow({{1, 1}}), ValidationError);
    EXPECT_TRUE(w.contains(ContinuumWindow({{0, 1}, {0, 1}})));
    EXPECT_FALSE(ContinuumWindow({{0, 1}}).overlaps(ContinuumWindow({{1, 2}})));
}

TEST(SetFunction, ValidatesTable) {
    const auto g = DiscreteGround::uniform(3);
    EXPECT_THROW(SetFunction(g, std::vector<double>(7, 0.0)), ValidationError);
    EXPECT_THROW(SetFunction(g, std::vector<double>(8, NAN)), ValidationError);
    const auto f = SetFunction::power(g, 2.0);
    EXPECT_DOUBLE_EQ(f[0b111], 8.0);
    EXPECT_DOUBLE_EQ((f + f)[0b11], 8.0);
    EXPECT_DOUBLE_EQ((2.0 * f - f)[0b1], 2.0);
    EXPECT_THROW(f + SetFunction::power(DiscreteGround::uniform(3, 2.0), 1.0), ValidationError);
}

TEST(LPIntegral, MatchesProductFormula) {
    // ∫ c^{|η|} dλ_z = Π(1 + c z m)
    const DiscreteGround g({0.3, 1.1, 0.7, 2.0});
    const double z = 1.7, c = 0.6;
    double want = 1;
    for (double m : g.weights()) want *= 1 + c * z * m;
    EXPECT_NEAR(lp_integral(SetFunction::power(g, c), z), want, 1e-12);
    EXPECT_NEAR(lp_integral(SetFunction::power(g, c), z), oracle::integral(SetFunction::power(g, c), z), 1e-12);
}

TEST(PointConfig, SortedInsertEraseAndDuplicates) {
    PointConfig c(2);
    const double a[] = {0.5, 0.1}, b[] = {0.2, 0.9};
    c.insert(std::span<const double>(a));
    c.insert(std::span<const double>(b));
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.point(0)[0], 0.2);  // lexicographic order
    EXPECT_THROW(c.insert(std::span<const double>(a)), ValidationError);
    EXPECT_FALSE(c.try_insert(std::span<const double>(a)));
    EXPECT_TRUE(c.contains(std::span<const double>(b)));
    EXPECT_EQ(c.without(0).size(), 1u);
    EXPECT_EQ(count_in(c, ContinuumWindow({{0, 0.3}, {0, 1}}), ContinuumWindow::unit(2)), 1);
}

TEST(LPIntegralMC, RecoversExponentialOfLinearStatistic) {
    // G(γ) = 2^{|γ|}: ∫ G dλ_z over [0,1] = e^{2z}; the expansion is exact per order
    const auto w = ContinuumWindow::unit(1);
    const double z = 0.8;
    const auto r = lp_integral_mc([](const PointConfig& c) { return std::pow(2.0, double(c.size())); }, z, w, 30, 4, 1);
    EXPECT_NEAR(r.estimate, std::exp(2 * z), 1e-9);
    EXPECT_LT(r.tail_mass, 1e-20);
    EXPECT_THROW(lp_integral_mc([](const PointConfig&) { return NAN; }, z, w, 2, 2, 1), EvaluationError);
}
