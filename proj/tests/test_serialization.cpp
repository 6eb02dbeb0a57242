#include <gtest/gtest.h>

#include "configlab/serialization.hpp"

using namespace configlab;

TEST(Json, GroundsRoundTrip) {
    const DiscreteGround g({0.5, 1.5, 2.0});
    EXPECT_EQ(discrete_ground_from_json(to_json(g)), g);
    const ContinuumWindow w({{0, 2}, {1, 3}});
    EXPECT_DOUBLE_EQ(window_from_json(to_json(w)).volume(), 4.0);
    EXPECT_THROW(ground_from_json(json{{"kind", "torus"}}), ValidationError);
    EXPECT_THROW(discrete_ground_from_json(to_json(w)), ValidationError);
}

TEST(Json, TablesAndFunctionsRoundTrip) {
    const auto g = DiscreteGround::uniform(3);
    const auto f = SetFunction::power(g, 1.5).relabel("p");
    const auto f2 = set_function_from_json(to_json(f));
    EXPECT_EQ(f2.values(), f.values());
    EXPECT_EQ(f2.label(), "p");
    const auto pf = PairSetFunction::product(f, f);
    EXPECT_EQ(pair_function_from_json(to_json(pf)).values(), pf.values());
    const auto t = poisson_table(g, 0.7);
    EXPECT_EQ(table_from_json(to_json(t)).probs(), t.probs());
}

TEST(Json, MixingDensities) {
    EXPECT_DOUBLE_EQ(mixing_from_json({{"family", "point_mass"}, {"z", 2.0}}).offset(), 2.0);
    const auto e = mixing_from_json({{"family", "exponential"}, {"rate", 2.0}});
    EXPECT_EQ(e.family(), MixingDensity::Family::Gamma);
    const auto grid = mixing_from_json(to_json(MixingDensity::from_grid(0.5, 0.5, {0.25, 0.75})));
    EXPECT_EQ(grid.masses(), (std::vector<double>{0.25, 0.75}));
    EXPECT_THROW(mixing_from_json({{"family", "lognormal"}}), ValidationError);
}

TEST(Json, KernelsRoundTrip) {
    const auto g = DiscreteGround::uniform(4);
    const BirthDeathKernel k(g, 2, {{0, 0b0110, 0.5}, {1, 0, 1.0}}, {{2, 0b1000, 0.25}});
    const json j = to_json(k);
    EXPECT_EQ(j["death"][0]["omega"], (std::vector<int>{1, 2}));
    const auto k2 = kernel_from_json(j);
    EXPECT_EQ(to_json(k2), j);
    json bad = j;
    bad["death"][0]["omega"] = {1, 1};
    EXPECT_THROW(kernel_from_json(bad), ValidationError);
}

TEST(Json, Reports) {
    IdentityReport r;
    r.identity = "mecke";
    r.z_score = 1.5;
    const json j = to_json(r, RunPlan{});
    EXPECT_EQ(j["identity"], "mecke");
    EXPECT_EQ(j["plan"]["replicas"], 10000);
    const auto u = uniqueness_diagnostic(SetFunction::power(DiscreteGround::uniform(3), 2.0), 3);
    EXPECT_EQ(to_json(u)["verdict"], "unique_by_K_C2");
}
