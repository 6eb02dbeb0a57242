#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "configlab/experiment.hpp"

using namespace configlab;

namespace {

struct Proc {
    int code;
    std::string out;
};

// runs the CLI; stderr is folded into the captured text only when asked
Proc cli(const std::string& args, bool with_stderr = false) {
    const std::string cmd = std::string(CONFIGLAB_BIN) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    const int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string src(const std::string& rel) { return std::string(SOURCE_DIR) + "/" + rel; }

std::string write_tmp(const std::string& name, const json& j) {
    const std::string path = std::string(BINARY_DIR) + "/" + name;
    std::ofstream(path) << j.dump(2);
    return path;
}

json algebra_config() {
    return {{"schema_version", 1},
            {"name", "t"},
            {"ground", {{"kind", "discrete"}, {"weights", std::vector<double>(8, 1.0)}}},
            {"task", "algebra-suite"},
            {"parameters", {{"trials", 5}}},
            {"plan", {{"master_seed", 3}}}};
}

} // namespace

TEST(Cli, CatalogMatchesGolden) {
    const auto r = cli("list");
    EXPECT_EQ(r.code, 0);
    std::ifstream in(src("tests/golden/catalog.txt"));
    std::stringstream golden;
    golden << in.rdbuf();
    EXPECT_EQ(r.out, golden.str());
    EXPECT_EQ(task_families().size(), 4u);
    EXPECT_EQ(cli("list").out, r.out);
}

TEST(Cli, ListOneTaskAsJson) {
    const auto r = cli("list identity:gnz");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["task"], "identity:gnz");
    EXPECT_EQ(json::parse(cli("list --json").out).size(), task_catalog().size());
}

TEST(Cli, UnknownTaskSuggests) {
    const auto r = cli("list identity:gnx", true);
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.out.find("identity:gnz"), std::string::npos);
    const auto s = suggest_tasks("generator");
    EXPECT_EQ(s.front(), "generator-suite");
}

TEST(Cli, AlgebraSuitePasses) {
    const auto r = cli("run " + src("configs/algebra_suite.json") + " --no-timestamp");
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    EXPECT_GE(j["results"].size(), 6u);
    for (const auto& rec : j["results"]) EXPECT_TRUE(rec["pass"].get<bool>()) << rec.dump();
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["versions"]["configlab"], kVersion);
    EXPECT_TRUE(j.contains("seed_tree"));
    EXPECT_FALSE(j.contains("timestamp"));
    EXPECT_EQ(j["tolerances"]["lattice"], 1e-10);
}

TEST(Cli, ReportsAreReproducible) {
    const std::string c = src("configs/mecke.json");
    const auto a = cli("run " + c + " --no-timestamp"), b = cli("run " + c + " --no-timestamp --jobs 3");
    EXPECT_EQ(a.out, b.out);
    json x = json::parse(cli("run " + c).out), y = json::parse(a.out);
    EXPECT_TRUE(x.contains("timestamp"));
    x.erase("timestamp");
    EXPECT_EQ(x, y);
    EXPECT_LE(std::abs(y["results"][0]["z_score"].get<double>()), 4.0);
}

TEST(Cli, SeedOverrideAndOutFile) {
    const std::string out = std::string(BINARY_DIR) + "/cli_report.json";
    std::remove(out.c_str());
    EXPECT_EQ(cli("run " + src("configs/mecke.json") + " --seed 77 --no-timestamp --out " + out).code, 0);
    std::ifstream in(out);
    const json j = json::parse(in);
    EXPECT_EQ(j["seed"], 77);
}

TEST(Cli, ExitCodes) {
    json noseed = algebra_config();
    noseed["plan"].erase("master_seed");
    EXPECT_EQ(cli("run " + write_tmp("noseed.json", noseed)).code, 2);
    EXPECT_EQ(cli("run " + write_tmp("noseed.json", noseed) + " --seed 1 --no-timestamp").code, 0);

    json extra = algebra_config();
    extra["colour"] = "blue";
    EXPECT_EQ(cli("validate " + write_tmp("extra.json", extra)).code, 2);

    json badtask = algebra_config();
    badtask["task"] = "algebra-suit";
    const auto r = cli("validate " + write_tmp("badtask.json", badtask), true);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("algebra-suite"), std::string::npos);

    json wrong_ground = algebra_config();
    wrong_ground["ground"] = {{"kind", "continuum"}, {"box", {{0, 1}}}};
    EXPECT_EQ(cli("validate " + write_tmp("wg.json", wrong_ground)).code, 2);

    json strict = algebra_config();
    strict["tolerances"] = {{"lattice", 0.0}};
    const auto f = cli("run " + write_tmp("strict.json", strict) + " --no-timestamp", true);
    EXPECT_EQ(f.code, 1);
    EXPECT_NE(f.out.find("FAILED"), std::string::npos);

    {
        std::ofstream(std::string(BINARY_DIR) + "/broken.json") << "{ not json";
    }
    EXPECT_EQ(cli("run " + std::string(BINARY_DIR) + "/broken.json").code, 2);
    EXPECT_EQ(cli("run /nonexistent/config.json").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("validate " + src("configs/gnz.json")).code, 0);
}

TEST(Config, ParseFillsDefaults) {
    const auto c = parse_config(algebra_config());
    EXPECT_EQ(c.parameters["z"], 1.0);
    EXPECT_EQ(c.plan.master_seed, 3u);
    EXPECT_DOUBLE_EQ(c.tolerances.at("z_score"), 4.0);
    json bad = algebra_config();
    bad["parameters"]["nope"] = 1;
    EXPECT_THROW(parse_config(bad), ConfigError);
    bad = algebra_config();
    bad["plan"]["replicas"] = "many";
    EXPECT_THROW(parse_config(bad), ConfigError);
}

TEST(Config, EveryShippedConfigValidates) {
    for (const char* f : {"algebra_suite", "mecke", "gnz", "superposition", "mixed_counts", "generator_suite",
                          "process_report"}) {
        std::ifstream in(src(std::string("configs/") + f + ".json"));
        EXPECT_NO_THROW(parse_config(json::parse(in))) << f;
    }
}

TEST(Runner, GeneratorSuiteAndProcessReport) {
    for (const char* f : {"generator_suite", "process_report", "mixed_counts", "superposition"}) {
        std::ifstream in(src(std::string("configs/") + f + ".json"));
        const auto r = run_experiment(parse_config(json::parse(in)), {false, 2});
        EXPECT_TRUE(r.pass) << f << ": " << r.report["results"].dump();
    }
}
