// configlab: batch runner for the lattice / point-process experiment suites.
//   configlab run <config.json> [--seed S] [--out FILE] [--no-timestamp] [--jobs N]
//   configlab list [task] [--json]
//   configlab validate <config.json>
// Exit codes: 0 pass, 1 check failure, 2 usage or config error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "configlab/experiment.hpp"

using namespace configlab;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

json catalog_json() {
    json out = json::array();
    for (const auto& t : task_catalog()) {
        json params = json::array();
        for (const auto& p : t.params) params.push_back({{"name", p.name}, {"default", p.fallback}, {"help", p.help}});
        out.push_back({{"task", t.name}, {"family", t.family}, {"ground", t.ground}, {"summary", t.summary},
                       {"parameters", params}, {"tolerances", t.tolerances}});
    }
    return out;
}

int do_list(const std::string& task, bool as_json) {
    if (task.empty()) {
        if (as_json) std::cout << catalog_json().dump(2) << "\n";
        else std::cout << render_catalog();
        return kPass;
    }
    for (const auto& t : catalog_json())
        if (t["task"] == task || t["family"] == task) {
            std::cout << t.dump(2) << "\n";
            return kPass;
        }
    std::cerr << "unknown task '" << task << "'\ndid you mean:\n";
    for (const auto& s : suggest_tasks(task)) std::cerr << "  " << s << "\n";
    return kUsage;
}

int do_run(const std::string& path, std::optional<std::uint64_t> seed, std::string out, bool stamp, int jobs) {
    const ExperimentConfig cfg = parse_config(read_json(path), seed);
    if (out.empty()) out = cfg.output;
    const RunResult r = run_experiment(cfg, {stamp, jobs});
    const std::string text = r.report.dump(2) + "\n";
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        std::ofstream f(out);
        if (!f) throw ConfigError("cannot write report to '" + out + "'");
        f << text;
        std::cerr << "report written to " << out << "\n";
    }
    if (!r.pass)
        for (const auto& rec : r.report["results"])
            if (!rec["pass"].get<bool>()) std::cerr << "FAILED " << rec.dump() << "\n";
    return r.pass ? kPass : kFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"configlab - combinatorial calculus on configuration spaces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string config, out, task;
    std::optional<std::uint64_t> seed;
    bool no_stamp = false, as_json = false;
    int jobs = 1;

    auto* run = app.add_subcommand("run", "run an experiment config and emit a JSON report");
    run->add_option("config", config, "experiment config (JSON)")->required();
    run->add_option("--seed", seed, "override plan.master_seed");
    run->add_option("--out", out, "report path (default: config 'output' or stdout)");
    run->add_flag("--no-timestamp", no_stamp, "omit the timestamp field");
    run->add_option("--jobs", jobs, "worker threads for replica loops")->check(CLI::Range(1, 256));

    auto* list = app.add_subcommand("list", "print the task catalog");
    list->add_option("task", task, "show a single task or family");
    list->add_flag("--json", as_json, "machine-readable catalog");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config, "experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    try {
        if (*list) return do_list(task, as_json);
        if (*validate) {
            const auto cfg = parse_config(read_json(config));
            std::cout << "ok: " << cfg.name << " (" << cfg.task << ")\n";
            return kPass;
        }
        return do_run(config, seed, out, !no_stamp, jobs);
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const CapacityError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    } catch (...) {
        std::cerr << "error: unknown failure\n";
        return kFail;
    }
}
