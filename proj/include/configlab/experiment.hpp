#pragma once

// Experiment configs, the task catalog, and the runner behind the CLI.

#include <algorithm>
#include <ctime>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "serialization.hpp"

namespace configlab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};

// ---------------------------------------------------------------- catalog

struct TaskParam {
    std::string name;
    json fallback;
    std::string help;
};

struct TaskInfo {
    std::string name;
    std::string family;
    std::string ground;
    std::string summary;
    std::vector<TaskParam> params;
    std::vector<std::string> tolerances;
};

inline const std::vector<TaskInfo>& task_catalog() {
    static const std::vector<TaskInfo> cat = {
        {"algebra-suite", "algebra-suite", "discrete",
         "K/K^-1 round trip, Fourier property, Minlos pairing, convolution laws, projection round trip, "
         "Lenard positivity, measure-convolution commutation",
         {{"trials", 20, "random inputs per identity"}, {"z", 1.0, "intensity for the Minlos pairing"}},
         {"lattice", "relative"}},
        {"identity:mecke", "identity", "continuum",
         "Mecke identity for a Poisson process: E sum_x h(g,x) = z int E h(g+x,x) dx",
         {{"z", 2.0, "Poisson intensity"},
          {"functional", "one", "one | indicator | pairs"},
          {"region", nullptr, "sub-box [[lo,hi],...] for indicator/pairs (default: lower half of axis 0)"}},
         {"z_score"}},
        {"identity:gnz", "identity", "continuum",
         "GNZ identity for a Strauss process sampled by birth-death MCMC",
         {{"beta", 2.0, "Strauss activity"},
          {"g", 0.5, "Strauss interaction in [0,1]"},
          {"R", 0.1, "interaction range"},
          {"functional", "one", "one | neighbours"},
          {"min_effective", 0, "required effective sample size"}},
         {"z_score", "balance"}},
        {"identity:superposition", "identity", "continuum",
         "superposition of Poisson(z1) and Poisson(z2): k1, k2 and count law of Poisson(z1+z2)",
         {{"z1", 1.0, "first intensity"}, {"z2", 2.0, "second intensity"}, {"n_max", 12, "largest tabulated count"}},
         {"z_score", "tv"}},
        {"identity:counts", "identity", "continuum",
         "empirical count law of a Poisson / mixed / superposed model vs the mixing-density prediction",
         {{"model", json{{"type", "superposition"},
                         {"left", {{"type", "mixed"}, {"mixing", {{"family", "exponential"}, {"rate", 1.0}}}}},
                         {"right", {{"type", "mixed"}, {"mixing", {{"family", "exponential"}, {"rate", 1.0}}}}}},
           "process model (poisson | mixed | superposition)"},
          {"n_max", 8, "largest tabulated count"}},
         {"z_score", "tv"}},
        {"generator-suite", "generator-suite", "discrete",
         "closed form vs K^-1 L K, derivation property, adjoint pairing and Leibniz rule, invariance and "
         "closure, contact-model first-order stationarity",
         {{"kernels", 10, "random kernels"},
          {"k_trunc", 2, "largest |omega|"},
          {"density", 0.4, "probability that a kernel entry is present"}},
         {"lattice", "relative", "stationarity", "closure"}},
        {"process-report", "process-report", "discrete",
         "correlation functional, Lenard positivity, uniqueness diagnostic, projection round trip and "
         "Papangelou intensity of one process model",
         {{"model", json{{"type", "poisson"}, {"z", 1.0}}, "process model (poisson | mixed | gibbs_pairwise | table)"},
          {"N", nullptr, "largest order for s_n (default: site count)"},
          {"trials", 200, "Lenard trials"}},
         {"lattice", "relative"}},
    };
    return cat;
}

inline std::vector<std::string> task_families() {
    std::vector<std::string> f;
    for (const auto& t : task_catalog())
        if (std::find(f.begin(), f.end(), t.family) == f.end()) f.push_back(t.family);
    return f;
}

inline const TaskInfo* find_task(const std::string& name) {
    for (const auto& t : task_catalog())
        if (t.name == name) return &t;
    return nullptr;
}

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline std::vector<std::string> suggest_tasks(const std::string& name) {
    std::vector<std::pair<std::size_t, std::string>> scored;
    for (const auto& t : task_catalog()) {
        std::size_t d = edit_distance(name, t.name);
        if (t.name.find(name) != std::string::npos || name.find(t.family) != std::string::npos) d = 0;
        scored.emplace_back(d, t.name);
    }
    std::stable_sort(scored.begin(), scored.end());
    std::vector<std::string> out;
    for (const auto& [d, n] : scored)
        if (d <= 4 || out.size() < 2) out.push_back(n);
    if (out.size() > 4) out.resize(4);
    return out;
}

inline std::string render_catalog() {
    std::ostringstream os;
    os << "task families:\n";
    for (const auto& f : task_families()) {
        os << "  " << f << "\n";
        for (const auto& t : task_catalog()) {
            if (t.family != f) continue;
            os << "    " << t.name << "  [" << t.ground << " ground]\n";
            os << "      " << t.summary << "\n";
            for (const auto& p : t.params)
                os << "      " << p.name << " = " << (p.fallback.is_null() ? "(derived)" : p.fallback.dump())
                   << "  " << p.help << "\n";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------- config

inline const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> t = {
        {"lattice", 1e-10}, {"relative", 1e-10}, {"stationarity", 1e-12}, {"closure", 1e-9},
        {"z_score", 4.0},   {"tv", 0.02},         {"balance", 1e-12},
    };
    return t;
}

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string name;
    json ground;
    std::string task;
    json parameters;  // defaults filled in
    RunPlan plan;
    std::map<std::string, double> tolerances;
    std::string output;
};

inline ExperimentConfig parse_config(const json& j, std::optional<std::uint64_t> seed_override = {}) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known = {"schema_version", "name",  "ground", "task",
                                                   "parameters",     "plan", "tolerances", "output"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown config field '" + it.key() + "'");

    ExperimentConfig c;
    c.schema_version = j.value("schema_version", kSchemaVersion);
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    if (!j.contains("name") || !j["name"].is_string()) throw ConfigError("config needs a string 'name'");
    c.name = j["name"];
    if (!j.contains("task") || !j["task"].is_string()) throw ConfigError("config needs a string 'task'");
    c.task = j["task"];
    const TaskInfo* info = find_task(c.task);
    if (!info) {
        std::string s;
        for (const auto& n : suggest_tasks(c.task)) s += (s.empty() ? "" : ", ") + n;
        throw ConfigError("unknown task '" + c.task + "'; did you mean: " + s);
    }
    if (!j.contains("ground")) throw ConfigError("config needs a 'ground'");
    c.ground = j["ground"];
    const GroundModel g = ground_from_json(c.ground);
    const bool discrete = std::holds_alternative<DiscreteGround>(g);
    if (discrete != (info->ground == "discrete"))
        throw ConfigError("task '" + c.task + "' needs a " + info->ground + " ground");

    const json params = j.value("parameters", json::object());
    if (!params.is_object()) throw ConfigError("'parameters' must be an object");
    c.parameters = json::object();
    for (const auto& p : info->params) c.parameters[p.name] = params.contains(p.name) ? params[p.name] : p.fallback;
    for (auto it = params.begin(); it != params.end(); ++it) {
        const bool ok = std::any_of(info->params.begin(), info->params.end(),
                                    [&](const TaskParam& p) { return p.name == it.key(); });
        if (!ok) throw ConfigError("task '" + c.task + "' has no parameter '" + it.key() + "'");
    }

    if (!j.contains("plan") || !j["plan"].is_object()) throw ConfigError("config needs a 'plan' object");
    const json& plan = j["plan"];
    for (auto it = plan.begin(); it != plan.end(); ++it) {
        static const std::vector<std::string> pk = {"replicas", "burn_in",         "thinning",
                                                    "master_seed", "proposal_points", "batches"};
        if (std::find(pk.begin(), pk.end(), it.key()) == pk.end())
            throw ConfigError("unknown plan field '" + it.key() + "'");
        if (!it->is_number_integer() && !it->is_number_unsigned())
            throw ConfigError("plan field '" + it.key() + "' must be an integer");
    }
    if (seed_override) c.plan.master_seed = *seed_override;
    else if (plan.contains("master_seed")) c.plan.master_seed = plan["master_seed"].get<std::uint64_t>();
    else throw ConfigError("plan.master_seed is required (no implicit seeding)");
    c.plan.replicas = plan.value("replicas", c.plan.replicas);
    c.plan.burn_in = plan.value("burn_in", c.plan.burn_in);
    c.plan.thinning = plan.value("thinning", c.plan.thinning);
    c.plan.proposal_points = plan.value("proposal_points", c.plan.proposal_points);
    c.plan.batches = plan.value("batches", c.plan.batches);
    if (!discrete) c.plan.window = std::get<ContinuumWindow>(g);
    c.plan.validate();

    c.tolerances = default_tolerances();
    const json tol = j.value("tolerances", json::object());
    if (!tol.is_object()) throw ConfigError("'tolerances' must be an object");
    for (auto it = tol.begin(); it != tol.end(); ++it) {
        if (!c.tolerances.count(it.key())) throw ConfigError("unknown tolerance '" + it.key() + "'");
        if (!it->is_number() || it->get<double>() < 0) throw ConfigError("tolerance '" + it.key() + "' must be >= 0");
        c.tolerances[it.key()] = it->get<double>();
    }
    c.output = j.value("output", std::string{});
    return c;
}

// ---------------------------------------------------------------- model specs

inline ProcessModel process_from_json(const json& j, const std::optional<DiscreteGround>& g = {}) {
    require_field(j, "type", "model");
    const std::string t = j["type"];
    if (t == "poisson") {
        require_field(j, "z", "poisson model");
        return ProcessModel::poisson(j["z"].get<double>());
    }
    if (t == "mixed") {
        require_field(j, "mixing", "mixed model");
        return ProcessModel::mixed(mixing_from_json(j["mixing"]));
    }
    if (t == "superposition") {
        require_field(j, "left", "superposition model");
        require_field(j, "right", "superposition model");
        return ProcessModel::superposition(process_from_json(j["left"], g), process_from_json(j["right"], g));
    }
    if (t == "gibbs_pairwise") {
        require(g.has_value(), "gibbs_pairwise needs a discrete ground");
        require_field(j, "activity", "gibbs model");
        require_field(j, "phi", "gibbs model");
        auto act = j["activity"].get<std::vector<double>>();
        auto phi = j["phi"].get<std::vector<std::vector<double>>>();
        require(static_cast<int>(act.size()) == g->size(), "activity needs one value per site");
        require(static_cast<int>(phi.size()) == g->size(), "phi must be n x n");
        for (const auto& row : phi) require(static_cast<int>(row.size()) == g->size(), "phi must be n x n");
        auto r = DiscretePapangelou::pairwise(std::move(act), std::move(phi));
        return ProcessModel::gibbs(std::move(r));
    }
    if (t == "table") {
        require(g.has_value(), "table model needs a discrete ground");
        require_field(j, "probs", "table model");
        return ProcessModel::table(DiscreteTable(*g, j["probs"].get<std::vector<double>>()));
    }
    throw ValidationError("unknown model type '" + t + "'");
}

// ---------------------------------------------------------------- runner

struct RunOptions {
    bool timestamp = true;
    int jobs = 1;
};

struct RunResult {
    json report;
    bool pass = false;
};

namespace detail {

struct Suite {
    const ExperimentConfig& cfg;
    json results = json::array();
    json seeds = json::object();
    bool pass = true;

    double tol(const std::string& k) const { return cfg.tolerances.at(k); }

    std::uint64_t seed(const std::string& what) {
        const std::uint64_t s = derive_seed(cfg.plan.master_seed, seeds.size());
        seeds[what] = s;
        return s;
    }

    void record(const std::string& check, bool ok, json detail) {
        detail["check"] = check;
        detail["pass"] = ok;
        pass = pass && ok;
        results.push_back(std::move(detail));
    }
    void bound(const std::string& check, double value, double tolerance, json extra = json::object()) {
        extra["value"] = value;
        extra["tolerance"] = tolerance;
        record(check, std::isfinite(value) && value <= tolerance, std::move(extra));
    }
};

inline SetFunction random_function(const DiscreteGround& g, Stream& rng, double lo = -1, double hi = 1) {
    return SetFunction::tabulate(g, [&](Mask) { return rng.uniform(lo, hi); }, "random");
}

// random table whose mass lives on subsets of `sector`
inline DiscreteTable random_table(const DiscreteGround& g, Stream& rng, Mask sector) {
    std::vector<double> w(g.table_size(), 0.0);
    for (Mask m = 0; m < w.size(); ++m)
        if (!(m & ~sector)) w[m] = rng.uniform();
    return DiscreteTable::from_weights(g, std::move(w));
}

inline SetFunction restrict_to(const SetFunction& k, Mask sector) {
    return SetFunction::tabulate(k.ground(), [&](Mask m) { return (m & ~sector) ? 0.0 : k[m]; }, k.label());
}

inline void algebra_suite(Suite& s, const DiscreteGround& g) {
    const int n = g.size();
    require(n >= 1 && n <= 12, "algebra-suite needs 1..12 sites");
    const int trials = s.cfg.parameters["trials"].get<int>();
    const double z = s.cfg.parameters["z"].get<double>();
    require(trials >= 1, "trials must be positive");
    const double lat = s.tol("lattice"), rel = s.tol("relative");

    {
        Stream rng(s.seed("k_round_trip"));
        double e = 0;
        for (int t = 0; t < trials; ++t) {
            const SetFunction G = random_function(g, rng);
            e = std::max({e, max_abs_diff(k_inverse(k_transform(G)), G), max_abs_diff(k_transform(k_inverse(G)), G)});
        }
        s.bound("k_round_trip", e, lat, {{"trials", trials}});
    }
    {
        Stream rng(s.seed("fourier_property"));
        double e = 0, e2 = 0;
        for (int t = 0; t < trials; ++t) {
            const SetFunction a = random_function(g, rng), b = random_function(g, rng);
            e = std::max(e, max_abs_diff(k_transform(conv_union(a, b)), multiply(k_transform(a), k_transform(b))));
            e2 = std::max(e2, max_abs_diff(k_inverse(multiply(a, b)), conv_union(k_inverse(a), k_inverse(b))));
        }
        s.bound("fourier_property", e, lat, {{"trials", trials}});
        s.bound("inverse_fourier_property", e2, lat, {{"trials", trials}});
    }
    {
        Stream rng(s.seed("minlos_pairing"));
        double e = 0;
        for (int t = 0; t < trials; ++t) {
            const auto p = minlos_pairing(random_function(g, rng), random_function(g, rng), random_function(g, rng), z);
            e = std::max(e, std::abs(p.lhs - p.rhs) / std::max(1.0, std::abs(p.lhs)));
        }
        s.bound("minlos_pairing", e, rel, {{"trials", trials}, {"z", z}});
    }
    {
        Stream rng(s.seed("convolution_laws"));
        double e = 0;
        const SetFunction unit = SetFunction::delta_empty(g);
        for (int t = 0; t < trials; ++t) {
            const SetFunction a = random_function(g, rng), b = random_function(g, rng), c = random_function(g, rng);
            e = std::max({e, max_abs_diff(conv_disjoint(a, b), conv_disjoint(b, a)),
                          max_abs_diff(conv_disjoint(conv_disjoint(a, b), c), conv_disjoint(a, conv_disjoint(b, c))),
                          max_abs_diff(conv_union(a, b), conv_union(b, a)),
                          max_abs_diff(conv_union(conv_union(a, b), c), conv_union(a, conv_union(b, c))),
                          max_abs_diff(conv_disjoint(a, unit), a), max_abs_diff(conv_union(a, unit), a)});
        }
        s.bound("convolution_laws", e, lat, {{"trials", trials}});
    }
    {
        Stream rng(s.seed("exp_vector_convolution"));
        double e = 0;
        for (int t = 0; t < trials; ++t) {
            std::vector<double> f(n), h(n), fh(n);
            for (int i = 0; i < n; ++i) {
                f[i] = rng.uniform(-1, 1);
                h[i] = rng.uniform(-1, 1);
                fh[i] = f[i] + h[i];
            }
            e = std::max(e, max_abs_diff(conv_disjoint(exp_vector(g, f), exp_vector(g, h)), exp_vector(g, fh)));
            std::vector<double> f1(n);
            for (int i = 0; i < n; ++i) f1[i] = 1 + f[i];
            e = std::max(e, max_abs_diff(k_transform(exp_vector(g, f)), exp_vector(g, f1)));
        }
        s.bound("exp_vector_identities", e, lat, {{"trials", trials}});
    }
    {
        double e = 0;
        for (auto [z1, z2] : {std::pair{0.5, 1.5}, std::pair{1.0, 2.0}, std::pair{2.0, 0.25}})
            e = std::max(e, max_abs_diff(conv_disjoint(SetFunction::power(g, z1), SetFunction::power(g, z2)),
                                         SetFunction::power(g, z1 + z2)));
        s.bound("binomial_power", e, lat);
    }
    {
        Stream rng(s.seed("projection_round_trip"));
        double e = 0;
        for (double zz : {0.5, 1.0, 2.0})
            for (int t = 0; t < trials; ++t) {
                const SetFunction k = table_correlation(random_table(g, rng, g.all()));
                e = std::max({e, max_abs_diff(recover_correlation(projection_density(k, zz), zz), k)});
            }
        s.bound("projection_round_trip", e, lat, {{"z", {0.5, 1.0, 2.0}}});
    }
    {
        Stream rng(s.seed("lenard_tables"));
        bool ok = true;
        double worst = HUGE_VAL;
        for (int t = 0; t < std::max(1, trials / 4); ++t) {
            const auto r = lenard_pd_check(table_correlation(random_table(g, rng, g.all())), 50, rng.bits());
            ok = ok && r.passed;
            worst = std::min(worst, r.worst);
        }
        s.record("lenard_tables", ok, {{"worst_pairing", worst}});
    }
    if (n >= 2) {
        // complementary site blocks: the overlap mass is exactly zero
        Stream rng(s.seed("measure_convolution"));
        const Mask lowb = full_mask(n / 2), highb = g.all() ^ lowb;
        double e = 0, overlap = 0;
        for (int t = 0; t < trials; ++t) {
            const DiscreteTable a = random_table(g, rng, lowb), b = random_table(g, rng, highb);
            const auto mc = convolve_measures(a, b);
            overlap = std::max(overlap, mc.overlap_mass);
            e = std::max(e, max_abs_diff(table_correlation(mc.table), conv_disjoint(table_correlation(a), table_correlation(b))));
        }
        s.bound("measure_convolution_correlation", e, lat, {{"overlap_mass", overlap}, {"trials", trials}});
    }
}

inline ContinuumWindow default_half(const ContinuumWindow& w) {
    auto box = w.box();
    box[0].hi = 0.5 * (box[0].lo + box[0].hi);
    return ContinuumWindow(box);
}

inline ContinuumWindow region_param(const json& p, const ContinuumWindow& w) {
    if (p.is_null()) return default_half(w);
    std::vector<Interval> box;
    for (const auto& iv : p) {
        require(iv.is_array() && iv.size() == 2, "region entries must be [lo,hi]");
        box.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    ContinuumWindow r(box);
    require(w.contains(r), "region must lie inside the window");
    return r;
}

inline void identity_task(Suite& s, const std::string& which, int jobs) {
    RunPlan plan = s.cfg.plan;
    plan.jobs = jobs;
    const auto& w = plan.window;
    const json& P = s.cfg.parameters;
    const double zt = s.tol("z_score");
    if (which == "mecke") {
        const std::string f = P["functional"];
        PointFunctional h;
        if (f == "one") h = functionals::one();
        else if (f == "indicator") h = functionals::indicator(region_param(P["region"], w));
        else if (f == "pairs") h = functionals::pairs_in(region_param(P["region"], w));
        else throw ValidationError("mecke functional must be one | indicator | pairs");
        s.seeds["replica i"] = "derive_seed(master_seed, i)";
        const auto rep = verify_mecke(P["z"].get<double>(), h, plan);
        s.record("mecke", std::abs(rep.z_score) <= zt, to_json(rep, plan));
    } else if (which == "gnz") {
        const auto r = strauss(P["beta"].get<double>(), P["g"].get<double>(), P["R"].get<double>());
        const std::string f = P["functional"];
        PointFunctional h;
        if (f == "one") h = functionals::one();
        else if (f == "neighbours") h = functionals::neighbours(P["R"].get<double>());
        else throw ValidationError("gnz functional must be one | neighbours");
        s.seeds["chain"] = derive_seed(plan.master_seed, 0);
        s.seeds["quadrature"] = derive_seed(plan.master_seed, 1);
        double balance = 0;
        const auto rep = verify_gnz(r, h, plan, &balance);
        json d = to_json(rep, plan);
        d["balance_error"] = balance;
        d["min_effective"] = P["min_effective"];
        s.record("gnz", std::abs(rep.z_score) <= zt && rep.n_effective >= P["min_effective"].get<long long>() &&
                            balance <= s.tol("balance"),
                 d);
    } else if (which == "superposition") {
        const double z1 = P["z1"], z2 = P["z2"];
        const auto model = ProcessModel::superposition(ProcessModel::poisson(z1), ProcessModel::poisson(z2));
        s.seeds["replica i"] = "derive_seed(master_seed, i)";
        std::vector<PointConfig> samples(plan.replicas);
        parallel_for(plan.replicas, jobs, [&](int i) {
            Stream rng(derive_seed(plan.master_seed, static_cast<std::uint64_t>(i)));
            samples[i] = sample_process(model, w, rng);
        });
        auto halves = w.box();
        auto left = halves, right = halves;
        const double mid = 0.5 * (halves[0].lo + halves[0].hi);
        left[0].hi = mid;
        right[0].lo = mid;
        const ContinuumWindow A(left), B(right);
        const auto k1 = estimate_correlation(samples, {A}, w);
        const auto k2 = estimate_correlation(samples, {A, B}, w);
        const double zs = z1 + z2;
        s.record("k1", std::abs(k1.estimate - zs) <= zt * k1.se,
                 {{"estimate", k1.estimate}, {"se", k1.se}, {"expected", zs}});
        s.record("k2", std::abs(k2.estimate - zs * zs) <= zt * k2.se,
                 {{"estimate", k2.estimate}, {"se", k2.se}, {"expected", zs * zs}});
        const auto cr = count_distribution_check(model, P["n_max"].get<int>(), plan);
        json d = to_json(cr);
        d["tolerance"] = s.tol("tv");
        s.record("count_law", cr.tv <= s.tol("tv") && cr.overlap_count == 0, d);
    } else if (which == "counts") {
        const auto model = process_from_json(P["model"]);
        s.seeds["replica i"] = "derive_seed(master_seed, i)";
        const auto cr = count_distribution_check(model, P["n_max"].get<int>(), plan);
        json d = to_json(cr);
        d["tolerance"] = s.tol("tv");
        s.record("count_law", cr.tv <= s.tol("tv") && cr.max_abs_z <= zt, d);
    }
}

inline void generator_suite(Suite& s, const DiscreteGround& g) {
    const int n = g.size();
    require(n >= 2 && n <= 10, "generator-suite needs 2..10 sites");
    const int kernels = s.cfg.parameters["kernels"];
    const int kt = s.cfg.parameters["k_trunc"];
    const double density = s.cfg.parameters["density"];
    const double lat = s.tol("lattice");
    Stream rng(s.seed("kernels"));

    std::vector<BirthDeathKernel> ks;
    for (int i = 0; i < kernels; ++i) ks.push_back(random_kernel(g, kt, density, rng));
    std::vector<std::vector<double>> S(n, std::vector<double>(n, 0.0));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < x; ++y) S[x][y] = S[y][x] = rng.uniform(0.1, 1.0);
    const auto a = row_normalized_dispersal(g, S);
    ks.push_back(BirthDeathKernel::contact(g, a));

    double eq = 0, der = 0, pair = 0, lz = 0, lc = 0, raw = 0;
    for (const auto& k : ks) {
        const LatticeOperator C = hat_L_closed(k);
        eq = std::max(eq, max_abs_diff(C, hat_L_bruteforce(k)));
        der = std::max(der, derivation_residual_all(C, random_function(g, rng)));
        const SetFunction G = random_function(g, rng), k1 = random_function(g, rng), k2 = random_function(g, rng);
        const double lhs = pairing(C.apply(G), k1), rhs = pairing(G, adjoint_hat_L(C).apply(k1));
        pair = std::max(pair, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        const Mask half = full_mask(n / 2);
        const auto ld = check_adjoint_leibniz(C, restrict_to(k1, half), restrict_to(k2, g.all() ^ half));
        lz = std::max(lz, ld.raw);
        const auto lg = check_adjoint_leibniz(C, k1, k2);
        lc = std::max(lc, lg.corrected);
        raw = std::max(raw, lg.raw);
    }
    s.bound("closed_form_vs_bruteforce", eq, lat, {{"kernels", ks.size()}});
    s.bound("derivation_property", der, lat);
    s.bound("adjoint_pairing", pair, s.tol("relative"));
    s.bound("adjoint_leibniz_disjoint_supports", lz, lat);
    s.bound("adjoint_leibniz_after_coincidence_defect", lc, lat, {{"raw_residual_generic", raw}});

    {
        const LatticeOperator C = hat_L_closed(ks.back());
        double e = 0;
        for (double c : {0.5, 1.0, 3.0}) {
            const SetFunction k = SetFunction::tabulate(g, [c](Mask m) { return std::pow(c, card(m)); });
            e = std::max(e, invariance_residual(C, k).entrywise.at(1));
        }
        s.bound("contact_first_order_stationarity", e, s.tol("stationarity"), {{"c", {0.5, 1.0, 3.0}}});
    }
    {
        // invariants: anything carried by subsets of frozen (parentless) sites
        const Mask live = g.all() ^ full_mask(n / 2);
        const auto k = random_kernel(g, kt, density, rng, live);
        const Mask frozen = frozen_sites(k);
        const LatticeOperator C = hat_L_closed(k);
        const SetFunction k1 = restrict_to(random_function(g, rng), frozen);
        const SetFunction k2 = restrict_to(random_function(g, rng), frozen);
        const auto cl = convolution_closure_check(C, k1, k2, 1.0, lat, s.tol("closure"));
        double pw = 0;
        for (int p = 1; p <= 4; ++p) pw = std::max(pw, invariance_residual(C, conv_power(k1, p)).max_entry());
        s.record("convolution_closure", cl.holds,
                 {{"residual", cl.residual.max_entry()}, {"precondition_ok", cl.precondition_ok},
                  {"failing_input", cl.failing_input}});
        s.bound("convolution_powers_invariant", pw, s.tol("closure"), {{"max_power", 4}});
    }
}

inline void process_report(Suite& s, const DiscreteGround& g) {
    require(g.size() <= 12, "process-report needs at most 12 sites");
    const json& P = s.cfg.parameters;
    const ProcessModel model = process_from_json(P["model"], g);
    const DiscreteTable table = to_discrete_table(model, g);
    const SetFunction k = std::holds_alternative<ProcessModel::Gibbs>(model.v) ? table_correlation(table)
                                                                               : correlation_functional(model, g);
    const SetFunction kt = table_correlation(table);
    const double lat = s.tol("lattice");
    s.bound("k_empty_is_one", std::abs(k[0] - 1), lat);
    const auto lr = lenard_pd_check(kt, P["trials"].get<int>(), s.seed("lenard"));
    s.record("lenard_positive_definite", lr.passed, {{"worst_pairing", lr.worst}, {"trials", lr.trials}});
    const int N = P["N"].is_null() ? g.size() : P["N"].get<int>();
    const auto u = uniqueness_diagnostic(k, N);
    s.record("uniqueness_diagnostic", true, to_json(u));
    s.bound("projection_round_trip", max_abs_diff(recover_correlation(projection_density(kt, 1.0), 1.0), kt), lat);

    // Papangelou intensity of the table vs the model's own intensity
    std::function<double(Mask, int)> expected;
    if (auto* p = std::get_if<ProcessModel::Poisson>(&model.v)) {
        const double z = p->z;
        expected = [z](Mask, int) { return z; };
    } else if (auto* gb = std::get_if<ProcessModel::Gibbs>(&model.v)) {
        expected = [gb](Mask m, int x) { return gb->r(m, x); };
    }
    if (expected) {
        double e = 0;
        for (Mask m = 0; m < g.table_size(); ++m)
            for (int x = 0; x < g.size(); ++x)
                if (!has(m, x) && table(m) > 0) {
                    const double want = expected(m, x);
                    e = std::max(e, std::abs(papangelou_of_table(table, m, x) - want) / std::max(1.0, std::abs(want)));
                }
        s.bound("papangelou_of_table", e, s.tol("relative"));
    }
}

inline std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

} // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
    detail::Suite s{cfg};
    const GroundModel g = ground_from_json(cfg.ground);
    const std::string& task = cfg.task;
    if (task == "algebra-suite") detail::algebra_suite(s, std::get<DiscreteGround>(g));
    else if (task == "generator-suite") detail::generator_suite(s, std::get<DiscreteGround>(g));
    else if (task == "process-report") detail::process_report(s, std::get<DiscreteGround>(g));
    else if (task.rfind("identity:", 0) == 0) detail::identity_task(s, task.substr(9), opt.jobs);
    else throw ConfigError("unknown task '" + task + "'");

    json tol = json::object();
    for (const auto& [k, v] : cfg.tolerances) tol[k] = v;
    json plan = {{"replicas", cfg.plan.replicas}, {"burn_in", cfg.plan.burn_in}, {"thinning", cfg.plan.thinning},
                 {"master_seed", cfg.plan.master_seed}, {"proposal_points", cfg.plan.proposal_points},
                 {"batches", cfg.plan.batches}};
    json report = {{"schema_version", kSchemaVersion},
                   {"name", cfg.name},
                   {"task", task},
                   {"ground", cfg.ground},
                   {"parameters", cfg.parameters},
                   {"plan", plan},
                   {"tolerances", tol},
                   {"seed", cfg.plan.master_seed},
                   {"seed_tree", {{"master_seed", cfg.plan.master_seed},
                                  {"rule", "child i = derive_seed(master_seed, i) (splitmix64)"},
                                  {"children", s.seeds}}},
                   {"results", s.results},
                   {"pass", s.pass},
                   {"versions", {{"configlab", kVersion}, {"schema", kSchemaVersion}}}};
    if (opt.timestamp) report["timestamp"] = detail::utc_timestamp();
    return {report, s.pass};
}

} // namespace configlab
