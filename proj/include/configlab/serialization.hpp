#pragma once

// JSON forms of grounds, tables, kernels, mixing densities and reports.

#include <json.hpp>

#include "generators.hpp"
#include "samplers.hpp"

namespace configlab {

using json = nlohmann::json;

inline void require_field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
}

// ---------------------------------------------------------------- grounds

inline json to_json(const DiscreteGround& g) { return {{"kind", "discrete"}, {"weights", g.weights()}}; }

inline json to_json(const ContinuumWindow& w) {
    json box = json::array();
    for (auto [lo, hi] : w.box()) box.push_back({lo, hi});
    return {{"kind", "continuum"}, {"box", box}};
}

inline json to_json(const GroundModel& g) {
    return std::visit([](const auto& x) { return to_json(x); }, g);
}

inline GroundSpec ground_spec_from_json(const json& j) {
    require_field(j, "kind", "ground");
    GroundSpec s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "discrete") {
        require_field(j, "weights", "ground");
        require(j.at("weights").is_array(), "ground: weights must be an array");
        for (const auto& w : j.at("weights")) {
            require(w.is_number(), "ground: weights must be numbers");
            s.weights.push_back(w.get<double>());
        }
    } else if (kind == "continuum") {
        s.kind = GroundSpec::Kind::Continuum;
        require_field(j, "box", "ground");
        require(j.at("box").is_array(), "ground: box must be an array of [lo,hi]");
        for (const auto& iv : j.at("box")) {
            require(iv.is_array() && iv.size() == 2 && iv[0].is_number() && iv[1].is_number(),
                    "ground: box entries must be [lo,hi]");
            s.box.push_back({iv[0].get<double>(), iv[1].get<double>()});
        }
    } else {
        throw ValidationError("ground: kind must be 'discrete' or 'continuum'");
    }
    return s;
}

inline GroundModel ground_from_json(const json& j) { return make_ground(ground_spec_from_json(j)); }

inline DiscreteGround discrete_ground_from_json(const json& j) {
    const GroundModel g = ground_from_json(j);
    if (!std::holds_alternative<DiscreteGround>(g)) throw ValidationError("a discrete ground is required");
    return std::get<DiscreteGround>(g);
}

inline ContinuumWindow window_from_json(const json& j) {
    const GroundModel g = ground_from_json(j);
    if (!std::holds_alternative<ContinuumWindow>(g)) throw ValidationError("a continuum ground is required");
    return std::get<ContinuumWindow>(g);
}

// ---------------------------------------------------------------- tables

inline json to_json(const SetFunction& f) {
    return {{"ground", to_json(f.ground())}, {"label", f.label()}, {"values", f.values()}};
}

inline SetFunction set_function_from_json(const json& j) {
    require_field(j, "ground", "set function");
    require_field(j, "values", "set function");
    return {discrete_ground_from_json(j.at("ground")), j.at("values").get<std::vector<double>>(),
            j.value("label", std::string{})};
}

// row-major: plus-mask outer, minus-mask inner
inline json to_json(const PairSetFunction& f) {
    return {{"ground", to_json(f.ground())}, {"layout", "plus-major"}, {"label", f.label()}, {"values", f.values()}};
}

inline PairSetFunction pair_function_from_json(const json& j) {
    require_field(j, "ground", "pair function");
    require_field(j, "values", "pair function");
    return {discrete_ground_from_json(j.at("ground")), j.at("values").get<std::vector<double>>(),
            j.value("label", std::string{})};
}

inline json to_json(const DiscreteTable& t) { return {{"ground", to_json(t.ground())}, {"probs", t.probs()}}; }

inline DiscreteTable table_from_json(const json& j) {
    require_field(j, "ground", "table");
    require_field(j, "probs", "table");
    return {discrete_ground_from_json(j.at("ground")), j.at("probs").get<std::vector<double>>()};
}

// ---------------------------------------------------------------- mixing densities

inline json to_json(const MixingDensity& p) {
    using F = MixingDensity::Family;
    switch (p.family()) {
    case F::PointMass:
        return {{"family", "point_mass"}, {"z", p.offset()}};
    case F::Gamma:
        return {{"family", "gamma"}, {"shape", p.shape()}, {"rate", p.rate()}, {"cells", p.size()},
                {"offset", p.offset()}, {"step", p.step()}, {"masses", p.masses()}};
    default:
        return {{"family", "grid"}, {"offset", p.offset()}, {"step", p.step()}, {"masses", p.masses()}};
    }
}

inline MixingDensity mixing_from_json(const json& j) {
    require_field(j, "family", "mixing density");
    const std::string f = j.at("family").get<std::string>();
    if (f == "point_mass") {
        require_field(j, "z", "mixing density");
        return MixingDensity::point_mass(j.at("z").get<double>());
    }
    if (f == "exponential") {
        require_field(j, "rate", "mixing density");
        return MixingDensity::exponential(j.at("rate").get<double>(), j.value("cells", 512));
    }
    if (f == "gamma") {
        require_field(j, "shape", "mixing density");
        require_field(j, "rate", "mixing density");
        return MixingDensity::gamma(j.at("shape").get<int>(), j.at("rate").get<double>(), j.value("cells", 512));
    }
    if (f == "grid") {
        require_field(j, "offset", "mixing density");
        require_field(j, "masses", "mixing density");
        return MixingDensity::from_grid(j.at("offset").get<double>(), j.value("step", 0.0),
                                        j.at("masses").get<std::vector<double>>());
    }
    throw ValidationError("mixing density: unknown family '" + f + "'");
}

// ---------------------------------------------------------------- kernels

inline json to_json(const BirthDeathKernel& k) {
    auto list = [&](const std::vector<KernelEntry>& es) {
        json a = json::array();
        for (const auto& e : es) {
            std::vector<int> om;
            for (int i = 0; i < k.ground().size(); ++i)
                if (has(e.omega, i)) om.push_back(i);
            a.push_back({{"x", e.x}, {"omega", om}, {"value", e.value}});
        }
        return a;
    };
    return {{"ground", to_json(k.ground())}, {"k_trunc", k.k_trunc()}, {"full_range", k.full_range()},
            {"death", list(k.death_entries())}, {"birth", list(k.birth_entries())}};
}

inline BirthDeathKernel kernel_from_json(const json& j) {
    require_field(j, "ground", "kernel");
    const DiscreteGround g = discrete_ground_from_json(j.at("ground"));
    auto read = [&](const char* key) {
        std::vector<KernelEntry> out;
        if (!j.contains(key)) return out;
        for (const auto& e : j.at(key)) {
            require_field(e, "x", "kernel entry");
            require_field(e, "value", "kernel entry");
            KernelEntry k{e.at("x").get<int>(), 0, e.at("value").get<double>()};
            for (int i : e.value("omega", std::vector<int>{})) {
                require(i >= 0 && i < g.size(), "kernel entry omega site out of range");
                require(!has(k.omega, i), "kernel entry omega repeats a site");
                k.omega |= bit(i);
            }
            out.push_back(k);
        }
        return out;
    };
    return {g, j.value("k_trunc", 2), read("death"), read("birth"), j.value("full_range", false)};
}

// ---------------------------------------------------------------- reports

inline json to_json(const RunPlan& p) {
    return {{"window", to_json(p.window)}, {"replicas", p.replicas}, {"burn_in", p.burn_in},
            {"thinning", p.thinning}, {"master_seed", p.master_seed}, {"proposal_points", p.proposal_points},
            {"batches", p.batches}};
}

inline json to_json(const IdentityReport& r) {
    return {{"identity", r.identity}, {"lhs", r.lhs_mean}, {"rhs", r.rhs_mean}, {"lhs_se", r.lhs_se},
            {"rhs_se", r.rhs_se}, {"diff_se", r.diff_se}, {"z_score", r.z_score}, {"pass", r.pass},
            {"n_effective", r.n_effective}, {"samples", r.samples}, {"overlap_count", r.overlap_count}};
}

inline json to_json(const IdentityReport& r, const RunPlan& p) {
    json j = to_json(r);
    j["plan"] = to_json(p);
    return j;
}

inline json to_json(const NormFit& f) {
    std::vector<int> w;
    for (int i = 0; f.attained_at >> i; ++i)
        if (has(f.attained_at, i)) w.push_back(i);
    return {{"C", f.C}, {"delta", f.delta}, {"norm", f.norm}, {"attained_at", w}};
}

inline json to_json(const UniquenessReport& u) {
    json j = {{"s_values", u.s_values}, {"verdict", to_string(u.verdict)}, {"fitted_delta", u.fitted_delta}};
    if (u.fitted_delta >= 0) j["fit"] = to_json(u.fit);
    return j;
}

inline json to_json(const InvarianceResidual& r) {
    return {{"by_order_entrywise", r.entrywise}, {"by_order_pairing", r.pairing}};
}

inline json to_json(const CountReport& c) {
    return {{"empirical", c.empirical}, {"analytic", c.analytic}, {"se", c.se}, {"z", c.z},
            {"tail_empirical", c.tail_empirical}, {"tail_analytic", c.tail_analytic}, {"tv", c.tv},
            {"max_abs_z", c.max_abs_z}, {"samples", c.samples}, {"overlap_count", c.overlap_count}};
}

inline json to_json(const LeibnizReport& l) {
    return {{"raw", l.raw}, {"coincidence_defect", l.defect}, {"corrected", l.corrected},
            {"supports_disjoint", l.supports_disjoint}};
}

} // namespace configlab
