#pragma once

// Continuum Monte Carlo: Poisson / mixed Poisson / superposition samplers,
// spatial birth–death MCMC for Gibbs models, Mecke and GNZ verifiers,
// correlation and count-law estimators.

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "processes.hpp"

namespace configlab {

struct RunPlan {
    ContinuumWindow window = ContinuumWindow::unit(2);
    int replicas = 10000;      // independent replicas, or recorded states for MCMC
    int burn_in = 10000;       // MCMC proposals discarded up front
    int thinning = 10;         // MCMC proposals between recorded states
    std::uint64_t master_seed = 0;
    int proposal_points = 64;  // S uniform points for insertion integrals
    int batches = 32;          // batch means for MCMC standard errors
    int jobs = 1;

    void validate() const {
        require(replicas >= 1, "replicas must be at least 1");
        require(burn_in >= 0 && thinning >= 0, "burn_in and thinning must be nonnegative");
        require(proposal_points >= 1, "proposal_points must be positive");
        require(batches >= 2, "need at least two batches");
        require(jobs >= 1, "jobs must be positive");
    }
};

struct IdentityReport {
    std::string identity;
    double lhs_mean = 0, rhs_mean = 0;
    double lhs_se = 0, rhs_se = 0;
    double diff_se = 0;
    double z_score = 0;
    bool pass = false;
    long long n_effective = 0;
    long long samples = 0;
    long long overlap_count = 0;
};

// deterministic fan-out: results land in index-addressed slots
template <class Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += jobs) fn(i);
        });
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------- basic statistics

struct MeanSe {
    double mean = 0, se = 0, var = 0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    MeanSe r;
    if (v.empty()) return r;
    double s = 0;
    for (double x : v) s += x;
    r.mean = s / v.size();
    double q = 0;
    for (double x : v) q += (x - r.mean) * (x - r.mean);
    r.var = v.size() > 1 ? q / (v.size() - 1) : 0;
    r.se = std::sqrt(r.var / v.size());
    return r;
}

// batch-means standard error for autocorrelated streams
inline MeanSe batch_means(const std::vector<double>& v, int batches) {
    MeanSe r = mean_se(v);
    const std::size_t len = v.size() / batches;
    if (len < 2) return r;
    std::vector<double> bm(batches);
    for (int b = 0; b < batches; ++b) {
        double s = 0;
        for (std::size_t i = 0; i < len; ++i) s += v[b * len + i];
        bm[b] = s / len;
    }
    const MeanSe m = mean_se(bm);
    r.se = m.se;  // sd(batch means)/sqrt(B)
    return r;
}

inline IdentityReport make_report(std::string identity, const std::vector<double>& lhs,
                                  const std::vector<double>& rhs, int batches = 0) {
    std::vector<double> d(lhs.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = lhs[i] - rhs[i];
    auto stat = [&](const std::vector<double>& v) { return batches ? batch_means(v, batches) : mean_se(v); };
    const MeanSe L = stat(lhs), R = stat(rhs), D = stat(d);
    IdentityReport rep;
    rep.identity = std::move(identity);
    rep.lhs_mean = L.mean;
    rep.rhs_mean = R.mean;
    rep.lhs_se = L.se;
    rep.rhs_se = R.se;
    rep.diff_se = D.se;
    rep.samples = static_cast<long long>(d.size());
    if (D.se > 0) {
        rep.z_score = D.mean / D.se;
        rep.n_effective = static_cast<long long>(std::min<double>(double(d.size()), D.var / (D.se * D.se)));
    } else {
        rep.z_score = D.mean == 0 ? 0 : HUGE_VAL;
        rep.n_effective = static_cast<long long>(d.size());
    }
    rep.pass = std::abs(rep.z_score) <= 4.0;
    return rep;
}

// ---------------------------------------------------------------- samplers

inline void insert_uniform(PointConfig& c, const ContinuumWindow& w, Stream& rng) {
    std::vector<double> p(w.dim());
    do { w.sample_point(rng, p.data()); } while (!c.try_insert(p));  // coincident draw: resample
}

inline PointConfig sample_poisson(const ContinuumWindow& w, double z, Stream& rng) {
    require(std::isfinite(z) && z > 0, "Poisson intensity must be positive");
    const std::uint64_t n = rng.poisson(z * w.volume());
    PointConfig c(w.dim());
    for (std::uint64_t i = 0; i < n; ++i) insert_uniform(c, w, rng);
    return c;
}

inline PointConfig sample_mixed_poisson(const ContinuumWindow& w, const MixingDensity& p, Stream& rng) {
    return sample_poisson(w, p.sample(rng), rng);
}

inline PointConfig superpose(const PointConfig& a, const PointConfig& b) {
    require(a.dim() == b.dim(), "superposed configurations differ in dimension");
    PointConfig out = a;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (!out.try_insert(b.point(i))) throw OverlapError("coincident point in superposition");
    return out;
}

inline PointConfig sample_process(const ProcessModel& model, const ContinuumWindow& w, Stream& rng) {
    return std::visit(
        [&](const auto& m) -> PointConfig {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ProcessModel::Poisson>) {
                return sample_poisson(w, m.z, rng);
            } else if constexpr (std::is_same_v<T, ProcessModel::Mixed>) {
                return sample_mixed_poisson(w, m.p, rng);
            } else if constexpr (std::is_same_v<T, ProcessModel::Superposition>) {
                const PointConfig a = sample_process(*m.left, w, rng);
                const PointConfig b = sample_process(*m.right, w, rng);
                return superpose(a, b);
            } else {
                throw UnsupportedError("continuum sampling supports Poisson, MixedPoisson and Superposition");
            }
        },
        model.v);
}

// mixing law of the count: Poisson → point mass, superposition → convolution
inline MixingDensity mixing_of(const ProcessModel& model) {
    return std::visit(
        [&](const auto& m) -> MixingDensity {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ProcessModel::Poisson>) return MixingDensity::point_mass(m.z);
            else if constexpr (std::is_same_v<T, ProcessModel::Mixed>) return m.p;
            else if constexpr (std::is_same_v<T, ProcessModel::Superposition>)
                return mixing_convolution(mixing_of(*m.left), mixing_of(*m.right));
            else throw UnsupportedError("count law needs Poisson, MixedPoisson or Superposition");
        },
        model.v);
}

// ---------------------------------------------------------------- Gibbs models

struct ContinuumPapangelou {
    std::function<double(const PointConfig&, std::span<const double>)> eval;
    double r_max = 0;  // known upper bound used by the sampler's stability check
    std::string descriptor;

    double operator()(const PointConfig& g, std::span<const double> x) const { return eval(g, x); }

    static ContinuumPapangelou constant(double z) {
        return {[z](const PointConfig&, std::span<const double>) { return z; }, z,
                "constant(" + std::to_string(z) + ")"};
    }
};

inline int neighbours_within(const PointConfig& g, std::span<const double> x, double R) {
    int s = 0;
    const double R2 = R * R;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto p = g.point(i);
        double d2 = 0;
        for (std::size_t a = 0; a < x.size(); ++a) d2 += (p[a] - x[a]) * (p[a] - x[a]);
        if (d2 <= R2 && d2 > 0) ++s;
    }
    return s;
}

// r(γ,x) = β g^{s_R(x,γ)}; g = 0 is hard core
inline ContinuumPapangelou strauss(double beta, double g, double R) {
    require(beta > 0 && std::isfinite(beta), "Strauss beta must be positive");
    require(g >= 0 && g <= 1, "Strauss interaction g must lie in [0,1]");
    require(R > 0 && std::isfinite(R), "Strauss range must be positive");
    return {[=](const PointConfig& c, std::span<const double> x) {
                const int s = neighbours_within(c, x, R);
                return s == 0 ? beta : beta * std::pow(g, s);
            },
            beta, "strauss(beta=" + std::to_string(beta) + ",g=" + std::to_string(g) + ",R=" + std::to_string(R) + ")"};
}

// Geyer–Møller birth–death Metropolis–Hastings
class BirthDeathChain {
public:
    BirthDeathChain(ContinuumWindow w, ContinuumPapangelou r, std::uint64_t seed)
        : w_(std::move(w)), r_(std::move(r)), rng_(seed), state_(w_.dim()), x_(w_.dim()) {}

    const PointConfig& state() const { return state_; }
    double max_balance_error() const { return balance_err_; }
    long long proposals() const { return proposals_; }
    long long accepted() const { return accepted_; }

    void step() {
        ++proposals_;
        const double vol = w_.volume();
        const double n = static_cast<double>(state_.size());
        if (rng_.uniform() < 0.5) {
            w_.sample_point(rng_, x_.data());
            const double r = intensity(state_, x_);
            const double ratio = r * vol / (n + 1);
            check_balance(ratio);
            if (rng_.uniform() < std::min(1.0, ratio) && state_.try_insert(x_)) ++accepted_;
        } else {
            if (state_.empty()) return;
            const std::size_t i = rng_.index(state_.size());
            const auto p = state_.point(i);
            std::copy(p.begin(), p.end(), x_.begin());
            PointConfig rest = state_.without(i);
            const double r = intensity(rest, x_);
            const double ratio = r > 0 ? n / (r * vol) : HUGE_VAL;
            if (r > 0) check_balance(ratio);
            if (rng_.uniform() < std::min(1.0, ratio)) {
                state_ = std::move(rest);
                ++accepted_;
            }
        }
    }

    void advance(long long k) {
        for (long long i = 0; i < k; ++i) step();
    }

private:
    double intensity(const PointConfig& g, std::span<const double> x) const {
        const double r = r_(g, x);
        if (!std::isfinite(r) || r < 0) throw EvaluationError("bad Papangelou value", g.to_string());
        if (r > r_.r_max * (1 + 1e-12))
            throw StabilityError("Papangelou intensity " + std::to_string(r) + " exceeds declared bound " +
                                 std::to_string(r_.r_max));
        return r;
    }
    // a(fwd)·q(fwd)·π(γ) = a(bwd)·q(bwd)·π(γ'): a(fwd)/a(bwd) must equal the density ratio
    void check_balance(double ratio) {
        if (!(ratio > 0) || !std::isfinite(ratio)) return;
        const double fwd = std::min(1.0, ratio), bwd = std::min(1.0, 1.0 / ratio);
        balance_err_ = std::max(balance_err_, std::abs(fwd - ratio * bwd) / std::max(fwd, ratio * bwd));
    }

    ContinuumWindow w_;
    ContinuumPapangelou r_;
    Stream rng_;
    PointConfig state_;
    std::vector<double> x_;
    double balance_err_ = 0;
    long long proposals_ = 0, accepted_ = 0;
};

inline std::vector<PointConfig> sample_gibbs_bd(const ContinuumWindow& w, const ContinuumPapangelou& r,
                                                const RunPlan& plan) {
    plan.validate();
    BirthDeathChain chain(w, r, derive_seed(plan.master_seed, 0));
    chain.advance(plan.burn_in);
    std::vector<PointConfig> out;
    out.reserve(plan.replicas);
    for (int i = 0; i < plan.replicas; ++i) {
        chain.advance(std::max(1, plan.thinning));
        out.push_back(chain.state());
    }
    return out;
}

// ---------------------------------------------------------------- identity verifiers

// h(γ, x) with x ∈ γ
using PointFunctional = std::function<double(const PointConfig&, std::span<const double>)>;

namespace functionals {

inline PointFunctional one() {
    return [](const PointConfig&, std::span<const double>) { return 1.0; };
}
inline PointFunctional indicator(ContinuumWindow B) {
    return [B](const PointConfig&, std::span<const double> x) { return B.contains(x) ? 1.0 : 0.0; };
}
// |γ∖x ∩ B|·1_B(x)
inline PointFunctional pairs_in(ContinuumWindow B) {
    return [B](const PointConfig& g, std::span<const double> x) {
        if (!B.contains(x)) return 0.0;
        int c = 0;
        for (std::size_t i = 0; i < g.size(); ++i) c += B.contains(g.point(i));
        return static_cast<double>(c - 1);
    };
}
// s_R(x, γ∖x)
inline PointFunctional neighbours(double R) {
    return [R](const PointConfig& g, std::span<const double> x) { return double(neighbours_within(g, x, R)); };
}

} // namespace functionals

// E Σ_{x∈γ} h(γ,x) = z ∫ E h(γ∪x, x) dx
inline IdentityReport verify_mecke(double z, const PointFunctional& h, const RunPlan& plan) {
    plan.validate();
    const auto& w = plan.window;
    std::vector<double> lhs(plan.replicas), rhs(plan.replicas);
    parallel_for(plan.replicas, plan.jobs, [&](int i) {
        Stream rng(derive_seed(plan.master_seed, static_cast<std::uint64_t>(i)));
        const PointConfig g = sample_poisson(w, z, rng);
        double l = 0;
        for (std::size_t j = 0; j < g.size(); ++j) l += h(g, g.point(j));
        std::vector<double> u(w.dim());
        double r = 0;
        for (int s = 0; s < plan.proposal_points; ++s) {
            w.sample_point(rng, u.data());
            if (g.contains(u)) continue;  // null event
            r += h(g.with(u), u);
        }
        lhs[i] = l;
        rhs[i] = z * w.volume() * r / plan.proposal_points;
    });
    return make_report("mecke", lhs, rhs);
}

// E Σ_{x∈γ} h(γ,x) = E ∫ h(γ∪x, x) r(γ,x) dx over the stationary chain
inline IdentityReport verify_gnz(const ContinuumPapangelou& r, const PointFunctional& h, const RunPlan& plan,
                                 double* balance_error = nullptr) {
    plan.validate();
    const auto& w = plan.window;
    BirthDeathChain chain(w, r, derive_seed(plan.master_seed, 0));
    Stream quad(derive_seed(plan.master_seed, 1));
    chain.advance(plan.burn_in);
    std::vector<double> lhs(plan.replicas), rhs(plan.replicas), u(w.dim());
    for (int i = 0; i < plan.replicas; ++i) {
        chain.advance(std::max(1, plan.thinning));
        const PointConfig& g = chain.state();
        double l = 0;
        for (std::size_t j = 0; j < g.size(); ++j) l += h(g, g.point(j));
        double s = 0;
        for (int k = 0; k < plan.proposal_points; ++k) {
            w.sample_point(quad, u.data());
            if (g.contains(u)) continue;
            s += h(g.with(u), u) * r(g, u);
        }
        lhs[i] = l;
        rhs[i] = w.volume() * s / plan.proposal_points;
    }
    if (balance_error) *balance_error = chain.max_balance_error();
    return make_report("gnz", lhs, rhs, plan.batches);
}

// ---------------------------------------------------------------- estimators

struct Estimate {
    double estimate = 0, se = 0;
};

// k^{(n)} averaged over n disjoint cells: mean of Π count_in(γ,B_i) / Π vol(B_i)
inline Estimate estimate_correlation(const std::vector<PointConfig>& samples,
                                     const std::vector<ContinuumWindow>& cells, const ContinuumWindow& window) {
    require(!cells.empty(), "need at least one cell");
    require(!samples.empty(), "need at least one sample");
    double vol = 1;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        require(window.contains(cells[i]), "cell lies outside the window");
        for (std::size_t j = 0; j < i; ++j)
            require(!cells[i].overlaps(cells[j]), "correlation cells must be pairwise disjoint");
        vol *= cells[i].volume();
    }
    std::vector<double> v(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        double p = 1;
        for (const auto& c : cells) p *= count_in(samples[s], c, window);
        v[s] = p / vol;
    }
    const MeanSe m = mean_se(v);
    return {m.mean, m.se};
}

inline double density_estimator(const PointConfig& g, const ContinuumWindow& window) {
    require(g.within(window), "configuration lies outside the window");
    return static_cast<double>(g.size()) / window.volume();
}

struct CountReport {
    std::vector<double> empirical, analytic, se, z;  // per n = 0..n_max
    double tail_empirical = 0, tail_analytic = 0;
    double tv = 0;
    double max_abs_z = 0;
    long long samples = 0;
    long long overlap_count = 0;
};

inline CountReport count_distribution_check(const ProcessModel& model, int n_max, const RunPlan& plan) {
    plan.validate();
    require(n_max >= 0, "n_max must be nonnegative");
    const auto& w = plan.window;
    const MixingDensity p = mixing_of(model);
    std::vector<long long> counts(plan.replicas);
    std::vector<int> overlaps(plan.replicas, 0);
    parallel_for(plan.replicas, plan.jobs, [&](int i) {
        Stream rng(derive_seed(plan.master_seed, static_cast<std::uint64_t>(i)));
        try {
            counts[i] = static_cast<long long>(sample_process(model, w, rng).size());
        } catch (const OverlapError&) {
            overlaps[i] = 1;
            counts[i] = -1;
        }
    });
    CountReport rep;
    rep.samples = plan.replicas;
    for (int o : overlaps) rep.overlap_count += o;
    std::vector<long long> hist(n_max + 1, 0);
    long long tail = 0;
    for (long long c : counts) {
        if (c < 0) continue;
        if (c <= n_max) ++hist[c];
        else ++tail;
    }
    const double N = static_cast<double>(plan.replicas - rep.overlap_count);
    double an_sum = 0;
    for (int n = 0; n <= n_max; ++n) {
        const double e = hist[n] / N, a = p.count_pmf(n, w.volume());
        const double se = std::sqrt(std::max(a * (1 - a), 1e-300) / N);
        rep.empirical.push_back(e);
        rep.analytic.push_back(a);
        rep.se.push_back(se);
        rep.z.push_back((e - a) / se);
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(rep.z.back()));
        rep.tv += std::abs(e - a);
        an_sum += a;
    }
    rep.tail_empirical = tail / N;
    rep.tail_analytic = std::max(0.0, 1 - an_sum);
    rep.tv = 0.5 * (rep.tv + std::abs(rep.tail_empirical - rep.tail_analytic));
    return rep;
}

// one row per point: replica, index, x1..xd
inline void write_samples_csv(std::ostream& os, const std::vector<PointConfig>& samples) {
    if (samples.empty()) return;
    os << "replica,index";
    for (int a = 0; a < samples.front().dim(); ++a) os << ",x" << a + 1;
    os << "\n";
    os.precision(17);
    for (std::size_t r = 0; r < samples.size(); ++r)
        for (std::size_t i = 0; i < samples[r].size(); ++i) {
            os << r << "," << i;
            for (double v : samples[r].point(i)) os << "," << v;
            os << "\n";
        }
}

} // namespace configlab
