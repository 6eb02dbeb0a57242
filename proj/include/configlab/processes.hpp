#pragma once

// Point-process models on the discrete layer: correlation functionals,
// measure convolution, projection densities, Lenard checks, uniqueness
// diagnostics, Papangelou intensities, and mixing densities.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "transforms.hpp"
#include "two_type.hpp"

namespace configlab {

// ---------------------------------------------------------------- mixing densities

class MixingDensity {
public:
    enum class Family { Grid, PointMass, Gamma };

    static MixingDensity point_mass(double z) {
        require(std::isfinite(z) && z > 0, "point mass location must be positive");
        MixingDensity p;
        p.family_ = Family::PointMass;
        p.offset_ = z;
        p.masses_ = {1.0};
        return p;
    }

    // integer-shape gamma with rate θ; cells [ih,(i+1)h) up to the 1−tail quantile,
    // representative = cell midpoint, mass = exact CDF difference (renormalized)
    static MixingDensity gamma(int shape, double rate, int cells = 512, double tail = 1e-8) {
        require(shape >= 1, "gamma shape must be a positive integer");
        require(std::isfinite(rate) && rate > 0, "gamma rate must be positive");
        require(cells >= 1, "need at least one cell");
        MixingDensity p;
        p.family_ = Family::Gamma;
        p.shape_ = shape;
        p.rate_ = rate;
        double lo = 0, hi = 1.0 / rate;
        while (gamma_cdf(shape, rate, hi) < 1 - tail) hi *= 2;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gamma_cdf(shape, rate, mid) < 1 - tail ? lo : hi) = mid;
        }
        p.step_ = hi / cells;
        p.offset_ = 0.5 * p.step_;
        p.masses_.resize(cells);
        double prev = 0, total = 0;
        for (int i = 0; i < cells; ++i) {
            const double c = gamma_cdf(shape, rate, (i + 1) * p.step_);
            p.masses_[i] = c - prev;
            prev = c;
            total += p.masses_[i];
        }
        for (double& m : p.masses_) m /= total;
        return p;
    }
    static MixingDensity exponential(double rate, int cells = 512, double tail = 1e-8) {
        return gamma(1, rate, cells, tail);
    }

    // regular grid offset + i·step
    static MixingDensity from_grid(double offset, double step, std::vector<double> masses) {
        MixingDensity p;
        p.family_ = Family::Grid;
        p.offset_ = offset;
        p.step_ = step;
        p.masses_ = std::move(masses);
        p.validate();
        return p;
    }

    static double gamma_cdf(int shape, double rate, double z) {
        if (z <= 0) return 0;
        const double t = rate * z;
        double term = 1, sum = 1;
        for (int j = 1; j < shape; ++j) {
            term *= t / j;
            sum += term;
        }
        return 1 - std::exp(-t) * sum;
    }
    static double gamma_pdf(int shape, double rate, double z) {
        if (z < 0) return 0;
        return std::pow(rate, shape) * std::pow(z, shape - 1) * std::exp(-rate * z) / factorial(shape - 1);
    }

    Family family() const { return family_; }
    int shape() const { return shape_; }
    double rate() const { return rate_; }
    double offset() const { return offset_; }
    double step() const { return step_; }
    std::size_t size() const { return masses_.size(); }
    double point(std::size_t i) const { return offset_ + static_cast<double>(i) * step_; }
    std::vector<double> grid() const {
        std::vector<double> g(size());
        for (std::size_t i = 0; i < size(); ++i) g[i] = point(i);
        return g;
    }
    const std::vector<double>& masses() const { return masses_; }
    // cell edges for analytic families: [i·step, (i+1)·step)
    double cell_lo(std::size_t i) const { return static_cast<double>(i) * step_; }
    double cell_hi(std::size_t i) const { return static_cast<double>(i + 1) * step_; }

    // Σ masses·z^n (quadrature)
    double moment(int n) const {
        double s = 0;
        for (std::size_t i = 0; i < size(); ++i) s += masses_[i] * std::pow(point(i), n);
        return s;
    }
    double analytic_moment(int n) const {
        if (family_ == Family::PointMass) return std::pow(offset_, n);
        if (family_ == Family::Gamma) {
            double r = 1;
            for (int j = 0; j < n; ++j) r *= (shape_ + j) / rate_;
            return r;
        }
        return moment(n);
    }

    // ∫ (z·vol)^n/n!·e^{−z·vol} p(z) dz — closed form for tagged families
    double count_pmf(int n, double vol) const {
        if (family_ == Family::PointMass) return poisson_pmf(n, offset_ * vol);
        if (family_ == Family::Gamma) {
            // negative binomial: C(n+k−1,n) (θ/(θ+v))^k (v/(θ+v))^n
            const double q = rate_ / (rate_ + vol);
            return std::exp(std::lgamma(n + shape_) - std::lgamma(n + 1.0) - std::lgamma(double(shape_)) +
                            shape_ * std::log(q) + n * std::log1p(-q));
        }
        double s = 0;
        for (std::size_t i = 0; i < size(); ++i) s += masses_[i] * poisson_pmf(n, point(i) * vol);
        return s;
    }

    static double poisson_pmf(int n, double mean) {
        return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
    }

    template <class Rng>
    double sample(Rng& rng) const {
        if (family_ == Family::PointMass) return offset_;
        if (family_ == Family::Gamma) {
            double z = 0;
            for (int j = 0; j < shape_; ++j) z += rng.exponential(rate_);
            return z;
        }
        const double u = rng.uniform();
        double c = 0;
        for (std::size_t i = 0; i < size(); ++i) {
            c += masses_[i];
            if (u < c) return point(i);
        }
        return point(size() - 1);
    }

    MixingDensity shifted(double z) const {
        MixingDensity p = *this;
        p.offset_ += z;
        if (p.family_ == Family::Gamma) p.family_ = Family::Grid;
        if (p.family_ == Family::PointMass && p.size() == 1) p.family_ = Family::PointMass;
        return p;
    }

private:
    MixingDensity() = default;

    void validate() const {
        require(!masses_.empty(), "mixing density needs at least one grid point");
        require(std::isfinite(offset_) && offset_ > 0, "grid points must be strictly positive");
        require(masses_.size() == 1 || (std::isfinite(step_) && step_ > 0), "grid spacing must be positive");
        double s = 0;
        for (double m : masses_) {
            require(std::isfinite(m) && m >= 0, "mixing masses must be nonnegative");
            s += m;
        }
        require(std::abs(s - 1) <= 1e-9, "mixing masses must sum to 1");
    }

    Family family_ = Family::Grid;
    int shape_ = 0;
    double rate_ = 0;
    double offset_ = 0;
    double step_ = 0;
    std::vector<double> masses_;
};

// p1 ∗ p2 on the half-line
inline MixingDensity mixing_convolution(const MixingDensity& a, const MixingDensity& b) {
    using F = MixingDensity::Family;
    if (a.family() == F::PointMass && b.family() == F::PointMass) return MixingDensity::point_mass(a.offset() + b.offset());
    if (a.family() == F::PointMass) return b.shifted(a.offset());
    if (b.family() == F::PointMass) return a.shifted(b.offset());
    if (a.family() == F::Gamma && b.family() == F::Gamma &&
        std::abs(a.rate() - b.rate()) <= 1e-12 * a.rate())
        return MixingDensity::gamma(a.shape() + b.shape(), a.rate(), static_cast<int>(std::max(a.size(), b.size())));
    if (std::abs(a.step() - b.step()) > 1e-12 * std::max(a.step(), b.step()))
        throw ValidationError("mixing grids have incompatible spacing");
    std::vector<double> m(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m[i + j] += a.masses()[i] * b.masses()[j];
    double s = 0;
    for (double x : m) s += x;
    for (double& x : m) x /= s;
    return MixingDensity::from_grid(a.offset() + b.offset(), a.step(), std::move(m));
}

// ---------------------------------------------------------------- discrete tables

class DiscreteTable {
public:
    DiscreteTable() = default;
    DiscreteTable(DiscreteGround ground, std::vector<double> probs)
        : ground_(std::move(ground)), probs_(std::move(probs)) {
        require(probs_.size() == ground_.table_size(), "probability table must have length 2^n");
        double s = 0;
        for (double p : probs_) {
            require(std::isfinite(p) && p >= 0, "probabilities must be nonnegative");
            s += p;
        }
        require(std::abs(s - 1) <= 1e-12, "probabilities must sum to 1");
    }
    // normalizes a nonnegative weight table
    static DiscreteTable from_weights(const DiscreteGround& g, std::vector<double> w) {
        double s = 0;
        for (double x : w) {
            require(std::isfinite(x) && x >= 0, "table weights must be nonnegative");
            s += x;
        }
        require(s > 0, "table weights sum to zero");
        for (double& x : w) x /= s;
        // absorb rounding so the sum is 1 to machine precision
        double t = 0;
        for (double x : w) t += x;
        for (double& x : w) x /= t;
        return {g, std::move(w)};
    }

    const DiscreteGround& ground() const { return ground_; }
    double operator()(Mask m) const { return probs_[m]; }
    const std::vector<double>& probs() const { return probs_; }
    SetFunction as_set_function() const { return {ground_, probs_, "table"}; }

private:
    DiscreteGround ground_;
    std::vector<double> probs_;
};

// ---------------------------------------------------------------- Papangelou intensities

struct DiscretePapangelou {
    std::function<double(Mask, int)> eval;  // r(γ,x), x ∉ γ
    std::string descriptor;

    double operator()(Mask gamma, int x) const {
        const double v = eval(gamma, x);
        if (!std::isfinite(v) || v < 0)
            throw EvaluationError("Papangelou intensity must be finite and nonnegative",
                                  mask_to_string(gamma) + "+" + std::to_string(x));
        return v;
    }

    static DiscretePapangelou constant(double z) {
        return {[z](Mask, int) { return z; }, "constant(" + std::to_string(z) + ")"};
    }
    // r(γ,x) = activity(x)·exp(−Σ_{y∈γ} phi(x,y))
    static DiscretePapangelou pairwise(std::vector<double> activity, std::vector<std::vector<double>> phi) {
        return {[activity, phi](Mask g, int x) {
                    double e = 0;
                    for (int y = 0; g >> y; ++y)
                        if (has(g, y)) e += phi[x][y];
                    return activity[x] * std::exp(-e);
                },
                "pairwise"};
    }
};

// ---------------------------------------------------------------- process models

struct ProcessModel {
    struct Poisson { double z; };
    struct Mixed { MixingDensity p; };
    struct Gibbs { DiscretePapangelou r; };
    struct Superposition { std::shared_ptr<const ProcessModel> left, right; };
    struct Table { DiscreteTable t; };

    std::variant<Poisson, Mixed, Gibbs, Superposition, Table> v;

    static ProcessModel poisson(double z) {
        require(std::isfinite(z) && z > 0, "Poisson intensity must be positive");
        return {Poisson{z}};
    }
    static ProcessModel mixed(MixingDensity p) { return {Mixed{std::move(p)}}; }
    static ProcessModel gibbs(DiscretePapangelou r) { return {Gibbs{std::move(r)}}; }
    static ProcessModel table(DiscreteTable t) { return {Table{std::move(t)}}; }
    static ProcessModel superposition(ProcessModel a, ProcessModel b) {
        return {Superposition{std::make_shared<const ProcessModel>(std::move(a)),
                              std::make_shared<const ProcessModel>(std::move(b))}};
    }
};

// ∫ over supersets: s(η) = Σ_{γ⊇η} v(γ)
inline void superset_sum(std::vector<double>& v) {
    const std::size_t N = v.size();
    for (std::size_t b = 1; b < N; b <<= 1)
        for (std::size_t m = 0; m < N; ++m)
            if (!(m & b)) v[m] += v[m | b];
}
inline void superset_mobius(std::vector<double>& v) {
    const std::size_t N = v.size();
    for (std::size_t b = 1; b < N; b <<= 1)
        for (std::size_t m = 0; m < N; ++m)
            if (!(m & b)) v[m] -= v[m | b];
}

// k(η) = Σ_{γ⊇η} μ(γ) / Π_{x∈η} m(x)
inline SetFunction table_correlation(const DiscreteTable& mu) {
    std::vector<double> v(mu.probs());
    superset_sum(v);
    const auto w = lp_weights(mu.ground(), 1.0);
    for (std::size_t m = 0; m < v.size(); ++m) v[m] /= w[m];
    return {mu.ground(), std::move(v), "k_table"};
}

inline SetFunction correlation_functional(const ProcessModel& model, const DiscreteGround& g) {
    return std::visit(
        [&](const auto& m) -> SetFunction {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ProcessModel::Poisson>) {
                return SetFunction::power(g, m.z).relabel("k_poisson");
            } else if constexpr (std::is_same_v<T, ProcessModel::Mixed>) {
                return SetFunction::tabulate(g, [&](Mask e) {
                    double s = 0;
                    for (std::size_t i = 0; i < m.p.size(); ++i) s += m.p.masses()[i] * std::pow(m.p.point(i), card(e));
                    return s;
                }, "k_mixed");
            } else if constexpr (std::is_same_v<T, ProcessModel::Gibbs>) {
                throw UnsupportedError("Gibbs correlation functional needs to_discrete_table first");
            } else if constexpr (std::is_same_v<T, ProcessModel::Superposition>) {
                return conv_disjoint(correlation_functional(*m.left, g), correlation_functional(*m.right, g));
            } else {
                require(m.t.ground() == g, "table lives on a different ground");
                return table_correlation(m.t);
            }
        },
        model.v);
}

inline DiscreteTable poisson_table(const DiscreteGround& g, double z) {
    return DiscreteTable::from_weights(g, lp_weights(g, z));
}

struct CocycleReport {
    double max_rel = 0;
    std::size_t checked = 0;
};

// r(γ∪y,x)r(γ,y) = r(γ∪x,y)r(γ,x), exhaustive over (γ, x<y ∉ γ)
inline CocycleReport cocycle_check(const DiscretePapangelou& r, const DiscreteGround& g) {
    CocycleReport rep;
    const int n = g.size();
    for (Mask gamma = 0; gamma < g.table_size(); ++gamma)
        for (int x = 0; x < n; ++x) {
            if (has(gamma, x)) continue;
            const double rx = r(gamma, x);
            for (int y = x + 1; y < n; ++y) {
                if (has(gamma, y)) continue;
                const double a = r(gamma | bit(y), x) * r(gamma, y);
                const double b = r(gamma | bit(x), y) * rx;
                const double scale = std::max(std::abs(a), std::abs(b));
                if (scale > 0) rep.max_rel = std::max(rep.max_rel, std::abs(a - b) / scale);
                ++rep.checked;
            }
        }
    return rep;
}

struct MeasureConvolution {
    DiscreteTable table;        // law of γ⁺∪γ⁻ including overlapping pairs
    SetFunction disjoint_part;  // sub-probability Σ_{γ⁺⊔γ⁻=ζ} μ1(γ⁺)μ2(γ⁻)
    double overlap_mass = 0;    // mass of pairs with γ⁺∩γ⁻ ≠ ∅

    DiscreteTable disjoint_table() const {
        if (overlap_mass >= 1) throw UndefinedConditionalError("no disjoint mass to condition on");
        return DiscreteTable::from_weights(disjoint_part.ground(), disjoint_part.values());
    }
};

inline MeasureConvolution convolve_measures(const DiscreteTable& a, const DiscreteTable& b) {
    require(a.ground() == b.ground(), "tables live on different grounds");
    const SetFunction pa = a.as_set_function(), pb = b.as_set_function();
    MeasureConvolution out;
    // Σ_{A∪B=ζ} is exactly the ⋆ convolution; Σ_{A⊔B=ζ} is ∗
    out.table = DiscreteTable::from_weights(a.ground(), conv_union(pa, pb).values());
    out.disjoint_part = conv_disjoint(pa, pb).relabel("disjoint_part");
    double d = 0;
    for (double x : out.disjoint_part.values()) d += x;
    out.overlap_mass = std::max(0.0, 1 - d);
    return out;
}

inline DiscreteTable gibbs_table(const DiscretePapangelou& r, const DiscreteGround& g) {
    const auto rep = cocycle_check(r, g);
    if (rep.max_rel > 1e-9)
        throw InconsistencyError("Papangelou evaluator violates cocycle consistency (max relative " +
                                 std::to_string(rep.max_rel) + ")");
    // telescope from ∅ adding the highest site last
    std::vector<double> u(g.table_size());
    u[0] = 1;
    for (Mask m = 1; m < u.size(); ++m) {
        const int top = 31 - std::countl_zero(m);
        const Mask rest = m ^ bit(top);
        u[m] = u[rest] * r(rest, top) * g.weight(top);
    }
    return DiscreteTable::from_weights(g, std::move(u));
}

inline DiscreteTable to_discrete_table(const ProcessModel& model, const DiscreteGround& g) {
    return std::visit(
        [&](const auto& m) -> DiscreteTable {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ProcessModel::Poisson>) {
                return poisson_table(g, m.z);
            } else if constexpr (std::is_same_v<T, ProcessModel::Mixed>) {
                std::vector<double> acc(g.table_size(), 0.0);
                for (std::size_t i = 0; i < m.p.size(); ++i) {
                    if (m.p.masses()[i] == 0) continue;
                    const auto t = poisson_table(g, m.p.point(i));
                    for (std::size_t s = 0; s < acc.size(); ++s) acc[s] += m.p.masses()[i] * t(static_cast<Mask>(s));
                }
                return DiscreteTable::from_weights(g, std::move(acc));
            } else if constexpr (std::is_same_v<T, ProcessModel::Gibbs>) {
                return gibbs_table(m.r, g);
            } else if constexpr (std::is_same_v<T, ProcessModel::Superposition>) {
                return convolve_measures(to_discrete_table(*m.left, g), to_discrete_table(*m.right, g)).table;
            } else {
                require(m.t.ground() == g, "table lives on a different ground");
                return m.t;
            }
        },
        model.v);
}

// ---------------------------------------------------------------- projection densities

// density of μ w.r.t. π_z for the μ whose correlation functional is k:
// R(γ) = Z z^{−|γ|} Σ_{η⊆S∖γ} (−1)^{|η|} k(γ∪η) Π_{x∈η} m(x),  Z = Π(1+z m)
inline SetFunction projection_density(const SetFunction& k, double z) {
    require(std::isfinite(z) && z > 0, "intensity z must be positive");
    const auto& g = k.ground();
    const auto w1 = lp_weights(g, 1.0);
    const auto wz = lp_weights(g, z);
    double Z = 1;
    for (double m : g.weights()) Z *= 1 + z * m;
    std::vector<double> mu(k.size());
    for (std::size_t m = 0; m < mu.size(); ++m) mu[m] = k[m] * w1[m];
    superset_mobius(mu);
    for (std::size_t m = 0; m < mu.size(); ++m) mu[m] *= Z / wz[m];
    return {g, std::move(mu), "density"};
}

// k(η) = z^{|η|} Σ_{γ⊆S∖η} R(η∪γ) π_z(γ),  π_z(γ) = z^{|γ|}Π m / Z
inline SetFunction recover_correlation(const SetFunction& R, double z) {
    require(std::isfinite(z) && z > 0, "intensity z must be positive");
    const auto& g = R.ground();
    const auto w1 = lp_weights(g, 1.0);
    const auto wz = lp_weights(g, z);
    double Z = 1;
    for (double m : g.weights()) Z *= 1 + z * m;
    std::vector<double> v(R.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = R[m] * wz[m] / Z;
    superset_sum(v);
    for (std::size_t m = 0; m < v.size(); ++m) v[m] /= w1[m];
    return {g, std::move(v), "k_recovered"};
}

// ---------------------------------------------------------------- Lenard positivity

struct LenardResult {
    bool passed = true;
    double worst = 0;  // minimum pairing seen
    int trials = 0;
};

namespace detail {

// three families of nonnegative test observables: dense, single atom, sparse
template <class Rng>
std::vector<double> random_nonnegative(std::size_t N, int trial, Rng& rng) {
    std::vector<double> f(N, 0.0);
    switch (trial % 3) {
    case 0:
        for (double& x : f) x = rng.uniform();
        break;
    case 1:
        f[rng.index(N)] = 1;
        break;
    default:
        for (int j = 0; j < 3; ++j) f[rng.index(N)] += rng.uniform();
    }
    return f;
}

} // namespace detail

// ∫ (K⁻¹F)·k dλ ≥ 0 for random F ≥ 0
inline LenardResult lenard_pd_check(const SetFunction& k, int trials, std::uint64_t seed) {
    require(trials >= 1, "need at least one trial");
    Stream rng(seed);
    const auto w = lp_weights(k.ground(), 1.0);
    LenardResult out;
    out.worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const SetFunction F(k.ground(), detail::random_nonnegative(k.size(), t, rng));
        const SetFunction G = k_inverse(F);
        double s = 0, scale = 0;
        for (std::size_t m = 0; m < w.size(); ++m) {
            const double term = G[m] * k[m] * w[m];
            s += term;
            scale += std::abs(term);
        }
        out.worst = std::min(out.worst, s);
        if (s < -1e-10 * std::max(1.0, scale)) out.passed = false;
    }
    out.trials = trials;
    return out;
}

// two-type analogue with random F ≥ 0 on pairs and G = 𝕂⁻¹F
inline LenardResult pair_lenard_check(const PairSetFunction& k, int trials, std::uint64_t seed) {
    require(trials >= 1, "need at least one trial");
    Stream rng(seed);
    const auto w = lp_weights(k.ground(), 1.0);
    const std::size_t N = k.side_size();
    LenardResult out;
    out.worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const PairSetFunction F(k.ground(), detail::random_nonnegative(N * N, t, rng));
        const PairSetFunction G = kk_inverse(F);
        double s = 0, scale = 0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t m = 0; m < N; ++m) {
                const double term = G.values()[p * N + m] * k.values()[p * N + m] * w[p] * w[m];
                s += term;
                scale += std::abs(term);
            }
        out.worst = std::min(out.worst, s);
        if (s < -1e-10 * std::max(1.0, scale)) out.passed = false;
    }
    out.trials = trials;
    return out;
}

// ---------------------------------------------------------------- uniqueness

struct UniquenessReport {
    std::vector<double> s_values;  // s_1..s_N
    enum class Verdict { UniqueByKC2, Inconclusive } verdict = Verdict::Inconclusive;
    NormFit fit;          // at the fitted (C, δ) when one exists
    int fitted_delta = -1;  // -1: no δ ≤ 2 fits
};

inline const char* to_string(UniquenessReport::Verdict v) {
    return v == UniquenessReport::Verdict::UniqueByKC2 ? "unique_by_K_C2" : "inconclusive";
}

inline UniquenessReport uniqueness_diagnostic(const SetFunction& k, int N) {
    const int n = k.sites();
    require(N >= 0 && N <= n, "N must not exceed the site count");
    const auto w = lp_weights(k.ground(), 1.0);
    UniquenessReport rep;
    rep.s_values.assign(N, 0.0);
    std::vector<double> a(n + 1, 0.0);  // per-order max |k|
    for (Mask m = 0; m < k.size(); ++m) {
        const int c = card(m);
        if (c >= 1 && c <= N) rep.s_values[c - 1] += k[m] * w[m];
        a[c] = std::max(a[c], std::abs(k[m]));
    }
    // δ fits when b_j = a_j/(j!)^δ has non-increasing successive ratios
    for (int delta = 0; delta <= 2; ++delta) {
        std::vector<double> b(n + 1);
        for (int j = 0; j <= n; ++j) b[j] = a[j] / std::pow(factorial(j), delta);
        int last = n;
        while (last > 0 && b[last] == 0) --last;
        bool fits = true, zero_gap = false;
        double C = 0, prev_ratio = std::numeric_limits<double>::infinity();
        for (int j = 0; j < last; ++j) {
            if (b[j] == 0) { zero_gap = true; break; }
            const double ratio = b[j + 1] / b[j];
            if (ratio > prev_ratio * (1 + 1e-9)) { fits = false; break; }
            prev_ratio = ratio;
            C = std::max(C, ratio);
        }
        if (zero_gap || !fits) continue;
        if (C <= 0) C = 1;
        rep.fit = norm_fit(k, C, delta);
        rep.fitted_delta = delta;
        rep.verdict = UniquenessReport::Verdict::UniqueByKC2;
        break;
    }
    return rep;
}

// ---------------------------------------------------------------- Papangelou of tables

// μ(γ∪x) / (μ(γ)·m(x)), z fixed to 1
inline double papangelou_of_table(const DiscreteTable& mu, Mask gamma, int x) {
    require(x >= 0 && x < mu.ground().size(), "site out of range");
    require(!has(gamma, x), "x must not belong to gamma");
    require((gamma & ~mu.ground().all()) == 0, "configuration outside the ground");
    if (mu(gamma) <= 0)
        throw UndefinedConditionalError("table has zero mass at " + mask_to_string(gamma));
    return mu(gamma | bit(x)) / (mu(gamma) * mu.ground().weight(x));
}

struct AdditivitySample {
    Mask plus = 0, minus = 0;
    int x = 0, y = 0;
};

struct ResidualStats {
    double max_abs = 0;
    double mean_abs = 0;
    std::size_t count = 0;
    std::size_t argmax = 0;
};

// r1(γ⁺,x)r2(γ⁻,x)·[r1(γ⁺,x)r2(γ⁻,y) − r1(γ⁺,y)r2(γ⁻,x)]·[r1(γ⁺∪x,y)r2(γ⁻,y) − r2(γ⁻∪x,y)r1(γ⁺,y)]
template <class R1, class R2, class Union>
ResidualStats additivity_residual_generic(const R1& r1, const R2& r2, std::size_t count,
                                          const std::function<void(std::size_t, Union&)>& fetch) {
    ResidualStats st;
    for (std::size_t i = 0; i < count; ++i) {
        Union s;
        fetch(i, s);
        const double a = r1(s.plus, s.x), b = r2(s.minus, s.x);
        const double c = r1(s.plus, s.y), d = r2(s.minus, s.y);
        const double mid = a * d - c * b;
        const double last = r1(s.plus_with_x(), s.y) * d - r2(s.minus_with_x(), s.y) * c;
        const double v = std::abs(a * b * mid * last);
        if (v > st.max_abs) {
            st.max_abs = v;
            st.argmax = i;
        }
        st.mean_abs += v;
        ++st.count;
    }
    if (st.count) st.mean_abs /= st.count;
    return st;
}

inline ResidualStats additivity_residual(const DiscretePapangelou& r1, const DiscretePapangelou& r2,
                                         const std::vector<AdditivitySample>& samples) {
    struct S {
        Mask plus = 0, minus = 0;
        int x = 0, y = 0;
        Mask plus_with_x() const { return plus | bit(x); }
        Mask minus_with_x() const { return minus | bit(x); }
    };
    for (const auto& s : samples) {
        require(s.x != s.y, "additivity samples need x != y");
        require(!has(s.plus, s.x) && !has(s.minus, s.x) && !has(s.plus, s.y) && !has(s.minus, s.y),
                "x and y must lie outside both configurations");
    }
    return additivity_residual_generic<DiscretePapangelou, DiscretePapangelou, S>(
        r1, r2, samples.size(), [&](std::size_t i, S& s) {
            s.plus = samples[i].plus;
            s.minus = samples[i].minus;
            s.x = samples[i].x;
            s.y = samples[i].y;
        });
}

} // namespace configlab
