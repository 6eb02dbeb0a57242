#pragma once

// Birth-and-death generators on the subset lattice: L, its image
// L̂ = K⁻¹LK (brute force and closed form), the adjoint L̂*, and the
// derivation / Leibniz / invariance checks.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "transforms.hpp"

namespace configlab {

inline constexpr int kMaxOperatorSites = 12;

struct KernelEntry {
    int x = 0;
    Mask omega = 0;
    double value = 0;
};

class BirthDeathKernel {
public:
    BirthDeathKernel() = default;
    BirthDeathKernel(DiscreteGround ground, int k_trunc, std::vector<KernelEntry> death,
                     std::vector<KernelEntry> birth, bool full_range = false)
        : ground_(std::move(ground)), k_trunc_(k_trunc), full_range_(full_range),
          death_(ground_.size()), birth_(ground_.size()) {
        const int n = ground_.size();
        if (full_range) {
            require(n <= 8, "full-range kernels are limited to 8 sites");
            k_trunc_ = n;
        } else {
            require(k_trunc >= 0 && k_trunc <= 3, "K_trunc must lie in [0,3]");
        }
        auto fill = [&](const std::vector<KernelEntry>& in, std::vector<std::vector<std::pair<Mask, double>>>& out,
                        const char* what) {
            for (const auto& e : in) {
                require(e.x >= 0 && e.x < n, std::string(what) + " entry site out of range");
                require((e.omega & ~ground_.all()) == 0, std::string(what) + " entry omega outside the ground");
                require(card(e.omega) <= k_trunc_, std::string(what) + " entry exceeds K_trunc");
                require(std::isfinite(e.value) && e.value >= 0, std::string(what) + " entries must be nonnegative");
                for (const auto& [w, v] : out[e.x])
                    require(w != e.omega, std::string(what) + " entry repeated for the same (x, omega)");
                out[e.x].emplace_back(e.omega, e.value);
            }
        };
        fill(death, death_, "death");
        fill(birth, birth_, "birth");
    }

    // unit death, births b(x,{y}) = a(x,y); a must be symmetric and nonnegative
    static BirthDeathKernel contact(const DiscreteGround& g, const std::vector<std::vector<double>>& a) {
        const int n = g.size();
        validate_dispersal(a, n);
        std::vector<KernelEntry> d, b;
        for (int x = 0; x < n; ++x) {
            d.push_back({x, 0, 1.0});
            for (int y = 0; y < n; ++y)
                if (a[x][y] > 0) b.push_back({x, bit(y), a[x][y]});
        }
        return {g, 1, d, b};
    }
    static BirthDeathKernel pure_death(const DiscreteGround& g, double rate = 1.0) {
        std::vector<KernelEntry> d;
        for (int x = 0; x < g.size(); ++x) d.push_back({x, 0, rate});
        return {g, 0, d, {}};
    }

    static void validate_dispersal(const std::vector<std::vector<double>>& a, int n) {
        require(static_cast<int>(a.size()) == n, "dispersal kernel must be n x n");
        for (int x = 0; x < n; ++x) {
            require(static_cast<int>(a[x].size()) == n, "dispersal kernel must be n x n");
            for (int y = 0; y < n; ++y) {
                require(std::isfinite(a[x][y]) && a[x][y] >= 0, "dispersal kernel must be nonnegative");
                require(a[x][y] == a[y][x], "dispersal kernel must be symmetric");
            }
        }
    }

    const DiscreteGround& ground() const { return ground_; }
    int k_trunc() const { return k_trunc_; }
    bool full_range() const { return full_range_; }
    const std::vector<std::pair<Mask, double>>& death(int x) const { return death_[x]; }
    const std::vector<std::pair<Mask, double>>& birth(int x) const { return birth_[x]; }

    std::vector<KernelEntry> death_entries() const { return entries(death_); }
    std::vector<KernelEntry> birth_entries() const { return entries(birth_); }

    // Σ_ω (d+b)(x,ω)·wt(ω) per site
    std::vector<double> integrability() const {
        std::vector<double> r(ground_.size(), 0.0);
        for (int x = 0; x < ground_.size(); ++x) {
            for (const auto& [w, v] : death_[x]) r[x] += v * ground_.weight_of(w);
            for (const auto& [w, v] : birth_[x]) r[x] += v * ground_.weight_of(w);
        }
        return r;
    }

private:
    static std::vector<KernelEntry> entries(const std::vector<std::vector<std::pair<Mask, double>>>& t) {
        std::vector<KernelEntry> out;
        for (int x = 0; x < static_cast<int>(t.size()); ++x)
            for (const auto& [w, v] : t[x]) out.push_back({x, w, v});
        return out;
    }

    DiscreteGround ground_;
    int k_trunc_ = 0;
    bool full_range_ = false;
    std::vector<std::vector<std::pair<Mask, double>>> death_, birth_;
};

// d(x), d₁(x,ξ) and the birth analogues; integrals over ω use λ = λ₁
struct DerivedKernels {
    std::vector<double> d_bar, b_bar;
    std::vector<std::vector<std::pair<Mask, double>>> d1, b1;  // sorted by ξ

    explicit DerivedKernels(const BirthDeathKernel& k) {
        const auto& g = k.ground();
        const int n = g.size();
        d_bar.assign(n, 0.0);
        b_bar.assign(n, 0.0);
        d1.resize(n);
        b1.resize(n);
        auto derive = [&](const std::vector<std::pair<Mask, double>>& entries, double& bar,
                          std::vector<std::pair<Mask, double>>& one) {
            std::map<Mask, double> acc;
            for (const auto& [w, v] : entries) {
                bar += v * g.weight_of(w);
                for (Mask xi = w;; xi = (xi - 1) & w) {
                    acc[xi] += v * g.weight_of(w & ~xi);
                    if (!xi) break;
                }
            }
            one.assign(acc.begin(), acc.end());
        };
        for (int x = 0; x < n; ++x) {
            derive(k.death(x), d_bar[x], d1[x]);
            derive(k.birth(x), b_bar[x], b1[x]);
        }
    }

    static double lookup(const std::vector<std::pair<Mask, double>>& t, Mask xi) {
        auto it = std::lower_bound(t.begin(), t.end(), std::make_pair(xi, -HUGE_VAL));
        return (it != t.end() && it->first == xi) ? it->second : 0.0;
    }
    double d1_at(int x, Mask xi) const { return lookup(d1[x], xi); }
    double b1_at(int x, Mask xi) const { return lookup(b1[x], xi); }

    double D(Mask eta) const { return additive(d_bar, eta); }
    double B(Mask eta) const { return additive(b_bar, eta); }

private:
    static double additive(const std::vector<double>& v, Mask eta) {
        double s = 0;
        for (int x = 0; eta >> x; ++x)
            if (has(eta, x)) s += v[x];
        return s;
    }
};

// How F is read at the multiset target A+ω when ω meets A.
//  Multiplicity: F̃(A+B) = Σ_{σ⊆A∩B} (−1)^{|σ|} 2^{|A∩B|−|σ|} F((A∪B)∖σ), the extension under
//                which K commutes with multiset union; makes K⁻¹LK equal the closed form.
//  Exclude:      overlapping ω are dropped from the sums.
enum class CoincidencePolicy { Multiplicity, Exclude };

namespace detail {

// adds c·F̃(A+B) into a coefficient sink
template <class Sink>
void add_extended(Mask A, Mask B, double c, Sink&& sink) {
    const Mask C = A & B, U = A | B;
    if (!C) {
        sink(U, c);
        return;
    }
    const int kc = card(C);
    for (Mask s = C;; s = (s - 1) & C) {
        const int ks = card(s);
        sink(U & ~s, c * ((ks & 1) ? -1.0 : 1.0) * std::ldexp(1.0, kc - ks));
        if (!s) break;
    }
}

template <class Sink>
void generator_row(const BirthDeathKernel& k, Mask gamma, CoincidencePolicy policy, Sink&& sink) {
    const auto& g = k.ground();
    for (int x = 0; x < g.size(); ++x) {
        if (!has(gamma, x)) continue;
        const Mask target = gamma ^ bit(x);
        for (const auto& [w, v] : k.death(x)) {
            const double c = v * g.weight_of(w);
            if (policy == CoincidencePolicy::Exclude && (w & target)) continue;
            add_extended(target, w, c, sink);
            sink(gamma, -c);
        }
        for (const auto& [w, v] : k.birth(x)) {
            const double c = v * g.weight_of(w);
            if (policy == CoincidencePolicy::Exclude && (w & gamma)) continue;
            add_extended(gamma, w, c, sink);
            sink(gamma, -c);
        }
    }
}

} // namespace detail

// (LF)(γ)
inline double apply_L(const BirthDeathKernel& k, const SetFunction& F, Mask gamma,
                      CoincidencePolicy policy = CoincidencePolicy::Multiplicity) {
    require(F.ground() == k.ground(), "kernel and function live on different grounds");
    double s = 0;
    detail::generator_row(k, gamma, policy, [&](Mask m, double c) { s += c * F[m]; });
    return s;
}

// Σ_{x∈γ}[F(γ∖x)−F(γ)] + Σ_{y∈γ} Σ_x a(x,y) m(x) [F(γ+x) − F(γ)];
// Exclude restricts x ∉ γ, Multiplicity reads F̃ at the coincident target
inline double apply_contact(const DiscreteGround& g, const std::vector<std::vector<double>>& a,
                            const SetFunction& F, Mask gamma,
                            CoincidencePolicy policy = CoincidencePolicy::Multiplicity) {
    BirthDeathKernel::validate_dispersal(a, g.size());
    require(F.ground() == g, "function lives on a different ground");
    double s = 0;
    for (int x = 0; x < g.size(); ++x)
        if (has(gamma, x)) s += F[gamma ^ bit(x)] - F[gamma];
    for (int y = 0; y < g.size(); ++y) {
        if (!has(gamma, y)) continue;
        for (int x = 0; x < g.size(); ++x) {
            const double c = a[x][y] * g.weight(x);
            if (c == 0) continue;
            if (!has(gamma, x)) s += c * (F[gamma | bit(x)] - F[gamma]);
            else if (policy == CoincidencePolicy::Multiplicity) s += c * (F[gamma] - F[gamma ^ bit(x)]);
        }
    }
    return s;
}

// each (x, ω) with |ω| ≤ k_trunc carries a death / birth rate with probability `density`
inline BirthDeathKernel random_kernel(const DiscreteGround& g, int k_trunc, double density, Stream& rng,
                                      Mask live = ~Mask{0}) {
    std::vector<KernelEntry> d, b;
    for (int x = 0; x < g.size(); ++x) {
        if (!has(live, x)) continue;
        for (Mask w = 0; w < g.table_size(); ++w) {
            if (card(w) > k_trunc) continue;
            if (rng.uniform() < density) d.push_back({x, w, rng.uniform()});
            if (rng.uniform() < density) b.push_back({x, w, rng.uniform()});
        }
    }
    return {g, k_trunc, d, b};
}

// sites that never act as a parent: rows of L̂ over their subsets vanish
inline Mask frozen_sites(const BirthDeathKernel& k) {
    Mask f = 0;
    for (int x = 0; x < k.ground().size(); ++x)
        if (k.death(x).empty() && k.birth(x).empty()) f |= bit(x);
    return f;
}

// symmetric a(x,y) = d_x S(x,y) d_y with Σ_y a(x,y) m(y) = 1, by symmetric Sinkhorn scaling
inline std::vector<std::vector<double>> row_normalized_dispersal(const DiscreteGround& g,
                                                                 const std::vector<std::vector<double>>& S) {
    const int n = g.size();
    BirthDeathKernel::validate_dispersal(S, n);
    std::vector<double> d(n, 1.0);
    auto row = [&](int x) {
        double r = 0;
        for (int y = 0; y < n; ++y) r += S[x][y] * d[y] * g.weight(y);
        return r;
    };
    for (int it = 0; it < 100000; ++it) {
        double err = 0;
        for (int x = 0; x < n; ++x) {
            const double r = row(x);
            require(r > 0, "dispersal pattern has an empty row");
            err = std::max(err, std::abs(d[x] * r - 1));
        }
        if (err < 1e-15) break;
        std::vector<double> nd(n);
        for (int x = 0; x < n; ++x) nd[x] = std::sqrt(d[x] / row(x));
        d = nd;
    }
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y <= x; ++y) a[x][y] = a[y][x] = d[x] * S[x][y] * d[y];
    return a;
}

// dense 2^n × 2^n matrix acting on value vectors in bitmask order
class LatticeOperator {
public:
    LatticeOperator() = default;
    LatticeOperator(DiscreteGround g, std::vector<double> m) : ground_(std::move(g)), m_(std::move(m)) {
        require(m_.size() == dim() * dim(), "operator matrix has the wrong size");
        for (double v : m_) require(std::isfinite(v), "operator entries must be finite");
    }
    static LatticeOperator zero(const DiscreteGround& g) {
        return {g, std::vector<double>(g.table_size() * g.table_size(), 0.0)};
    }

    const DiscreteGround& ground() const { return ground_; }
    std::size_t dim() const { return ground_.table_size(); }
    double operator()(Mask row, Mask col) const { return m_[std::size_t(row) * dim() + col]; }
    double& at(Mask row, Mask col) { return m_[std::size_t(row) * dim() + col]; }
    const std::vector<double>& data() const { return m_; }

    double row_dot(Mask row, const SetFunction& G) const {
        const double* r = m_.data() + std::size_t(row) * dim();
        double s = 0;
        for (std::size_t j = 0; j < dim(); ++j) s += r[j] * G[j];
        return s;
    }
    SetFunction apply(const SetFunction& G) const {
        require(G.ground() == ground_, "operator and function live on different grounds");
        std::vector<double> out(dim());
        for (std::size_t i = 0; i < dim(); ++i) out[i] = row_dot(static_cast<Mask>(i), G);
        return {ground_, std::move(out)};
    }

private:
    DiscreteGround ground_;
    std::vector<double> m_;
};

inline double max_abs_diff(const LatticeOperator& a, const LatticeOperator& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline void check_operator_capacity(const DiscreteGround& g) {
    if (g.size() > kMaxOperatorSites) throw CapacityError("lattice operators are limited to 12 sites");
}

// K⁻¹ L K: rows of L from the generator, then a superset sweep along each row
// (right multiplication by K) and a Möbius sweep down each column (left K⁻¹)
inline LatticeOperator hat_L_bruteforce(const BirthDeathKernel& k,
                                        CoincidencePolicy policy = CoincidencePolicy::Multiplicity) {
    const auto& g = k.ground();
    check_operator_capacity(g);
    const std::size_t N = g.table_size();
    std::vector<double> M(N * N, 0.0);
    for (Mask r = 0; r < N; ++r) {
        double* row = M.data() + std::size_t(r) * N;
        detail::generator_row(k, r, policy, [&](Mask c, double v) { row[c] += v; });
        // (L K)_{r,j} = Σ_{i⊇j} L_{r,i}
        for (std::size_t b = 1; b < N; b <<= 1)
            for (std::size_t j = 0; j < N; ++j)
                if (!(j & b)) row[j] += row[j | b];
    }
    for (std::size_t b = 1; b < N; b <<= 1)
        for (std::size_t r = 0; r < N; ++r)
            if (r & b) {
                double* dst = M.data() + r * N;
                const double* src = M.data() + (r ^ b) * N;
                for (std::size_t j = 0; j < N; ++j) dst[j] -= src[j];
            }
    return {g, std::move(M)};
}

// literal column-by-column K⁻¹(L(K δ_j)) via apply_L; slow, for cross-checks at small n
inline LatticeOperator hat_L_columns(const BirthDeathKernel& k,
                                     CoincidencePolicy policy = CoincidencePolicy::Multiplicity) {
    const auto& g = k.ground();
    check_operator_capacity(g);
    const std::size_t N = g.table_size();
    LatticeOperator out = LatticeOperator::zero(g);
    for (Mask j = 0; j < N; ++j) {
        const SetFunction F = k_transform(SetFunction::indicator(g, j));
        const SetFunction LF = SetFunction::tabulate(g, [&](Mask r) { return apply_L(k, F, r, policy); });
        const SetFunction col = k_inverse(LF);
        for (Mask r = 0; r < N; ++r) out.at(r, j) = col[r];
    }
    return out;
}

// closed forms of L̂₋ and L̂₊
inline LatticeOperator hat_L_closed(const BirthDeathKernel& k) {
    const auto& g = k.ground();
    check_operator_capacity(g);
    const DerivedKernels dk(k);
    const std::size_t N = g.table_size();
    LatticeOperator out = LatticeOperator::zero(g);
    for (Mask eta = 0; eta < N; ++eta) {
        // L̂₋
        out.at(eta, eta) -= dk.D(eta);
        for (int x = 0; x < g.size(); ++x) {
            if (!has(eta, x)) continue;
            const Mask ex = eta ^ bit(x);
            out.at(eta, ex) -= dk.d_bar[x];
            for (const auto& [xi, v] : dk.d1[x])
                if (!(xi & ex)) out.at(eta, ex | xi) += v * g.weight_of(xi);
        }
        // L̂₊
        for (int x = 0; x < g.size(); ++x) {
            if (!has(eta, x)) continue;
            const Mask ex = eta ^ bit(x);
            for (const auto& [zeta, v] : dk.b1[x]) {
                const double c = v * g.weight_of(zeta);
                if (!(zeta & ex)) out.at(eta, ex | zeta) += c;
                if (!(zeta & eta)) out.at(eta, eta | zeta) += c;
            }
            out.at(eta, ex) -= dk.b_bar[x];
        }
        out.at(eta, eta) -= dk.B(eta);
    }
    return out;
}

// adjoint under ⟨⟨G,k⟩⟩ = Σ G k λ_z: (L̂*)_{η,ζ} = L̂_{ζ,η} wt(ζ)/wt(η)
inline LatticeOperator adjoint_hat_L(const LatticeOperator& op, double z = 1.0) {
    const auto w = lp_weights(op.ground(), z);
    const std::size_t N = op.dim();
    LatticeOperator out = LatticeOperator::zero(op.ground());
    for (Mask e = 0; e < N; ++e)
        for (Mask c = 0; c < N; ++c) out.at(e, c) = op(c, e) * w[c] / w[e];
    return out;
}

inline double pairing(const SetFunction& G, const SetFunction& k, double z = 1.0) {
    return lp_integral(multiply(G, k), z);
}

// |(L̂G)(η∪ξ) − (L̂G_ξ)(η) − (L̂G_η)(ξ)|, G_ξ(θ) = G(θ∪ξ) for θ∩ξ = ∅ and 0 otherwise
inline double check_derivation(const LatticeOperator& op, const SetFunction& G, Mask eta, Mask xi) {
    require(!(eta & xi), "derivation check needs disjoint configurations");
    const std::size_t N = op.dim();
    const double lhs = op.row_dot(eta | xi, G);
    double r1 = 0, r2 = 0;
    for (Mask t = 0; t < N; ++t) {
        if (!(t & xi)) r1 += op(eta, t) * G[t | xi];
        if (!(t & eta)) r2 += op(xi, t) * G[t | eta];
    }
    return std::abs(lhs - r1 - r2);
}

// max over every disjoint pair
inline double derivation_residual_all(const LatticeOperator& op, const SetFunction& G) {
    const Mask all = op.ground().all();
    double worst = 0;
    for (Mask eta = 0;; ++eta) {
        const Mask comp = all ^ eta;
        for (Mask xi = comp;; xi = (xi - 1) & comp) {
            worst = std::max(worst, check_derivation(op, G, eta, xi));
            if (!xi) break;
        }
        if (eta == all) break;
    }
    return worst;
}

inline Mask support_sites(const SetFunction& k) {
    Mask s = 0;
    for (Mask m = 0; m < k.size(); ++m)
        if (k[m] != 0) s |= m;
    return s;
}

struct LeibnizReport {
    double raw = 0;          // max |L̂*(k1∗k2) − (L̂*k1)∗k2 − k1∗(L̂*k2)|
    double defect = 0;       // max |coincidence defect|
    double corrected = 0;    // max |raw residual − defect|
    bool supports_disjoint = false;
};

// Coincidence defect: the part of the Leibniz residual carried by pairs (η,ξ) with η∩ξ ≠ ∅,
// Def(ρ) = −(1/w(ρ)) [ Σ_{ξ⊆ρ} k2(ξ)w(ξ) Σ_{η∩ξ≠∅} k1(η)w(η) L̂_{η,ρ∖ξ}
//                     + Σ_{η⊆ρ} k1(η)w(η) Σ_{ξ∩η≠∅} k2(ξ)w(ξ) L̂_{ξ,ρ∖η} ].
// These pairs are λ-null in the continuum; on atoms they are not.
inline SetFunction coincidence_defect(const LatticeOperator& op, const SetFunction& k1, const SetFunction& k2,
                                      double z = 1.0) {
    const auto w = lp_weights(op.ground(), z);
    const std::size_t N = op.dim();
    std::vector<double> out(N, 0.0);
    for (Mask rho = 0; rho < N; ++rho) {
        double s = 0;
        for (Mask a = rho;; a = (a - 1) & rho) {
            const Mask rest = rho ^ a;
            const double c2 = k2[a] * w[a], c1 = k1[a] * w[a];
            for (Mask other = 0; other < N; ++other) {
                if (!(other & a)) continue;
                if (c2 != 0) s += c2 * k1[other] * w[other] * op(other, rest);
                if (c1 != 0) s += c1 * k2[other] * w[other] * op(other, rest);
            }
            if (!a) break;
        }
        out[rho] = -s / w[rho];
    }
    return {op.ground(), std::move(out), "coincidence_defect"};
}

inline LeibnizReport check_adjoint_leibniz(const LatticeOperator& op, const SetFunction& k1, const SetFunction& k2,
                                           double z = 1.0) {
    same_ground(k1, k2);
    const LatticeOperator star = adjoint_hat_L(op, z);
    const SetFunction lhs = star.apply(conv_disjoint(k1, k2));
    const SetFunction rhs = conv_disjoint(star.apply(k1), k2) + conv_disjoint(k1, star.apply(k2));
    const SetFunction res = lhs - rhs;
    const SetFunction def = coincidence_defect(op, k1, k2, z);
    LeibnizReport rep;
    rep.raw = max_abs(res);
    rep.defect = max_abs(def);
    rep.corrected = max_abs_diff(res, def);
    rep.supports_disjoint = (support_sites(k1) & support_sites(k2)) == 0;
    return rep;
}

struct InvarianceResidual {
    std::vector<double> entrywise;  // max |(L̂*k)(η)| per order |η|
    std::vector<double> pairing;    // max |⟨⟨L̂δ_η, k⟩⟩| = max |w(η)(L̂*k)(η)| per order
    double max_entry() const { return entrywise.empty() ? 0 : *std::max_element(entrywise.begin(), entrywise.end()); }
    double max_pairing() const { return pairing.empty() ? 0 : *std::max_element(pairing.begin(), pairing.end()); }
};

inline InvarianceResidual invariance_residual(const LatticeOperator& op, const SetFunction& k, double z = 1.0) {
    const SetFunction r = adjoint_hat_L(op, z).apply(k);
    const auto w = lp_weights(op.ground(), z);
    InvarianceResidual out;
    out.entrywise.assign(op.ground().size() + 1, 0.0);
    out.pairing.assign(op.ground().size() + 1, 0.0);
    for (Mask m = 0; m < r.size(); ++m) {
        out.entrywise[card(m)] = std::max(out.entrywise[card(m)], std::abs(r[m]));
        out.pairing[card(m)] = std::max(out.pairing[card(m)], std::abs(r[m] * w[m]));
    }
    return out;
}

struct ClosureResult {
    bool precondition_ok = false;
    std::string failing_input;  // "k1", "k2" or "k1,k2" when a precondition fails
    bool holds = false;
    InvarianceResidual residual;
};

inline ClosureResult convolution_closure_check(const LatticeOperator& op, const SetFunction& k1,
                                               const SetFunction& k2, double z = 1.0,
                                               double pre_tol = 1e-10, double tol = 1e-9) {
    ClosureResult out;
    const bool ok1 = invariance_residual(op, k1, z).max_entry() <= pre_tol;
    const bool ok2 = invariance_residual(op, k2, z).max_entry() <= pre_tol;
    if (!ok1) out.failing_input = "k1";
    if (!ok2) out.failing_input += out.failing_input.empty() ? "k2" : ",k2";
    out.precondition_ok = ok1 && ok2;
    out.residual = invariance_residual(op, conv_disjoint(k1, k2), z);
    out.holds = out.precondition_ok && out.residual.max_entry() <= tol;
    return out;
}

// orthonormal-ish basis of ker L̂* (normalized so the largest entry is 1)
inline std::vector<SetFunction> invariant_basis(const LatticeOperator& op, double z = 1.0, double threshold = 1e-10) {
    const LatticeOperator star = adjoint_hat_L(op, z);
    const std::size_t N = op.dim();
    Eigen::MatrixXd A(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) A(i, j) = star(static_cast<Mask>(i), static_cast<Mask>(j));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(threshold);
    const Eigen::MatrixXd ker = lu.kernel();
    std::vector<SetFunction> out;
    if (lu.dimensionOfKernel() == 0) return out;
    for (Eigen::Index c = 0; c < ker.cols(); ++c) {
        std::vector<double> v(N);
        double big = 0;
        for (std::size_t i = 0; i < N; ++i) {
            v[i] = ker(i, c);
            if (std::abs(v[i]) > std::abs(big)) big = v[i];
        }
        if (big == 0) continue;
        for (double& x : v) x /= big;
        out.emplace_back(op.ground(), std::move(v), "invariant");
    }
    return out;
}

} // namespace configlab
