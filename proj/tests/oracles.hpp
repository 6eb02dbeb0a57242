#pragma once

// Slow, definition-level reference computations. Nothing here calls the library's
// sweeps or convolutions; everything is a literal sum over subsets or assignments.

#include <cmath>
#include <vector>

#include "configlab/generators.hpp"
#include "configlab/processes.hpp"

namespace oracle {

using configlab::card;
using configlab::DiscreteGround;
using configlab::Mask;
using configlab::SetFunction;

inline bool subset(Mask a, Mask b) { return (a & ~b) == 0; }

inline double wt(const DiscreteGround& g, Mask m, double z = 1.0) {
    double p = 1;
    for (int i = 0; i < g.size(); ++i)
        if (m >> i & 1) p *= z * g.weight(i);
    return p;
}

inline SetFunction K(const SetFunction& G) {
    std::vector<double> f(G.size(), 0.0);
    for (Mask g = 0; g < G.size(); ++g)
        for (Mask e = 0; e < G.size(); ++e)
            if (subset(e, g)) f[g] += G[e];
    return {G.ground(), f};
}

inline SetFunction Kinv(const SetFunction& F) {
    std::vector<double> f(F.size(), 0.0);
    for (Mask g = 0; g < F.size(); ++g)
        for (Mask e = 0; e < F.size(); ++e)
            if (subset(e, g)) f[g] += ((card(g) - card(e)) % 2 ? -1.0 : 1.0) * F[e];
    return {F.ground(), f};
}

// Σ over ordered pairs (A,B), A∩B=∅, A∪B=η
inline SetFunction star(const SetFunction& a, const SetFunction& b) {
    std::vector<double> h(a.size(), 0.0);
    for (Mask A = 0; A < a.size(); ++A)
        for (Mask B = 0; B < a.size(); ++B)
            if (!(A & B)) h[A | B] += a[A] * b[B];
    return {a.ground(), h};
}

// Σ over labelings of η's sites into (ζ1, ζ2, ζ3) of G1(ζ1∪ζ2) G2(ζ2∪ζ3)
inline SetFunction star_union(const SetFunction& a, const SetFunction& b) {
    const int n = a.sites();
    std::vector<double> h(a.size(), 0.0);
    for (Mask eta = 0; eta < a.size(); ++eta) {
        std::vector<int> sites;
        for (int i = 0; i < n; ++i)
            if (eta >> i & 1) sites.push_back(i);
        long long total = 1;
        for (std::size_t i = 0; i < sites.size(); ++i) total *= 3;
        for (long long code = 0; code < total; ++code) {
            Mask z1 = 0, z2 = 0, z3 = 0;
            long long c = code;
            for (int s : sites) {
                const int lab = c % 3;
                c /= 3;
                (lab == 0 ? z1 : lab == 1 ? z2 : z3) |= Mask{1} << s;
            }
            h[eta] += a[z1 | z2] * b[z2 | z3];
        }
    }
    return {a.ground(), h};
}

inline double integral(const SetFunction& G, double z) {
    double s = 0;
    for (Mask m = 0; m < G.size(); ++m) s += G[m] * wt(G.ground(), m, z);
    return s;
}

// ∫∫ H(η∪ξ) G1(η) G2(ξ) dλ dλ over disjoint pairs
inline double minlos_rhs(const SetFunction& H, const SetFunction& a, const SetFunction& b, double z) {
    double s = 0;
    const auto& g = H.ground();
    for (Mask A = 0; A < H.size(); ++A)
        for (Mask B = 0; B < H.size(); ++B)
            if (!(A & B)) s += H[A | B] * a[A] * b[B] * wt(g, A, z) * wt(g, B, z);
    return s;
}

// k(η) = P(η ⊆ γ) / m(η)
inline SetFunction correlation(const DiscreteGround& g, const std::vector<double>& p) {
    std::vector<double> k(p.size(), 0.0);
    for (Mask e = 0; e < p.size(); ++e) {
        for (Mask s = 0; s < p.size(); ++s)
            if (subset(e, s)) k[e] += p[s];
        k[e] /= wt(g, e);
    }
    return {g, k};
}

// law of A∪B for independent A~p, B~q
inline std::vector<double> union_law(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> r(p.size(), 0.0);
    for (Mask A = 0; A < p.size(); ++A)
        for (Mask B = 0; B < p.size(); ++B) r[A | B] += p[A] * q[B];
    return r;
}

// π_z(γ) = z^{|γ|} m(γ) / Π(1 + z m)
inline std::vector<double> poisson_law(const DiscreteGround& g, double z) {
    std::vector<double> p(g.table_size());
    double Z = 1;
    for (double m : g.weights()) Z *= 1 + z * m;
    for (Mask s = 0; s < p.size(); ++s) p[s] = wt(g, s, z) / Z;
    return p;
}

// K δ_j read on the multiset A+B: every labelled copy may host a site of j, so
// F̃(A+B) = 2^{|j∩A∩B|} 1[j ⊆ A∪B]
inline double K_delta_multiset(Mask j, Mask A, Mask B) {
    if (!subset(j, A | B)) return 0;
    return std::ldexp(1.0, card(j & A & B));
}

// L on the K-image of δ_j, literally from the birth–death generator
inline double L_of_K_delta(const configlab::BirthDeathKernel& k, Mask j, Mask gamma) {
    const auto& g = k.ground();
    const double here = subset(j, gamma) ? 1.0 : 0.0;
    double s = 0;
    for (int x = 0; x < g.size(); ++x) {
        if (!(gamma >> x & 1)) continue;
        const Mask minus = gamma & ~(Mask{1} << x);
        for (const auto& e : k.death_entries())
            if (e.x == x) s += e.value * wt(g, e.omega) * (K_delta_multiset(j, minus, e.omega) - here);
        for (const auto& e : k.birth_entries())
            if (e.x == x) s += e.value * wt(g, e.omega) * (K_delta_multiset(j, gamma, e.omega) - here);
    }
    return s;
}

// dense K⁻¹ L K, column by column
inline std::vector<double> hat_L(const configlab::BirthDeathKernel& k) {
    const auto& g = k.ground();
    const std::size_t N = g.table_size();
    std::vector<double> M(N * N, 0.0);
    for (Mask j = 0; j < N; ++j) {
        std::vector<double> col(N);
        for (Mask r = 0; r < N; ++r) col[r] = L_of_K_delta(k, j, r);
        const SetFunction c = Kinv(SetFunction(g, col));
        for (Mask r = 0; r < N; ++r) M[r * N + j] = c[r];
    }
    return M;
}

// (L̂* k)(η) = Σ_ζ L̂_{ζ,η} k(ζ) w(ζ) / w(η)
inline SetFunction adjoint_apply(const std::vector<double>& M, const SetFunction& k, double z = 1.0) {
    const auto& g = k.ground();
    const std::size_t N = k.size();
    std::vector<double> r(N, 0.0);
    for (Mask e = 0; e < N; ++e) {
        for (Mask c = 0; c < N; ++c) r[e] += M[c * N + e] * k[c] * wt(g, c, z);
        r[e] /= wt(g, e, z);
    }
    return {g, r};
}

inline double max_abs_diff(const SetFunction& a, const SetFunction& b) {
    double e = 0;
    for (Mask m = 0; m < a.size(); ++m) e = std::max(e, std::abs(a[m] - b[m]));
    return e;
}

inline double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// ∫ Poisson(θ·v)(n) Gamma(shape, rate)(dθ): negative binomial
inline double neg_binomial(int n, int shape, double rate, double v) {
    const double p = rate / (rate + v);
    return binom(n + shape - 1, n) * std::pow(p, shape) * std::pow(1 - p, n);
}

inline double poisson(int n, double mean) {
    double r = std::exp(-mean);
    for (int i = 1; i <= n; ++i) r *= mean / i;
    return r;
}

} // namespace oracle
