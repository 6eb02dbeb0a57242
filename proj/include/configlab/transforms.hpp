#pragma once

// K-transform, Möbius inverse, ∗ and ⋆ convolutions, exponential vectors,
// the Minlos pairing and 𝒦_{C,δ} norm fitting.

#include <cmath>
#include <vector>

#include "config_core.hpp"

namespace configlab {

// F(γ) = Σ_{η⊆γ} G(η): zeta sweep, one pass per site
inline SetFunction k_transform(const SetFunction& G) {
    std::vector<double> f(G.values());
    const std::size_t N = f.size();
    for (std::size_t b = 1; b < N; b <<= 1)
        for (std::size_t m = 0; m < N; ++m)
            if (m & b) f[m] += f[m ^ b];
    return {G.ground(), std::move(f), "K(" + G.label() + ")"};
}

// signed Möbius sweep
inline SetFunction k_inverse(const SetFunction& F) {
    std::vector<double> g(F.values());
    const std::size_t N = g.size();
    for (std::size_t b = 1; b < N; b <<= 1)
        for (std::size_t m = 0; m < N; ++m)
            if (m & b) g[m] -= g[m ^ b];
    return {F.ground(), std::move(g), "Kinv(" + F.label() + ")"};
}

namespace reference {

// O(4^n) double loops; kept as the slow path for cross-checks
inline SetFunction k_transform_naive(const SetFunction& G) {
    const std::size_t N = G.size();
    std::vector<double> f(N, 0.0);
    for (std::size_t g = 0; g < N; ++g)
        for (std::size_t e = 0; e < N; ++e)
            if ((e & g) == e) f[g] += G[e];
    return {G.ground(), std::move(f)};
}

inline SetFunction k_inverse_naive(const SetFunction& F) {
    const std::size_t N = F.size();
    std::vector<double> g(N, 0.0);
    for (std::size_t e = 0; e < N; ++e)
        for (std::size_t x = 0; x < N; ++x)
            if ((x & e) == x) g[e] += ((card(static_cast<Mask>(e ^ x)) & 1) ? -1.0 : 1.0) * F[x];
    return {F.ground(), std::move(g)};
}

} // namespace reference

// H(η) = Σ_{ξ⊆η} G1(ξ) G2(η∖ξ)
inline SetFunction conv_disjoint(const SetFunction& G1, const SetFunction& G2) {
    same_ground(G1, G2);
    const std::size_t N = G1.size();
    std::vector<double> h(N);
    for (Mask eta = 0; eta < N; ++eta) {
        double s = 0;
        Mask xi = eta;
        while (true) {
            s += G1[xi] * G2[eta ^ xi];
            if (!xi) break;
            xi = (xi - 1) & eta;
        }
        h[eta] = s;
    }
    return {G1.ground(), std::move(h), "(" + G1.label() + "*" + G2.label() + ")"};
}

// H(η) = Σ_{ζ1⊔ζ2⊔ζ3=η} G1(ζ1∪ζ2) G2(ζ2∪ζ3).
// A = ζ1∪ζ2 runs over subsets of η, ζ2 over subsets of A: 3^{|η|} terms.
inline SetFunction conv_union(const SetFunction& G1, const SetFunction& G2) {
    same_ground(G1, G2);
    const std::size_t N = G1.size();
    std::vector<double> h(N);
    for (Mask eta = 0; eta < N; ++eta) {
        double s = 0;
        Mask a = eta;
        while (true) {
            const Mask rest = eta ^ a;
            double inner = 0;
            Mask z2 = a;
            while (true) {
                inner += G2[rest | z2];
                if (!z2) break;
                z2 = (z2 - 1) & a;
            }
            s += G1[a] * inner;
            if (!a) break;
            a = (a - 1) & eta;
        }
        h[eta] = s;
    }
    return {G1.ground(), std::move(h), "(" + G1.label() + "**" + G2.label() + ")"};
}

// k^{∗n}; n = 0 gives the unit δ_∅
inline SetFunction conv_power(const SetFunction& k, int n) {
    SetFunction r = SetFunction::delta_empty(k.ground());
    for (int i = 0; i < n; ++i) r = conv_disjoint(r, k);
    return r;
}

struct PairingSides {
    double lhs = 0, rhs = 0;
};

inline PairingSides minlos_pairing(const SetFunction& H, const SetFunction& G1, const SetFunction& G2, double z) {
    same_ground(H, G1);
    same_ground(H, G2);
    PairingSides out;
    out.lhs = lp_integral(multiply(H, conv_disjoint(G1, G2)), z);

    const auto w = lp_weights(H.ground(), z);
    const Mask all = H.ground().all();
    double s = 0;
    for (Mask eta = 0; eta <= all; ++eta) {
        const Mask comp = all ^ eta;
        const double a = G1[eta] * w[eta];
        if (a != 0) {
            double inner = 0;
            Mask xi = comp;
            while (true) {
                inner += H[eta | xi] * G2[xi] * w[xi];
                if (!xi) break;
                xi = (xi - 1) & comp;
            }
            s += a * inner;
        }
        if (eta == all) break;
    }
    out.rhs = s;
    return out;
}

// e_λ(f)(η) = Π_{x∈η} f(x)
inline SetFunction exp_vector(const DiscreteGround& g, const std::vector<double>& f) {
    require(static_cast<int>(f.size()) == g.size(), "exp_vector needs one value per site");
    std::vector<double> v(g.table_size());
    v[0] = 1;
    for (std::size_t m = 1; m < v.size(); ++m) {
        const int low = std::countr_zero(static_cast<Mask>(m));
        v[m] = v[m & (m - 1)] * f[low];
    }
    return {g, std::move(v), "exp_vector"};
}

struct NormFit {
    double C = 1;
    double delta = 0;
    double norm = 0;
    Mask attained_at = 0;
};

// exact max of |k(η)| / (C^{|η|} (|η|!)^δ); ties go to the smallest mask
inline NormFit norm_fit(const SetFunction& k, double C, double delta) {
    require(C > 0 && std::isfinite(C), "norm_fit needs C > 0");
    require(delta >= 0 && std::isfinite(delta), "norm_fit needs delta >= 0");
    const int n = k.sites();
    std::vector<double> scale(n + 1);
    for (int j = 0; j <= n; ++j) scale[j] = std::pow(C, j) * std::pow(factorial(j), delta);
    NormFit out{C, delta, -1.0, 0};
    for (Mask m = 0; m < k.size(); ++m) {
        const double r = std::abs(k[m]) / scale[card(m)];
        if (r > out.norm) {
            out.norm = r;
            out.attained_at = m;
        }
    }
    return out;
}

struct PolyBound {
    double C = 0;
    int N = 0;
    bool holds = false;
    double worst_ratio = 0;  // max |KG(γ)| / (C(1+|γ∩Λ|)^N)
};

// |KG(γ)| ≤ C(1+|γ∩Λ|)^N for G supported in Λ with C = max|G|, N = support order
inline PolyBound poly_bound_check(const SetFunction& G, Mask window) {
    require((window & ~G.ground().all()) == 0, "window outside the ground");
    PolyBound out;
    for (Mask m = 0; m < G.size(); ++m)
        if (G[m] != 0) {
            require((m & ~window) == 0, "G is not supported inside the window");
            out.C = std::max(out.C, std::abs(G[m]));
            out.N = std::max(out.N, card(m));
        }
    const SetFunction F = k_transform(G);
    out.holds = true;
    for (Mask m = 0; m < F.size(); ++m) {
        const double bound = out.C * std::pow(1.0 + card(m & window), out.N);
        const double v = std::abs(F[m]);
        if (bound > 0) out.worst_ratio = std::max(out.worst_ratio, v / bound);
        if (v > bound * (1 + 1e-12) + 1e-12) out.holds = false;
    }
    return out;
}

inline PolyBound poly_bound_check(const SetFunction& G) { return poly_bound_check(G, G.ground().all()); }

} // namespace configlab
