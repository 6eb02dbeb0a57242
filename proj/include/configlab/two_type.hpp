#pragma once

// Two-type configurations (γ⁺,γ⁻): 𝕂 and its inverse, ⊛, marginals.
// Tables are row-major: index = plus·2^n + minus.

#include <vector>

#include "transforms.hpp"

namespace configlab {

inline constexpr int kMaxPairSites = 12;

struct PairConfiguration {
    Mask plus = 0, minus = 0;
    bool disjoint() const { return (plus & minus) == 0; }
    Mask union_mask() const {
        if (!disjoint()) throw OverlapError("pair configuration overlaps: " + mask_to_string(plus & minus));
        return plus | minus;
    }
};

enum class Side { Plus, Minus };

class PairSetFunction {
public:
    PairSetFunction() = default;
    PairSetFunction(DiscreteGround ground, std::vector<double> values, std::string label = {})
        : ground_(std::move(ground)), values_(std::move(values)), label_(std::move(label)) {
        if (ground_.size() > kMaxPairSites)
            throw CapacityError("pair tables limited to 12 sites per coordinate");
        const std::size_t N = ground_.table_size();
        require(values_.size() == N * N, "pair table must have length 4^n");
        for (double v : values_) require(std::isfinite(v), "non-finite pair table entry");
    }

    template <class F>
    static PairSetFunction tabulate(const DiscreteGround& g, F&& f, std::string label = {}) {
        if (g.size() > kMaxPairSites) throw CapacityError("pair tables limited to 12 sites per coordinate");
        const std::size_t N = g.table_size();
        std::vector<double> v(N * N);
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t m = 0; m < N; ++m) v[p * N + m] = f(static_cast<Mask>(p), static_cast<Mask>(m));
        return {g, std::move(v), std::move(label)};
    }
    static PairSetFunction delta_empty(const DiscreteGround& g) {
        return tabulate(g, [](Mask p, Mask m) { return (p | m) ? 0.0 : 1.0; }, "delta_empty2");
    }
    // (k1⊗k2)(η⁺,η⁻) = k1(η⁺)k2(η⁻)
    static PairSetFunction product(const SetFunction& a, const SetFunction& b) {
        same_ground(a, b);
        return tabulate(a.ground(), [&](Mask p, Mask m) { return a[p] * b[m]; },
                        "(" + a.label() + "x" + b.label() + ")");
    }

    const DiscreteGround& ground() const { return ground_; }
    std::size_t side_size() const { return ground_.table_size(); }
    double operator()(Mask plus, Mask minus) const { return values_[plus * side_size() + minus]; }
    double operator()(PairConfiguration c) const { return (*this)(c.plus, c.minus); }
    const std::vector<double>& values() const { return values_; }
    const std::string& label() const { return label_; }

private:
    DiscreteGround ground_;
    std::vector<double> values_;
    std::string label_;
};

inline double max_abs_diff(const PairSetFunction& a, const PairSetFunction& b) {
    require(a.ground() == b.ground(), "pair functions live on different grounds");
    double m = 0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

namespace detail {

// sweep along one coordinate; sign = +1 zeta, -1 Möbius
inline void sweep_pair(std::vector<double>& v, std::size_t N, Side side, double sign) {
    for (std::size_t b = 1; b < N; b <<= 1)
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t m = 0; m < N; ++m) {
                if (side == Side::Plus && (p & b)) v[p * N + m] += sign * v[(p ^ b) * N + m];
                if (side == Side::Minus && (m & b)) v[p * N + m] += sign * v[p * N + (m ^ b)];
            }
}

} // namespace detail

// K⁺ then K⁻ (the order is immaterial)
inline PairSetFunction kk_transform(const PairSetFunction& G, Side first = Side::Plus) {
    std::vector<double> v(G.values());
    const Side second = first == Side::Plus ? Side::Minus : Side::Plus;
    detail::sweep_pair(v, G.side_size(), first, 1.0);
    detail::sweep_pair(v, G.side_size(), second, 1.0);
    return {G.ground(), std::move(v), "KK(" + G.label() + ")"};
}

inline PairSetFunction kk_inverse(const PairSetFunction& F) {
    std::vector<double> v(F.values());
    detail::sweep_pair(v, F.side_size(), Side::Plus, -1.0);
    detail::sweep_pair(v, F.side_size(), Side::Minus, -1.0);
    return {F.ground(), std::move(v), "KKinv(" + F.label() + ")"};
}

// double 3-partition sum, 3^{|η⁺|}·3^{|η⁻|} terms per target pair
inline PairSetFunction conv_star2(const PairSetFunction& G1, const PairSetFunction& G2) {
    require(G1.ground() == G2.ground(), "pair functions live on different grounds");
    const std::size_t N = G1.side_size();
    std::vector<double> out(N * N);
    for (Mask ep = 0; ep < N; ++ep)
        for (Mask em = 0; em < N; ++em) {
            double s = 0;
            for (Mask ap = ep;; ap = (ap - 1) & ep) {
                for (Mask am = em;; am = (am - 1) & em) {
                    const double g1 = G1(ap, am);
                    if (g1 != 0) {
                        const Mask rp = ep ^ ap, rm = em ^ am;
                        double inner = 0;
                        for (Mask bp = ap;; bp = (bp - 1) & ap) {
                            for (Mask bm = am;; bm = (bm - 1) & am) {
                                inner += G2(rp | bp, rm | bm);
                                if (!bm) break;
                            }
                            if (!bp) break;
                        }
                        s += g1 * inner;
                    }
                    if (!am) break;
                }
                if (!ap) break;
            }
            out[ep * N + em] = s;
        }
    return {G1.ground(), std::move(out), "(" + G1.label() + "(*)" + G2.label() + ")"};
}

inline SetFunction marginal_correlation(const PairSetFunction& k, Side side) {
    const std::size_t N = k.side_size();
    std::vector<double> v(N);
    for (Mask m = 0; m < N; ++m) v[m] = side == Side::Plus ? k(m, 0) : k(0, m);
    return {k.ground(), std::move(v), side == Side::Plus ? "marginal+" : "marginal-"};
}

} // namespace configlab
