#pragma once

// Ground models, configurations, subset-lattice set functions and the
// Lebesgue–Poisson integral. Bit i of a Mask is site i.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace configlab {

using Mask = std::uint32_t;
inline constexpr int kMaxSites = 24;

inline int card(Mask m) { return std::popcount(m); }
inline Mask bit(int i) { return Mask{1} << i; }
inline bool has(Mask m, int i) { return (m >> i) & 1u; }
inline Mask full_mask(int n) { return n == 32 ? ~Mask{0} : (Mask{1} << n) - 1; }

inline std::string mask_to_string(Mask m) {
    std::string s = "{";
    bool first = true;
    for (int i = 0; m >> i; ++i)
        if (has(m, i)) {
            if (!first) s += ",";
            s += std::to_string(i);
            first = false;
        }
    return s + "}";
}

inline double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// ---------------------------------------------------------------- grounds

class DiscreteGround {
public:
    DiscreteGround() = default;
    explicit DiscreteGround(std::vector<double> weights) : weights_(std::move(weights)) {
        if (static_cast<int>(weights_.size()) > kMaxSites)
            throw CapacityError("discrete ground has " + std::to_string(weights_.size()) +
                                " sites; limit is " + std::to_string(kMaxSites));
        for (double w : weights_)
            require(std::isfinite(w) && w > 0, "site weights must be finite and strictly positive");
        total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    }

    static DiscreteGround uniform(int n, double w = 1.0) {
        if (n < 0) throw ValidationError("negative site count");
        if (n > kMaxSites) throw CapacityError("discrete ground limited to 24 sites");
        return DiscreteGround(std::vector<double>(n, w));
    }

    int size() const { return static_cast<int>(weights_.size()); }
    std::size_t table_size() const { return std::size_t{1} << size(); }
    Mask all() const { return full_mask(size()); }
    double weight(int i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }
    double total_mass() const { return total_; }

    double weight_of(Mask m) const {
        double w = 1;
        for (int i = 0; m; ++i, m >>= 1)
            if (m & 1u) w *= weights_[i];
        return w;
    }

    bool operator==(const DiscreteGround& o) const { return weights_ == o.weights_; }

private:
    std::vector<double> weights_;
    double total_ = 0;
};

struct Interval {
    double lo, hi;
};

class ContinuumWindow {
public:
    ContinuumWindow() = default;
    explicit ContinuumWindow(std::vector<Interval> box) : box_(std::move(box)) {
        require(!box_.empty(), "continuum box needs at least one axis");
        volume_ = 1;
        for (auto [lo, hi] : box_) {
            require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "box intervals must be nonempty");
            volume_ *= hi - lo;
        }
        require(volume_ > 0 && std::isfinite(volume_), "box volume must be positive and finite");
    }

    static ContinuumWindow unit(int d) { return ContinuumWindow(std::vector<Interval>(d, {0.0, 1.0})); }

    int dim() const { return static_cast<int>(box_.size()); }
    const std::vector<Interval>& box() const { return box_; }
    double volume() const { return volume_; }
    double total_mass() const { return volume_; }

    // half-open [lo,hi) so that disjoint sub-boxes tile without double counting
    bool contains(std::span<const double> p) const {
        for (int a = 0; a < dim(); ++a)
            if (!(p[a] >= box_[a].lo && p[a] < box_[a].hi)) return false;
        return true;
    }
    bool contains(const ContinuumWindow& inner) const {
        if (inner.dim() != dim()) return false;
        for (int a = 0; a < dim(); ++a)
            if (inner.box_[a].lo < box_[a].lo || inner.box_[a].hi > box_[a].hi) return false;
        return true;
    }
    bool overlaps(const ContinuumWindow& o) const {
        for (int a = 0; a < dim(); ++a)
            if (o.box_[a].hi <= box_[a].lo || box_[a].hi <= o.box_[a].lo) return false;
        return true;
    }

    template <class Rng>
    void sample_point(Rng& rng, double* out) const {
        for (int a = 0; a < dim(); ++a) out[a] = rng.uniform(box_[a].lo, box_[a].hi);
    }

private:
    std::vector<Interval> box_;
    double volume_ = 0;
};

struct GroundSpec {
    enum class Kind { Discrete, Continuum } kind = Kind::Discrete;
    std::vector<double> weights;
    std::vector<Interval> box;
};

using GroundModel = std::variant<DiscreteGround, ContinuumWindow>;

inline GroundModel make_ground(const GroundSpec& spec) {
    if (spec.kind == GroundSpec::Kind::Discrete) return DiscreteGround(spec.weights);
    return ContinuumWindow(spec.box);
}

inline double total_mass(const GroundModel& g) {
    return std::visit([](const auto& x) { return x.total_mass(); }, g);
}

// ---------------------------------------------------------------- set functions

class SetFunction {
public:
    SetFunction() = default;
    SetFunction(DiscreteGround ground, std::vector<double> values, std::string label = {})
        : ground_(std::move(ground)), values_(std::move(values)), label_(std::move(label)) {
        require(values_.size() == ground_.table_size(), "set function table must have length 2^n");
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!std::isfinite(values_[i]))
                throw ValidationError("non-finite set function entry at " + mask_to_string(static_cast<Mask>(i)));
    }

    static SetFunction constant(const DiscreteGround& g, double c, std::string label = "const") {
        return {g, std::vector<double>(g.table_size(), c), std::move(label)};
    }
    static SetFunction delta_empty(const DiscreteGround& g) {
        std::vector<double> v(g.table_size(), 0.0);
        v[0] = 1;
        return {g, std::move(v), "delta_empty"};
    }
    static SetFunction indicator(const DiscreteGround& g, Mask eta) {
        std::vector<double> v(g.table_size(), 0.0);
        v.at(eta) = 1;
        return {g, std::move(v), "indicator" + mask_to_string(eta)};
    }
    template <class F>
    static SetFunction tabulate(const DiscreteGround& g, F&& f, std::string label = {}) {
        std::vector<double> v(g.table_size());
        for (std::size_t m = 0; m < v.size(); ++m) v[m] = f(static_cast<Mask>(m));
        return {g, std::move(v), std::move(label)};
    }
    // η ↦ c^{|η|}
    static SetFunction power(const DiscreteGround& g, double c) {
        return tabulate(g, [c](Mask m) { return std::pow(c, card(m)); }, "power");
    }

    const DiscreteGround& ground() const { return ground_; }
    int sites() const { return ground_.size(); }
    std::size_t size() const { return values_.size(); }
    double operator()(Mask m) const { return values_[m]; }
    double operator[](Mask m) const { return values_[m]; }
    const std::vector<double>& values() const { return values_; }
    const std::string& label() const { return label_; }
    SetFunction relabel(std::string l) const { return {ground_, values_, std::move(l)}; }

private:
    DiscreteGround ground_;
    std::vector<double> values_;
    std::string label_;
};

inline void same_ground(const SetFunction& a, const SetFunction& b) {
    require(a.ground() == b.ground(), "set functions live on different grounds");
}

inline SetFunction operator+(const SetFunction& a, const SetFunction& b) {
    same_ground(a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return {a.ground(), std::move(v)};
}
inline SetFunction operator-(const SetFunction& a, const SetFunction& b) {
    same_ground(a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
    return {a.ground(), std::move(v)};
}
inline SetFunction operator*(double c, const SetFunction& a) {
    std::vector<double> v(a.values());
    for (double& x : v) x *= c;
    return {a.ground(), std::move(v)};
}
// pointwise product
inline SetFunction multiply(const SetFunction& a, const SetFunction& b) {
    same_ground(a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
    return {a.ground(), std::move(v)};
}

inline double max_abs_diff(const SetFunction& a, const SetFunction& b) {
    same_ground(a, b);
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
inline double max_abs(const SetFunction& a) {
    double m = 0;
    for (double x : a.values()) m = std::max(m, std::abs(x));
    return m;
}

// ---------------------------------------------------------------- λ_z

struct LPWeight {
    DiscreteGround ground;
    double z = 1;

    LPWeight(DiscreteGround g, double z_) : ground(std::move(g)), z(z_) {
        require(std::isfinite(z) && z > 0, "intensity z must be positive");
    }
    double operator()(Mask m) const { return std::pow(z, card(m)) * ground.weight_of(m); }

    // all 2^n weights; w[m] = w[m without lowest bit]·z·m(lowest)
    std::vector<double> table() const {
        std::vector<double> w(ground.table_size());
        w[0] = 1;
        for (std::size_t m = 1; m < w.size(); ++m) {
            const int low = std::countr_zero(static_cast<Mask>(m));
            w[m] = w[m & (m - 1)] * z * ground.weight(low);
        }
        return w;
    }
};

inline std::vector<double> lp_weights(const DiscreteGround& g, double z) { return LPWeight(g, z).table(); }

inline double lp_integral(const SetFunction& G, double z) {
    const auto w = lp_weights(G.ground(), z);
    double s = 0;
    for (std::size_t m = 0; m < w.size(); ++m) {
        if (!std::isfinite(G[m])) throw ValidationError("non-finite set function entry");
        s += G[m] * w[m];
    }
    return s;
}

// ---------------------------------------------------------------- continuum configurations

// Simple finite point set, points kept in strict lexicographic order.
class PointConfig {
public:
    explicit PointConfig(int dim = 1) : dim_(dim) { require(dim >= 1, "dimension must be positive"); }

    static PointConfig from_points(int dim, const std::vector<std::vector<double>>& pts) {
        PointConfig c(dim);
        for (const auto& p : pts) {
            require(static_cast<int>(p.size()) == dim, "point dimension mismatch");
            c.insert(p);
        }
        return c;
    }

    int dim() const { return dim_; }
    std::size_t size() const { return coords_.size() / dim_; }
    bool empty() const { return coords_.empty(); }
    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, std::size_t(dim_)}; }
    const std::vector<double>& coords() const { return coords_; }

    // position of p in the order; `found` set when an identical point exists
    std::size_t locate(std::span<const double> p, bool& found) const {
        std::size_t lo = 0, hi = size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (less(point(mid), p)) lo = mid + 1;
            else hi = mid;
        }
        found = lo < size() && std::equal(p.begin(), p.end(), point(lo).begin());
        return lo;
    }
    bool contains(std::span<const double> p) const {
        bool f;
        locate(p, f);
        return f;
    }

    // duplicate insertion is an error, never a merge
    void insert(std::span<const double> p) {
        require(static_cast<int>(p.size()) == dim_, "point dimension mismatch");
        for (double v : p) require(std::isfinite(v), "point coordinates must be finite");
        bool found;
        const std::size_t at = locate(p, found);
        if (found) throw ValidationError("duplicate point in simple configuration");
        coords_.insert(coords_.begin() + at * dim_, p.begin(), p.end());
    }
    bool try_insert(std::span<const double> p) {
        bool found;
        const std::size_t at = locate(p, found);
        if (found) return false;
        coords_.insert(coords_.begin() + at * dim_, p.begin(), p.end());
        return true;
    }
    void erase(std::size_t i) {
        coords_.erase(coords_.begin() + i * dim_, coords_.begin() + (i + 1) * dim_);
    }
    PointConfig with(std::span<const double> p) const {
        PointConfig c = *this;
        c.insert(p);
        return c;
    }
    PointConfig without(std::size_t i) const {
        PointConfig c = *this;
        c.erase(i);
        return c;
    }

    bool within(const ContinuumWindow& w) const {
        if (w.dim() != dim_) return false;
        for (std::size_t i = 0; i < size(); ++i)
            if (!w.contains(point(i))) return false;
        return true;
    }

    std::string to_string() const {
        std::ostringstream os;
        os.precision(17);
        os << "[";
        for (std::size_t i = 0; i < size(); ++i) {
            os << (i ? ",(" : "(");
            for (int a = 0; a < dim_; ++a) os << (a ? "," : "") << point(i)[a];
            os << ")";
        }
        os << "]";
        return os.str();
    }

    bool operator==(const PointConfig& o) const { return dim_ == o.dim_ && coords_ == o.coords_; }

private:
    static bool less(std::span<const double> a, std::span<const double> b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }

    int dim_;
    std::vector<double> coords_;
};

inline int count_in(Mask gamma, Mask region, const DiscreteGround& g) {
    require((region & ~g.all()) == 0, "region contains sites outside the ground");
    require((gamma & ~g.all()) == 0, "configuration contains sites outside the ground");
    return card(gamma & region);
}

inline int count_in(const PointConfig& gamma, const ContinuumWindow& region, const ContinuumWindow& window) {
    require(window.contains(region), "region lies outside the window");
    int c = 0;
    for (std::size_t i = 0; i < gamma.size(); ++i) c += region.contains(gamma.point(i));
    return c;
}

// ---------------------------------------------------------------- Monte Carlo λ_z integral

struct McEstimate {
    double estimate = 0;
    double std_error = 0;
    double tail_mass = 0;  // λ_z-mass of the orders beyond n_max: Σ_{n>n_max}(z·vol)^n/n!
};

using ConfigFunctional = std::function<double(const PointConfig&)>;

inline McEstimate lp_integral_mc(const ConfigFunctional& G, double z, const ContinuumWindow& window,
                                 int n_max, int samples_per_order, std::uint64_t seed) {
    require(n_max >= 0, "n_max must be nonnegative");
    require(samples_per_order >= 1, "samples_per_order must be positive");
    require(z > 0 && std::isfinite(z), "intensity z must be positive");
    const double zv = z * window.volume();

    auto eval = [&](const PointConfig& c) {
        const double v = G(c);
        if (!std::isfinite(v)) throw EvaluationError("non-finite functional value", c.to_string());
        return v;
    };

    McEstimate out;
    out.estimate = eval(PointConfig(window.dim()));
    double variance = 0, head = 1, term = 1;
    std::vector<double> p(window.dim());
    for (int n = 1; n <= n_max; ++n) {
        term *= zv / n;
        head += term;
        Stream rng(derive_seed(seed, n));
        double mean = 0, m2 = 0;
        for (int s = 0; s < samples_per_order; ++s) {
            PointConfig c(window.dim());
            while (static_cast<int>(c.size()) < n) {
                window.sample_point(rng, p.data());
                c.try_insert(p);  // coincident draw: resample
            }
            const double v = eval(c);
            const double d = v - mean;
            mean += d / (s + 1);
            m2 += d * (v - mean);
        }
        out.estimate += term * mean;
        if (samples_per_order > 1) variance += term * term * m2 / (samples_per_order - 1) / samples_per_order;
    }
    out.std_error = std::sqrt(variance);
    out.tail_mass = std::max(0.0, std::exp(zv) - head);
    return out;
}

} // namespace configlab
