#pragma once

// Seeded, splittable random streams. Every draw is built from raw 64-bit
// engine output so results are identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <random>

namespace configlab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// seed of child `index` under `parent`; used for per-replica / per-order streams
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    std::uint64_t s = parent ^ (0xd1b54a32d192ed03ULL * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    Stream child(std::uint64_t index) const { return Stream(derive_seed(seed_, index)); }

    std::uint64_t bits() { return engine_(); }

    // [0,1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // (0,1]
    double uniform_pos() { return 1.0 - uniform(); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n), rejection to stay unbiased
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do { v = engine_(); } while (v >= limit);
        return v % n;
    }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // Knuth multiplication on chunks of mean ≤ 16 (sum of Poissons is Poisson)
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 16.0) {
            total += poisson_small(16.0);
            mean -= 16.0;
        }
        return total + poisson_small(mean);
    }

private:
    std::uint64_t poisson_small(double mean) {
        if (mean <= 0) return 0;
        const double limit = std::exp(-mean);
        double p = uniform_pos();
        std::uint64_t k = 0;
        while (p > limit) {
            p *= uniform_pos();
            ++k;
        }
        return k;
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace configlab
