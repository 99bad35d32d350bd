#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dras {

// Deterministic RNG used everywhere. All distributions are hand-rolled on top
// of mt19937_64 so that identical seeds give identical streams on every
// platform (std::uniform_*_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // uniform integer in [0, n), n >= 1
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // exponential with the given mean (mean <= 0 collapses to 0)
    double exponential(double mean) {
        if (mean <= 0.0)
            return 0.0;
        double u = uniform();
        return -mean * std::log1p(-u);
    }

private:
    std::mt19937_64 gen_;
};

// Stable seed mixing for derived streams (episode seeds, per-policy seeds...).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace dras
