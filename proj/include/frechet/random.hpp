#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace frechet {

// Every random decision in the library draws from an RngStream. Streams for
// independent units of work (one tree, one (tree, variable) permutation, one
// benchmark repetition) are derived from a master seed and a tuple of
// counters, so results never depend on the order in which units are run.
using RngStream = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Domain tags keep streams for different purposes apart even when the
// numeric counters coincide.
enum class StreamDomain : std::uint64_t {
    Tree = 1,
    Permutation = 2,
    Benchmark = 3,
    Folds = 4,
    Simulation = 5,
};

inline std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain,
                                 std::initializer_list<std::uint64_t> counters) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain)));
    for (auto c : counters) {
        h = splitmix64(h ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

inline RngStream derive_stream(std::uint64_t seed, StreamDomain domain,
                               std::initializer_list<std::uint64_t> counters) {
    return RngStream(derive_seed(seed, domain, counters));
}

// Distribution helpers written out by hand: the std:: distributions are
// implementation-defined, which would make serialized models differ across
// standard libraries.

// Uniform integer in [0, bound). bound must be > 0.
inline std::uint64_t uniform_index(RngStream& rng, std::uint64_t bound) {
    const std::uint64_t limit = RngStream::max() - (RngStream::max() % bound) - 1;
    std::uint64_t r = rng();
    while (r > limit) {
        r = rng();
    }
    return r % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(RngStream& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; one variate per call.
inline double standard_normal(RngStream& rng) {
    double u1 = uniform_unit(rng);
    while (u1 <= 0.0) {
        u1 = uniform_unit(rng);
    }
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline bool bernoulli_half(RngStream& rng) { return (rng() >> 63) != 0; }

template <typename T>
void shuffle(std::vector<T>& values, RngStream& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

// k distinct values from [0, n), returned in ascending order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, RngStream& rng) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace frechet
