#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

// Deterministic randomness helpers. All transforms (uniform, normal) are
// hand-rolled from raw mt19937_64 output so sequences do not depend on the
// standard library's distribution implementations.

namespace dbnt {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent stream id from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]
    double uniform_pos() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    }

    // standard normal via Box-Muller (consumes two engine draws)
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643 * u2);
    }

    // uniform integer in [0, bound) by rejection, bound >= 1
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % bound;
    }

private:
    std::mt19937_64 eng_;
};

// Fixed Gaussian draw for a (document, unit) pair: the same inputs always
// produce the same value, independent of call order.
inline double hashed_normal(std::uint64_t seed, std::string_view doc_id, std::uint64_t unit) {
    std::uint64_t s = mix_seed(mix_seed(seed, fnv1a64(doc_id)), unit);
    const std::uint64_t a = splitmix64(s);
    const std::uint64_t b = splitmix64(a ^ 0xd1b54a32d192ed03ULL);
    const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643 * u2);
}

} // namespace dbnt
