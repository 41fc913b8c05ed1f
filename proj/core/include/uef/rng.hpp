#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <string_view>
#include <vector>

// Self-contained random machinery. The standard <random> distributions are
// implementation-defined, which would break the bit-reproducibility contract
// the artifacts promise, so generation and distributions are all pinned here.
namespace uef::rng {

using Seed = std::uint64_t;

constexpr Seed splitmix64(Seed& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    Seed z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a, used to fold identifiers (explainer ids, stream tags) into seeds.
constexpr Seed hash_str(std::string_view s) noexcept {
    Seed h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Derives a child seed from a master seed and a path of parts, e.g.
// derive(master, {row_index, hash_str("shapley"), k}). Parallel schedules
// hand each work unit its own derived stream so results never depend on
// worker count or completion order.
constexpr Seed derive(Seed master, std::initializer_list<Seed> parts) noexcept {
    Seed state = master ^ 0xd1b54a32d192ed03ULL;
    Seed h = splitmix64(state);
    for (Seed p : parts) {
        state ^= p;
        h ^= splitmix64(state);
        h *= 0x2545f4914f6cdd1dULL;
        h ^= h >> 29;
    }
    return h;
}

// xoshiro256** seeded via splitmix64.
class Engine {
public:
    explicit Engine(Seed seed) noexcept {
        Seed sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_double();
    }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t below(std::uint64_t n) noexcept {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) noexcept { return next_double() < p; }

    // Standard normal, Box-Muller with a cached spare.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) noexcept {
        return mean + stddev * normal();
    }

    template <typename T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace uef::rng
