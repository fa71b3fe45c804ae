#pragma once

#include <cstdint>
#include <cmath>

namespace socl {

// splitmix64; used to derive independent per-run streams from (master seed, run index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t run_index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = master ^ (0x9e3779b97f4a7c15ULL * (run_index + 1));
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x165667b19e3779f9ULL + (run_index << 1));
}

// xoshiro256** — self-contained so traces are bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
        has_cached_gaussian_ = false;
        cached_gaussian_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, 1); never exactly 0 (safe for log())
    double uniform_positive() {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return u;
    }

    // standard normal via Box-Muller (deterministic given the stream, unlike
    // std::normal_distribution whose algorithm varies across standard libraries)
    double gaussian() {
        if (has_cached_gaussian_) {
            has_cached_gaussian_ = false;
            return cached_gaussian_;
        }
        const double u1 = uniform_positive();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        cached_gaussian_ = r * std::sin(theta);
        has_cached_gaussian_ = true;
        return r * std::cos(theta);
    }

    double gaussian(double stddev) { return stddev <= 0.0 ? 0.0 : stddev * gaussian(); }

    // index in [0, n)
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // sample index from an unnormalized nonnegative weight vector
    template <typename Vec>
    std::size_t sample_index(const Vec& weights) {
        double total = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(weights.size()); ++i)
            total += weights[i];
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(weights.size()); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return static_cast<std::size_t>(weights.size()) - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    bool has_cached_gaussian_;
    double cached_gaussian_;
};

}  // namespace socl
