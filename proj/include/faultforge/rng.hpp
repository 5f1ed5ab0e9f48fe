#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>
#include <vector>

namespace faultforge::rng {

// SplitMix64 step. Used to expand seeds and to hash label/index streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_label(std::string_view s) {
    // FNV-1a, then one splitmix round to spread low entropy labels.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

// Derive an independent sub-seed from a master seed and a list of stream
// parts (labels hashed with hash_label, indices passed as-is). Every
// consumer of randomness derives its own seed this way, so adding or
// reordering unrelated consumers never perturbs an existing stream.
inline std::uint64_t derive(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = master ^ 0x6a09e667f3bcc909ULL;
    splitmix64(state);
    for (std::uint64_t p : parts) {
        state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        splitmix64(state);
    }
    return splitmix64(state);
}

// xoshiro256++ with explicit distributions. The standard library engines are
// portable but its distributions are not; everything here is pinned so runs
// reproduce bit-for-bit under a fixed seed.
class Engine {
public:
    explicit Engine(std::uint64_t seed) {
        for (auto& word : state_) word = splitmix64(seed);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Box-Muller; one draw per call, the paired value is discarded.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace faultforge::rng
