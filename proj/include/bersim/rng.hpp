#pragma once

#include <cstdint>
#include <span>

namespace bersim {

/// xoshiro256** seeded through splitmix64. Used instead of <random> engines +
/// distributions so that streams are bit-identical across platforms and
/// standard libraries; experiment reproducibility depends on that.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    std::uint64_t next() {
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

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Modulo bias is irrelevant at our n scales.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Sample an index from non-negative weights (cumulative inversion).
    /// Consumes exactly one draw. Weights need not be normalized.
    int pick_weighted(std::span<const double> weights) {
        double total = 0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        double cum = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            cum += weights[i];
            if (u < cum) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    /// Stateless seed derivation for independent substreams.
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
        return splitmix64(x);
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace bersim
