#ifndef FPIV_RNG_HPP
#define FPIV_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

namespace fpiv {

/// Counter-based 64-bit generator (SplitMix64 output function over an
/// incrementing counter). Streams are keyed by (seed, stream), so Monte Carlo
/// replicates get independent, order-free sequences: replicate r draws the
/// same numbers no matter which worker runs it.
class CounterRng {
public:
    using result_type = std::uint64_t;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return x;
    }

    static CounterRng keyed(std::uint64_t seed, std::uint64_t stream) {
        return CounterRng(mix(seed + 0x9E3779B97F4A7C15ULL) ^
                          mix(stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    }

    explicit CounterRng(std::uint64_t key) : state_(key) {}

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform draw in [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() { return normal_(*this); }

private:
    std::uint64_t state_;
    std::normal_distribution<double> normal_;
};

}  // namespace fpiv

#endif
