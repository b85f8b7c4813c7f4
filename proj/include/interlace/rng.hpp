#pragma once

#include <cstdint>

namespace interlace {

/// Counter-based splittable random stream built on the SplitMix64
/// finalizer. A stream is fully determined by its key, and child streams
/// derived from (key, id) are statistically independent, so parallel
/// consumers can be handed disjoint streams up front — that is what makes
/// multi-worker runs bitwise reproducible.
class SplitStream {
  public:
    using result_type = std::uint64_t;

    explicit SplitStream(std::uint64_t key) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    std::uint64_t next_u64() { return mix(key_ + ++counter_ * kGolden); }
    result_type operator()() { return next_u64(); }

    /// Uniform double in [0, 1) carrying 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Independent stream keyed by (this key, id); leaves this stream's
    /// position untouched.
    SplitStream child(std::uint64_t id) const { return SplitStream(mix(key_ ^ mix(id + kGolden))); }

    /// The stream's key; a stream rebuilt from it restarts at position 0.
    std::uint64_t key() const { return key_; }

  private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// One Gamma(shape, 1) draw; valid for every shape > 0, including the
/// sub-unit shapes that Dirichlet weights with alpha < 1 require.
double gamma_draw(SplitStream& s, double shape);

} // namespace interlace
