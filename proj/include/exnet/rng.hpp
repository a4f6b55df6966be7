// rng.hpp: counter-based random bit generator with independent substreams
//
// Output k of stream s under seed S is mix(key(S, s) + k * golden), with
// mix the SplitMix64 finalizer. Any (seed, stream) pair can be positioned
// without generating its predecessors, which keeps parallel and serial
// ensemble runs identical.

#pragma once

#include <cstdint>
#include <limits>

namespace exnet {

class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix(key_ + kGolden * ++counter_); }

    std::uint64_t counter() const noexcept { return counter_; }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    std::uint64_t key_;
    std::uint64_t counter_{0};
};

} // namespace exnet
