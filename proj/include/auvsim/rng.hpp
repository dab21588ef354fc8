#pragma once

#include <cstdint>

namespace auvsim {

// Deterministic 64-bit generator (splitmix64 core). The standard <random>
// distributions are implementation-defined across library vendors, so all
// randomness in the simulator goes through this instead: identical seeds
// must give identical byte streams on every platform.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, bound); bound > 0
    std::uint32_t next_below(std::uint32_t bound) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next_u64() >> 32) * bound) >> 32);
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // stateless seed derivation for independent sub-streams
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

} // namespace auvsim
