#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

namespace ambientlink {

struct RealizationSeed {
    std::uint64_t master = 0;
    std::uint64_t index = 0;
};

// Stream domains keep synthesis, measurement noise and bit drawing apart.
enum class StreamTag : std::uint64_t { field = 1, node_field = 2, measurement = 3, bits = 4 };

std::uint64_t mix64(std::uint64_t x);
std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts);

// SplitMix64 sequence over a hashed key; a fresh object per (seed, realization, slot, node, bin)
// key makes every draw independent of scheduling.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64();
    // Uniform on (0, 1).
    double uniform();
    // Circular complex Gaussian with E|z|^2 = 1.
    std::complex<double> complex_normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}
