#include "ambientlink/rng.hpp"

#include <cmath>

namespace ambientlink {

namespace {
constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x)
{
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts)
{
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (const std::uint64_t p : parts) h = mix64(h + golden_gamma + mix64(p + golden_gamma));
    return h;
}

std::uint64_t CounterRng::next_u64()
{
    ++counter_;
    return mix64(key_ + counter_ * golden_gamma);
}

double CounterRng::uniform()
{
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::complex<double> CounterRng::complex_normal()
{
    const double r = std::sqrt(-std::log(uniform()));
    const double t = 2.0 * 3.14159265358979323846 * uniform();
    return {r * std::cos(t), r * std::sin(t)};
}

}
