#include "ffgram/rng.hpp"

#include <cmath>

namespace ffgram {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Xoshiro256ss::next() {
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

double Xoshiro256ss::uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Xoshiro256ss::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Xoshiro256ss::gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - uniform01(); // (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

void Xoshiro256ss::cgaussian(double& re, double& im) {
    const double inv_sqrt2 = 0.70710678118654752440;
    re = gaussian() * inv_sqrt2;
    im = gaussian() * inv_sqrt2;
}

} // namespace ffgram
