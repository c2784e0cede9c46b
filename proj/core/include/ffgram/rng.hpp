#ifndef FFGRAM_RNG_HPP
#define FFGRAM_RNG_HPP

#include <cstdint>

namespace ffgram {

// xoshiro256** with splitmix64 seeding. Written out explicitly (rather than
// delegating to a platform engine) because corpora must reproduce
// bit-identically from the documented update equations alone:
//
//   splitmix64:  z = (x += 0x9e3779b97f4a7c15);
//                z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
//                z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
//                return z ^ (z >> 31);
//   state: s[0..3] = four successive splitmix64 outputs of the seed
//   next:  r = rotl(s[1] * 5, 7) * 9;  t = s[1] << 17;
//          s[2]^=s[0]; s[3]^=s[1]; s[1]^=s[2]; s[0]^=s[3]; s[2]^=t;
//          s[3] = rotl(s[3], 45);  return r
//
// uniform01 maps the top 53 bits into [0, 1): (next() >> 11) * 2^-53.
// gaussian draws by the trigonometric Box-Muller transform on consecutive
// uniforms u1' = 1 - u1 (so the log argument lies in (0, 1]):
//   z0 = sqrt(-2 ln u1') cos(2 pi u2),  z1 = sqrt(-2 ln u1') sin(2 pi u2)
// returned in the order z0 then z1.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed);

    std::uint64_t next();
    double uniform01();
    // Uniform on [lo, hi).
    double uniform(double lo, double hi);
    double gaussian();

    // Standard complex gaussian: (g1 + i g2) / sqrt(2), as a (re, im) pair.
    void cgaussian(double& re, double& im);

private:
    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace ffgram

#endif
