#pragma once

#include <cmath>
#include <cstdint>

/*
 * SplitMix64 with salted substreams. std::uniform_real_distribution is
 * implementation-defined, so every variate here is derived from raw
 * 64-bit outputs only; sample i of check c is a pure function of
 * (seed, salt, i), which makes results independent of how samples are
 * partitioned across worker threads.
 */
namespace bf {

struct Rng {
  uint64_t state = 0;

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [eps, 1-eps]
  double open01(double eps = 1e-12) { return eps + (1.0 - 2.0 * eps) * u01(); }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  bool coin() { return (next() & 1ULL) != 0; }

  double normal() {
    double u1 = 1.0 - u01(); // (0,1]
    double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

inline uint64_t mix64(uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

inline Rng substream(uint64_t seed, uint64_t salt, uint64_t index) {
  Rng r;
  r.state = mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^
                  mix64(salt + 0x632be59bd9b4e019ULL) ^
                  mix64(index + 0xd6e8feb86659fd93ULL));
  return r;
}

// substream salts, one per randomized component
enum : uint64_t {
  kSaltScanMembership = 1,
  kSaltScanC4 = 2,
  kSaltScanC5 = 3,
  kSaltZetaOracle = 5,
  kSaltConvexity = 7,
  kSaltHellingerScan = 8,
};

} // namespace bf
