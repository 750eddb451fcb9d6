#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace opg {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent per-subsystem seed from the single master seed.
inline uint64_t mix_seed(uint64_t master, uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

inline std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(seed); }

// mt19937_64 state round-trips exactly through its decimal text form.
inline std::string rng_to_string(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

inline std::mt19937_64 rng_from_string(const std::string& s) {
  std::istringstream is(s);
  std::mt19937_64 rng;
  is >> rng;
  return rng;
}

}  // namespace opg
