#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mfgcache {

using RandomStream = std::mt19937_64;

// Independent stream for a (master seed, tag...) tuple. The tags are mixed
// through splitmix64 so neighbouring indices give decorrelated streams.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline RandomStream make_stream(std::uint64_t master,
                                std::initializer_list<std::uint64_t> tags = {}) {
  std::uint64_t s = mix_seed(master);
  for (auto t : tags) s = mix_seed(s ^ mix_seed(t + 0x632be59bd9b4e019ULL));
  return RandomStream(s);
}

}  // namespace mfgcache
