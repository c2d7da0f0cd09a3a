#pragma once

#include <cstdint>
#include <string_view>

namespace qpnls {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so results do not depend on evaluation order
// and parallel workers can share one seed without coordination.
// Mixing function is splitmix64.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a, used to derive stream ids from purpose strings.
inline std::uint64_t hash_stream(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}
  CounterRng(std::uint64_t seed, std::string_view stream)
      : CounterRng(seed, hash_stream(stream)) {}

  // Value at an explicit counter; does not advance internal state.
  std::uint64_t at(std::uint64_t counter) const {
    return mix64(mix64(seed_ ^ 0x6a09e667f3bcc909ULL) ^ mix64(stream_) ^
                 (counter * 0x9e3779b97f4a7c15ULL));
  }
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  // Sequential convenience interface.
  std::uint64_t next_u64() { return at(counter_++); }
  double next_uniform() { return uniform_at(counter_++); }
  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace qpnls
