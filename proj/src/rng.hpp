// Counter-based splittable RNG. Every (seed, stream) pair yields an
// independent deterministic stream, so parallel samplers can hand one
// stream to each sample and get results that do not depend on thread
// count or scheduling order.
#pragma once

#include <cstdint>
#include <cstddef>

namespace projlab {

namespace detail {
inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream)
      : key_(detail::splitmix64(seed ^ detail::splitmix64(stream ^ 0x5851f42d4c957f2dull))) {}

  uint64_t next_u64() {
    return detail::splitmix64(key_ + 0x9e3779b97f4a7c15ull * ++counter_);
  }

  // uniform in [0,1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo,hi)
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // uniform index in [0,n)
  size_t next_index(size_t n) { return static_cast<size_t>(next_double() * static_cast<double>(n)) % n; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace projlab
