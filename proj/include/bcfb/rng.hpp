#pragma once

#include <cstdint>

namespace bcfb {

// Counter-mode keyed generator built on the splitmix64 finalizer.  Every
// stream is identified by a 64-bit key; child streams are derived by hashing
// the parent key with a caller-chosen id, so worker pools can hand out
// per-trial streams that do not depend on scheduling order.

inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// stateless PRF: one 64-bit word per (key, counter) pair
inline uint64_t prf_word(uint64_t key, uint64_t ctr) {
  return mix64(key ^ mix64(ctr + 0xd1b54a32d192ed03ULL));
}

inline uint64_t derive_key(uint64_t key, uint64_t id) {
  return mix64(key + 0x2545f4914f6cdd1dULL * id + 1);
}

class RngStream {
 public:
  explicit RngStream(uint64_t key = 0) : key_(key), ctr_(0) {}

  uint64_t key() const { return key_; }
  RngStream child(uint64_t id) const { return RngStream(derive_key(key_, id)); }

  uint64_t next_u64() { return prf_word(key_, ctr_++); }

  // in [0,1); 53 random bits
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [0, n) without modulo bias
  uint64_t next_below(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t limit = ~uint64_t{0} - ~uint64_t{0} % n;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

 private:
  uint64_t key_;
  uint64_t ctr_;
};

}  // namespace bcfb
