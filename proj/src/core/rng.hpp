#pragma once

#include <cstdint>

namespace recoil {

// Counter-based RNG (Philox-4x32-10). Each ion history owns an independent
// stream keyed by (seed, history id), so results do not depend on how
// histories are distributed over threads.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id)
      : key0_(static_cast<uint32_t>(seed)),
        key1_(static_cast<uint32_t>(seed >> 32)),
        ctr2_(static_cast<uint32_t>(stream_id)),
        ctr3_(static_cast<uint32_t>(stream_id >> 32)) {}

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform() {
    if (have_ >= 2) refill();
    const uint64_t hi = out_[have_ * 2];
    const uint64_t lo = out_[have_ * 2 + 1];
    ++have_;
    const uint64_t u64 = (hi << 32) | lo;
    return static_cast<double>(u64 >> 11) * 0x1.0p-53;
  }

  uint64_t next_u64() {
    if (have_ >= 2) refill();
    const uint64_t hi = out_[have_ * 2];
    const uint64_t lo = out_[have_ * 2 + 1];
    ++have_;
    return (hi << 32) | lo;
  }

 private:
  static void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    const uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
  }

  void refill() {
    uint32_t c0 = static_cast<uint32_t>(block_);
    uint32_t c1 = static_cast<uint32_t>(block_ >> 32);
    uint32_t c2 = ctr2_;
    uint32_t c3 = ctr3_;
    uint32_t k0 = key0_;
    uint32_t k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c0, hi0, lo0);
      mulhilo(0xCD9E8D57u, c2, hi1, lo1);
      const uint32_t n0 = hi1 ^ c1 ^ k0;
      const uint32_t n1 = lo1;
      const uint32_t n2 = hi0 ^ c3 ^ k1;
      const uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = c0;
    out_[1] = c1;
    out_[2] = c2;
    out_[3] = c3;
    ++block_;
    have_ = 0;
  }

  uint32_t key0_, key1_;
  uint32_t ctr2_, ctr3_;
  uint64_t block_ = 0;
  uint32_t out_[4] = {0, 0, 0, 0};
  int have_ = 2;  // force refill on first draw
};

}  // namespace recoil
