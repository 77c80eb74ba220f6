#pragma once

// Counter-based random streams (Philox4x32-10).
//
// A stream is addressed by (root seed, replica index, purpose tag). The seed
// is the 64-bit key; the 128-bit counter is laid out as
//   [block_lo, block_hi, replica, purpose]
// so every (replica, purpose) pair owns 2^64 blocks of 4 words and streams
// never overlap. Draws are a pure function of the address and the number of
// words consumed, which makes ensembles replayable and order-independent.

#include <array>
#include <cmath>
#include <cstdint>

namespace sghydro {

enum class StreamPurpose : std::uint32_t {
  InitialConfiguration = 1,
  Dynamics = 2,
  Test = 0xffff,
};

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t replica, StreamPurpose purpose)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        replica_(replica),
        purpose_(static_cast<std::uint32_t>(purpose)) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill() {
    buf_ = Philox4x32::block({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), replica_, purpose_},
                             key_);
    ++block_;
    pos_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t replica_;
  std::uint32_t purpose_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buf_{};
  int pos_ = 4;
};

}  // namespace sghydro
