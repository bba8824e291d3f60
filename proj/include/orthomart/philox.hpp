#pragma once

#include <array>
#include <cstdint>

namespace orthomart {

/// Philox4x32-10 counter-based block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream of random words addressed by (seed, stream id, position).
///
/// The key is the seed; the counter holds the block position in its low half and
/// the stream id in its high half, so stream r's draws depend only on (seed, r).
/// That gives parallel replicates a fixed, order-independent source of randomness.
class CounterRng {
 public:
  using result_type = std::uint32_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()();

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform_open();
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double standard_normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace orthomart
