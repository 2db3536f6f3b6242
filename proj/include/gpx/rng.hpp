#pragma once

// Counter-based random number generation (Philox4x32-10).
//
// Every random stream is addressed by (seed, replicate, stream); draws are a
// pure function of that key plus a draw counter, so results are identical no
// matter how replicates are scheduled across worker threads.

#include <array>
#include <cstdint>

namespace gpx::rng {

namespace detail {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         const std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

/// One 128-bit Philox4x32-10 block for the given key and counter.
inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed,
                                               std::array<std::uint32_t, 4> ctr) {
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                      static_cast<std::uint32_t>(seed >> 32)};
  for (int round = 0; round < 10; ++round) {
    detail::philox_round(ctr, key);
    key[0] += detail::kPhiloxW0;
    key[1] += detail::kPhiloxW1;
  }
  return ctr;
}

double normal_quantile(double u);  // in rng.cpp

/// Stateless-keyed sequential generator. Cheap to construct; not thread-safe
/// per instance, but independent instances never share state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint32_t stream)
      : seed_(seed),
        rep_lo_(static_cast<std::uint32_t>(replicate)),
        rep_hi_stream_(static_cast<std::uint32_t>(replicate >> 32) * 2654435761u ^ stream) {}

  std::uint64_t next_u64() {
    if (idx_ == 0) {
      buf_ = philox4x32(seed_, {static_cast<std::uint32_t>(block_),
                                static_cast<std::uint32_t>(block_ >> 32),
                                rep_lo_, rep_hi_stream_});
      ++block_;
    }
    const int i = idx_;
    idx_ = (idx_ + 2) & 3;
    return (static_cast<std::uint64_t>(buf_[i]) << 32) | buf_[i + 1];
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  /// Standard normal via inverse-CDF (one uniform per deviate).
  double normal() { return normal_quantile(uniform()); }

 private:
  std::uint64_t seed_;
  std::uint32_t rep_lo_;
  std::uint32_t rep_hi_stream_;
  std::uint64_t block_ = 0;
  int idx_ = 0;
  std::array<std::uint32_t, 4> buf_{};
};

}  // namespace gpx::rng
