#pragma once

#include <array>
#include <cstdint>

namespace mvp {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// every block of random bits is a pure function of (key, counter).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
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

/// Lane offsets that keep auxiliary draws apart from the Brownian increments.
inline constexpr std::uint32_t kAuxLane = 0x80000000u;
inline constexpr std::uint32_t kSetupLane = 0xC0000000u;

/// Random numbers addressed by (seed, stream, path, step, lane). The same
/// address always yields the same numbers, independent of evaluation order,
/// which makes path-parallel simulation reproducible for any worker count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint32_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  /// Two uniforms in the open interval (0, 1), 53 bits each.
  std::array<double, 2> uniform_pair(std::uint32_t path, std::uint32_t step,
                                     std::uint32_t lane) const noexcept;

  /// Two independent standard normals by inverse-CDF transform.
  std::array<double, 2> normal_pair(std::uint32_t path, std::uint32_t step,
                                    std::uint32_t lane) const noexcept;

  /// Fills `out` (length n) with standard normals for one (path, step).
  void normals(std::uint32_t path, std::uint32_t step, double* out, int n) const noexcept;

  std::uint32_t stream() const noexcept { return stream_; }

 private:
  Philox4x32::Key key_;
  std::uint32_t stream_;
};

/// Standard normal quantile.
double normal_quantile(double u) noexcept;

}  // namespace mvp
