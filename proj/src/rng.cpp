#include "mvp/rng.hpp"

#include <gsl/gsl_cdf.h>

namespace mvp {

namespace {

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

double normal_quantile(double u) noexcept {
  return gsl_cdf_ugaussian_Pinv(u);
}

std::array<double, 2> CounterRng::uniform_pair(std::uint32_t path, std::uint32_t step,
                                               std::uint32_t lane) const noexcept {
  const auto bits = Philox4x32::block({path, stream_, step, lane}, key_);
  return {to_open_unit(bits[0], bits[1]), to_open_unit(bits[2], bits[3])};
}

std::array<double, 2> CounterRng::normal_pair(std::uint32_t path, std::uint32_t step,
                                              std::uint32_t lane) const noexcept {
  const auto u = uniform_pair(path, step, lane);
  return {normal_quantile(u[0]), normal_quantile(u[1])};
}

void CounterRng::normals(std::uint32_t path, std::uint32_t step, double* out, int n) const noexcept {
  for (int i = 0; i < n; i += 2) {
    const auto z = normal_pair(path, step, static_cast<std::uint32_t>(i / 2));
    out[i] = z[0];
    if (i + 1 < n) out[i + 1] = z[1];
  }
}

}  // namespace mvp
