#pragma once

#include <algorithm>
#include <cstddef>
#include <span>

namespace rvasym::kernels::detail {

inline double convolve_row(std::span<const double> c, std::span<const double> x,
                           std::size_t j) {
  const std::size_t imax = std::min(j + 1, x.size());
  double s = 0.0;
  for (std::size_t i = 0; i < imax; ++i) s += c[j - i] * x[i];
  return s;
}

inline double adjoint_row(std::span<const double> c, std::span<const double> z,
                          std::size_t i) {
  double s = 0.0;
  for (std::size_t j = i; j < z.size(); ++j) s += c[j - i] * z[j];
  return s;
}

}  // namespace rvasym::kernels::detail
