#include <cassert>

#include "kernel_rows.hpp"
#include "rvasym/kernels.hpp"

namespace rvasym::kernels {

using detail::adjoint_row;
using detail::convolve_row;

namespace omp {

void causal_convolve(std::span<const double> c, std::span<const double> x,
                     std::span<double> out) {
  assert(c.size() >= out.size());
  const auto n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static, 32)
  for (long j = 0; j < n; ++j)
    out[static_cast<std::size_t>(j)] = convolve_row(c, x, static_cast<std::size_t>(j));
}

void causal_convolve_adjoint(std::span<const double> c, std::span<const double> z,
                             std::span<double> y) {
  assert(c.size() >= z.size());
  const auto n = static_cast<long>(y.size());
#pragma omp parallel for schedule(static, 32)
  for (long i = 0; i < n; ++i)
    y[static_cast<std::size_t>(i)] = adjoint_row(c, z, static_cast<std::size_t>(i));
}

}  // namespace omp

}  // namespace rvasym::kernels
