#include "rvasym/kernels.hpp"

#include <cassert>

#include "kernel_rows.hpp"

namespace rvasym::kernels {

using detail::adjoint_row;
using detail::convolve_row;

namespace serial {

void causal_convolve(std::span<const double> c, std::span<const double> x,
                     std::span<double> out) {
  assert(c.size() >= out.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = convolve_row(c, x, j);
}

void causal_convolve_adjoint(std::span<const double> c, std::span<const double> z,
                             std::span<double> y) {
  assert(c.size() >= z.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = adjoint_row(c, z, i);
}

}  // namespace serial

void causal_convolve(std::span<const double> c, std::span<const double> x,
                     std::span<double> out, Exec exec) {
  if (exec == Exec::parallel)
    omp::causal_convolve(c, x, out);
  else
    serial::causal_convolve(c, x, out);
}

void causal_convolve_adjoint(std::span<const double> c, std::span<const double> z,
                             std::span<double> y, Exec exec) {
  if (exec == Exec::parallel)
    omp::causal_convolve_adjoint(c, z, y);
  else
    serial::causal_convolve_adjoint(c, z, y);
}

}  // namespace rvasym::kernels
