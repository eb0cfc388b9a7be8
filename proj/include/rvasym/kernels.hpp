#pragma once

#include <span>

#include "rvasym/exec.hpp"

namespace rvasym::kernels {

// out[j] = sum_{i <= j, i < x.size()} c[j - i] * x[i], for j < out.size().
// c must have at least out.size() entries.
void causal_convolve(std::span<const double> c, std::span<const double> x,
                     std::span<double> out, Exec exec);

// Adjoint of causal_convolve: y[i] = sum_{j >= i, j < z.size()} c[j - i] * z[j].
void causal_convolve_adjoint(std::span<const double> c, std::span<const double> z,
                             std::span<double> y, Exec exec);

namespace serial {
void causal_convolve(std::span<const double> c, std::span<const double> x,
                     std::span<double> out);
void causal_convolve_adjoint(std::span<const double> c, std::span<const double> z,
                             std::span<double> y);
}  // namespace serial

namespace omp {
void causal_convolve(std::span<const double> c, std::span<const double> x,
                     std::span<double> out);
void causal_convolve_adjoint(std::span<const double> c, std::span<const double> z,
                             std::span<double> y);
}  // namespace omp

}  // namespace rvasym::kernels
