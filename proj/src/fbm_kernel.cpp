#include "rvasym/fbm_kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "rvasym/errors.hpp"
#include "rvasym/kernels.hpp"

namespace rvasym {

namespace {

// u^a - (u-1)^a for u >= 1 without cancellation at large u.
double power_step(double u, double a) {
  if (u <= 1.0) return std::pow(u, a);
  return -std::pow(u, a) * std::expm1(a * std::log1p(-1.0 / u));
}

}  // namespace

void validate_hurst(double H) {
  if (!(H > 0.0 && H <= 0.5))
    throw std::invalid_argument("Hurst parameter must lie in (0, 1/2]");
}

double volterra_kernel(double H, double s, double t) {
  validate_hurst(H);
  if (!(s < t)) return 0.0;
  return std::sqrt(2.0 * H) * std::pow(t - s, H - 0.5);
}

FractionalKernel::FractionalKernel(double H, std::size_t n) : H_(H), n_(n) {
  validate_hurst(H);
  if (n == 0) throw std::invalid_argument("grid needs at least one cell");
  const double a = H + 0.5;
  const double dt = 1.0 / static_cast<double>(n);
  const double scale = std::sqrt(2.0 * H) / a * std::pow(dt, a);

  node_.assign(n + 1, 0.0);
  node_bm_.assign(n + 1, 0.0);
  for (std::size_t d = 1; d <= n; ++d) {
    node_[d] = scale * power_step(static_cast<double>(d), a);
    node_bm_[d] = node_[d] / dt;
  }
  mid_.assign(n, 0.0);
  mid_[0] = scale * std::pow(0.5, a);
  for (std::size_t d = 1; d < n; ++d)
    mid_[d] = scale * power_step(static_cast<double>(d) + 0.5, a);
}

GridPath FractionalKernel::integrate_cm(std::span<const double> hdot, Exec exec) const {
  if (hdot.size() != n_) throw GridMismatch("derivative length does not match the kernel grid");
  GridPath out(n_ + 1);
  kernels::causal_convolve(node_, hdot, out, exec);
  return out;
}

GridPath FractionalKernel::integrate_bm(std::span<const double> dW, Exec exec) const {
  GridPath out(n_ + 1);
  integrate_bm(dW, out, exec);
  return out;
}

void FractionalKernel::integrate_bm(std::span<const double> dW, std::span<double> out,
                                    Exec exec) const {
  if (dW.size() != n_ || out.size() != n_ + 1) throw GridMismatch("increment length does not match the kernel grid");
  if (H_ == 0.5) {
    // K = 1: What is W itself. Same result as the convolution up to rounding.
    out[0] = 0.0;
    for (std::size_t i = 0; i < n_; ++i) out[i + 1] = out[i] + dW[i];
    return;
  }
  kernels::causal_convolve(node_bm_, dW, out, exec);
}

std::vector<double> FractionalKernel::integrate_mid(std::span<const double> hdot,
                                                    Exec exec) const {
  if (hdot.size() != n_) throw GridMismatch("derivative length does not match the kernel grid");
  std::vector<double> out(n_);
  kernels::causal_convolve(mid_, hdot, out, exec);
  return out;
}

std::vector<double> FractionalKernel::integrate_mid_adjoint(std::span<const double> z,
                                                            Exec exec) const {
  if (z.size() != n_) throw GridMismatch("input length does not match the kernel grid");
  std::vector<double> out(n_);
  kernels::causal_convolve_adjoint(mid_, z, out, exec);
  return out;
}

GridPath fractional_integral_cm(std::span<const double> hdot, double H) {
  return FractionalKernel(H, hdot.size()).integrate_cm(hdot);
}

GridPath fractional_integral_bm(std::span<const double> dW, double H) {
  return FractionalKernel(H, dW.size()).integrate_bm(dW);
}

GridPath integrate_path(std::span<const double> hdot) {
  const double dt = 1.0 / static_cast<double>(hdot.size());
  GridPath out(hdot.size() + 1, 0.0);
  for (std::size_t i = 0; i < hdot.size(); ++i) out[i + 1] = out[i] + hdot[i] * dt;
  return out;
}

std::vector<double> correlate(const CameronMartinPair& h, double rho) {
  if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("correlation must lie in [-1, 1]");
  if (h.hdot.size() != h.hbardot.size())
    throw std::invalid_argument("Cameron-Martin components differ in length");
  const double rhobar = std::sqrt(1.0 - rho * rho);
  std::vector<double> out(h.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rho * h.hdot[i] + rhobar * h.hbardot[i];
  return out;
}

double cm_inner(const CameronMartinPair& a, const CameronMartinPair& b) {
  if (a.size() != b.size()) throw GridMismatch("Cameron-Martin pairs on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a.hdot[i] * b.hdot[i] + a.hbardot[i] * b.hbardot[i];
  return s / static_cast<double>(a.size());
}

double cm_norm_sq(const CameronMartinPair& h) { return cm_inner(h, h); }

CameronMartinPair refine(const CameronMartinPair& h, std::size_t r) {
  if (r == 0) throw std::invalid_argument("refinement factor must be positive");
  CameronMartinPair out(h.size() * r);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t k = 0; k < r; ++k) {
      out.hdot[i * r + k] = h.hdot[i];
      out.hbardot[i * r + k] = h.hbardot[i];
    }
  return out;
}

}  // namespace rvasym
