#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rvasym/exec.hpp"
#include "rvasym/grid.hpp"

namespace rvasym {

// K(s,t) = sqrt(2H) (t-s)^(H-1/2) for s < t, zero otherwise.
double volterra_kernel(double H, double s, double t);

// Throws std::invalid_argument unless 0 < H <= 1/2.
void validate_hurst(double H);

// Cell-integrated kernel weights on a uniform grid with n cells.
//   node weights c[d] = int_{t_{j-d}}^{t_{j-d+1}} K(s, t_j) ds, c[0] = 0 (size n+1)
//   midpoint weights m[d] = int over cell j-d of K(s, mid_j) ds, cut at mid_j (size n)
// Both depend only on the lag d, so the fractional integral is a Toeplitz product.
class FractionalKernel {
 public:
  FractionalKernel(double H, std::size_t n);

  double hurst() const { return H_; }
  std::size_t size() const { return n_; }
  const std::vector<double>& node_weights() const { return node_; }
  const std::vector<double>& midpoint_weights() const { return mid_; }

  // hhat(t_j) = sum_{i<j} hdot_i c[j-i], returned at all n+1 nodes.
  GridPath integrate_cm(std::span<const double> hdot, Exec exec = Exec::serial) const;
  // What(t_j) = sum_{i<j} dW_i c[j-i] / dt. Same weights, so a shift dW -> dW + hdot dt
  // moves What by exactly hhat.
  GridPath integrate_bm(std::span<const double> dW, Exec exec = Exec::serial) const;
  void integrate_bm(std::span<const double> dW, std::span<double> out,
                    Exec exec = Exec::serial) const;
  // hhat at the cell midpoints (size n).
  std::vector<double> integrate_mid(std::span<const double> hdot,
                                    Exec exec = Exec::serial) const;
  // Adjoint of integrate_mid: y_i = sum_{j >= i} m[j-i] z_j.
  std::vector<double> integrate_mid_adjoint(std::span<const double> z,
                                            Exec exec = Exec::serial) const;

 private:
  double H_;
  std::size_t n_;
  std::vector<double> node_;
  std::vector<double> mid_;
  std::vector<double> node_bm_;  // node_ / dt
};

GridPath fractional_integral_cm(std::span<const double> hdot, double H);
GridPath fractional_integral_bm(std::span<const double> dW, double H);

// Running integral h(t_j) = sum_{i<j} hdot_i dt.
GridPath integrate_path(std::span<const double> hdot);

// htilde = rho h + rhobar hbar on derivatives; |rho| <= 1.
std::vector<double> correlate(const CameronMartinPair& h, double rho);

double cm_inner(const CameronMartinPair& a, const CameronMartinPair& b);
double cm_norm_sq(const CameronMartinPair& h);

// Piecewise-constant refinement: each cell split into r cells with the same derivative.
CameronMartinPair refine(const CameronMartinPair& h, std::size_t r);

}  // namespace rvasym
