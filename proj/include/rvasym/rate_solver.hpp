#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rvasym/fbm_kernel.hpp"
#include "rvasym/grid.hpp"
#include "rvasym/vol_spec.hpp"

namespace rvasym {

// Discretized first-order functional
//   Phi1(h) = sum_i sigma(hhat(mid_i)) (rho hdot_i + rhobar hbardot_i) dt
// with the fractional integral sampled at cell midpoints.
class RateProblem {
 public:
  RateProblem(const VolModelSpec& spec, std::size_t n);

  const VolModelSpec& spec() const { return spec_; }
  std::size_t size() const { return n_; }
  const FractionalKernel& kernel() const { return kernel_; }

  double phi1(const CameronMartinPair& h) const;
  // Riesz representative of DPhi1(h) in the H^1_0 x H^1_0 inner product. This is the
  // exact gradient of the discrete phi1, divided by dt.
  CameronMartinPair dphi1(const CameronMartinPair& h) const;
  // Both at once (shares the midpoint convolution).
  double phi1_and_gradient(const CameronMartinPair& h, CameronMartinPair& grad) const;

 private:
  VolModelSpec spec_;
  std::size_t n_;
  FractionalKernel kernel_;
};

double phi1_cm(const CameronMartinPair& h, const VolModelSpec& spec);
CameronMartinPair dphi1(const CameronMartinPair& h, const VolModelSpec& spec);

struct SolverOptions {
  double kkt_tol = 1e-10;         // relative: ||h - q DPhi1(h)|| <= kkt_tol ||h||
  double constraint_tol = 1e-13;  // |Phi1(h) - x| <= constraint_tol max(x, 1)
  int max_outer = 80;
  int max_inner = 4000;
  int lbfgs_memory = 24;
  // Continuation in x when x / sigma(0) exceeds this, in steps of this size.
  double continuation_threshold = 1.0;
  int restarts = 5;
  double restart_scale = 0.3;
  std::uint64_t restart_seed = 20240611;
  bool compute_margin = true;
  double hessian_step = 1e-4;
};

struct RateSolution {
  double x = 0.0;
  VolModelSpec spec;
  CameronMartinPair h;            // minimizer h^x on the solver grid
  double rate = 0.0;              // Lambda(x) = ||h^x||^2 / 2
  double q = 0.0;                 // Lagrange multiplier = Lambda'(x)
  double sigma_x = 0.0;           // sqrt(2 Lambda) / q
  double kkt_residual = 0.0;      // ||h - q DPhi1(h)||_H
  double constraint_residual = 0.0;
  double margin = 1.0;            // 1 - q lambda_max of the projected Hessian
  int iterations = 0;
  std::vector<std::string> warnings;

  Grid grid() const { return h.grid(); }
};

// Minimize ||h||^2 / 2 subject to Phi1(h) = x by augmented Lagrangian with an L-BFGS
// inner loop. Deterministic for fixed options. Throws NonConvergence, DegenerateSpec,
// or std::invalid_argument for x < 0.
RateSolution solve_rate(double x, const VolModelSpec& spec, std::size_t n,
                        const SolverOptions& opts = {});

// Central finite-difference Hessian of Phi1 as an operator on H-densities (2n x 2n,
// symmetrized). Columns are d/de DPhi1(h + e e_i).
Eigen::MatrixXd phi1_hessian(const RateProblem& problem, const CameronMartinPair& h,
                             double step);

// 1 - q lambda_max, lambda_max the largest eigenvalue of the Hessian restricted to the
// orthogonal complement of h^x. Stores the value in sol.margin.
double check_nondegeneracy(RateSolution& sol, const SolverOptions& opts = {});

struct LambdaPrimeCheck {
  double fd;
  double q;
  double abs_diff;
};
// Central difference of Lambda at x (forward difference at x = 0).
LambdaPrimeCheck lambda_prime_check(double x, const VolModelSpec& spec, std::size_t n,
                                    double delta, const SolverOptions& opts = {});

// ||DPhi1(h^x)||^2, the variance of the first-order Taylor term g1.
double g1_variance_analytic(const RateSolution& sol);

}  // namespace rvasym
