#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rvasym/exec.hpp"
#include "rvasym/grid.hpp"
#include "rvasym/model_space.hpp"
#include "rvasym/rate_solver.hpp"
#include "rvasym/taylor.hpp"
#include "rvasym/vol_spec.hpp"

namespace rvasym {

struct McOptions {
  std::size_t n_steps = 128;  // pricing grid; a multiple of the solver grid for IS
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  std::size_t refine = 4;  // fine steps per coarse cell for model samples
  Exec exec = Exec::parallel;
};

// Gaussian increments of (W, Wbar) on a grid of n steps for one path.
struct PathIncrements {
  std::vector<double> dw, dwbar;
};
void draw_increments(std::uint64_t seed, std::uint64_t path, std::size_t n, PathIncrements& out);
std::vector<PathIncrements> simulate_noise(std::size_t n_paths, std::size_t n_steps,
                                           std::uint64_t seed);

// Lifted model of path i on n coarse cells with the given refinement.
class ModelSampler {
 public:
  ModelSampler(double H, std::size_t n, std::size_t refine, std::uint64_t seed);
  ItoModel sample(std::uint64_t path) const;
  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  std::size_t n_, refine_;
  std::uint64_t seed_;
  FractionalKernel fine_;
};

struct PriceEstimate {
  double price = 0.0;
  double se = 0.0;
  double log_price = 0.0;  // -inf when every path pays zero
  double log_se = 0.0;     // delta-method standard error of log_price
  std::size_t n_paths = 0;
  double ess_fraction = 1.0;
  bool weight_degenerate = false;  // ess_fraction < 1%
  std::uint64_t seed = 0;
};

// Left-point Euler scheme for
//   X = sum sigma(eps^(2H) What_k) eps dWtilde_k - eps^2/2 sum sigma^2(eps^(2H) What_k) dt,
// averaging (e^X - e^k)^+ with k = x eps / epsbar.
PriceEstimate price_call_plain(double eps, double x, const VolModelSpec& spec,
                               const ScalingRegime& regime, const McOptions& opts);

// Same scheme with the noise shifted by h^x / epsbar and the exact discrete Girsanov
// weight exp(-(1/epsbar) sum hdot dW - Lambda/epsbar^2), accumulated in log space.
PriceEstimate price_call_is(double eps, const RateSolution& sol, const ScalingRegime& regime,
                            const McOptions& opts);

// P[X > k] by the same importance sampler, in log space.
PriceEstimate digital_is(double eps, const RateSolution& sol, const ScalingRegime& regime,
                         const McOptions& opts);

struct DigitalRow {
  double eps;
  double eps_bar;
  double statistic;  // -epsbar^2 log P[X > k]
  double statistic_se;
  double rate;
};
std::vector<DigitalRow> ldp_digital_bound(const RateSolution& sol, const ScalingRegime& regime,
                                          const std::vector<double>& eps_list,
                                          const McOptions& opts);

// g1, g2 of a model sample around h^x (sol grid = model coarse grid).
TaylorTerms sample_g1_g2(const VolModelSpec& spec, const RateSolution& sol,
                         const ItoModel& model);

// Split of g2 along the direction v = DPhi1(h^x) / ||DPhi1(h^x)||^2:
//   W = V + g1 v,  g2 = Delta2 + g1 Delta1 + g1^2 Delta0,
// Delta2 = G2(V) + K2, Delta1 the bilinear cross term, Delta0 = G2(v).
struct ShiftDecomposition {
  double g1 = 0.0;
  double g2 = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta1_recovered = 0.0;  // (g2 - Delta2 - g1^2 Delta0) / g1, NaN when |g1| <= 1e-8
  double residual = 0.0;          // g2 - (Delta2 + g1 Delta1 + g1^2 Delta0)
};

// Precomputes the lifted shifts and Delta0 once per solution.
class ShiftDecomposer {
 public:
  ShiftDecomposer(const VolModelSpec& spec, const RateSolution& sol, std::size_t refine);

  ShiftDecomposition decompose(const ItoModel& model, ItoModel* v_model = nullptr) const;
  const CameronMartinPair& direction() const { return v_; }
  double delta0() const { return delta0_; }

 private:
  double quadratic(const ItoModel& m) const;  // g2 without K2

  VolModelSpec spec_;
  std::size_t n_, refine_;
  LiftedShift hx_;
  CameronMartinPair v_;
  LiftedShift v_shift_;
  double delta0_ = 0.0;
};

ShiftDecomposition decompose_shift(const VolModelSpec& spec, const RateSolution& sol,
                                   const ItoModel& model);

struct AEstimate {
  double A = 0.0;
  double se = 0.0;
  double top1_mass = 0.0;  // share of the sum carried by the largest 1% of samples
  bool heavy_tail = false;
  std::size_t n_paths = 0;
};

// A(x) = E[exp(Lambda'(x) Delta2)], times e^x when H = 1/2. Refuses a solution whose
// second-order margin is not positive.
AEstimate estimate_A(const RateSolution& sol, const McOptions& opts);

struct G1Statistics {
  double mean = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
  std::size_t n_paths = 0;
};
G1Statistics g1_statistics(const RateSolution& sol, const McOptions& opts);

struct DecompositionStats {
  double max_residual = 0.0;
  double corr_g1_delta2 = 0.0;
  std::size_t n_paths = 0;
};
DecompositionStats decomposition_statistics(const RateSolution& sol, const McOptions& opts);

// Taylor-form estimate of J = log c + Lambda/epsbar^2 - k from
//   E[exp(-Lambda' g1/epsbar) (exp(eps g1 + epsbar eps g2) - 1)^+],
// i.e. the exact identity with the cubic remainder dropped. Returns log J with its s.e.
PriceEstimate estimate_j_taylor(double eps, const RateSolution& sol, const McOptions& opts);

}  // namespace rvasym
