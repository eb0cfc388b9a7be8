#pragma once

#include <vector>

#include "rvasym/grid.hpp"
#include "rvasym/model_space.hpp"
#include "rvasym/vol_spec.hpp"

namespace rvasym {

// Reconstruction of int sigma(What) dWtilde from a model by compensated sums:
//   sum_cells sum_{m<=M} sigma^(m)(What_s)/m! (rho I^m + rhobar Ibar^m).
double phi0(const ItoModel& model, const VolModelSpec& spec);

// -(eps * eps^(2H) / 2) sum_k sigma^2(What_k) dtau on the fine grid.
double drift_term(double eps, const ItoModel& model, const VolModelSpec& spec);

// phi0 plus the drift term.
double phi_eps(double eps, const ItoModel& model, const VolModelSpec& spec);

// Coefficients of phi_eps(eps, translate(dilate(M, e), h)) = g0 + e g1 + e^2 g2 + O(e^3),
// with e = epsbar = eps^(2H). They are the exact derivatives of the discrete map, so the
// remainder is cubic on every grid. k2 = -1/2 sum sigma^2(hhat) dtau when H = 1/2 and zero
// otherwise; g2 already includes it.
struct TaylorTerms {
  double g0 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double k2 = 0.0;
};

TaylorTerms taylor_terms(const LiftedShift& h, const ItoModel& model, const VolModelSpec& spec);
TaylorTerms taylor_terms(const CameronMartinPair& h, const ItoModel& model,
                         const VolModelSpec& spec);

// phi_eps(eps, translate(dilate(M, epsbar), h)) - (g0 + epsbar g1 + epsbar^2 g2), with
// eps = epsbar^(1/(2H)). With drift_corrected the exact drift term is removed from both
// sides (used for H < 1/2, where it is not a power of epsbar).
double taylor_remainder(double eps_bar, const LiftedShift& h, const ItoModel& model,
                        const VolModelSpec& spec, const TaylorTerms& terms,
                        bool drift_corrected);

struct RemainderSlope {
  double slope = 0.0;  // +infinity when the remainder vanishes identically
  bool vanishing = false;
  std::vector<double> eps_bar;
  std::vector<double> remainder;
  TaylorTerms terms;
};

// Least-squares slope of log|remainder| against log epsbar over epsbar = 2^-3 .. 2^-8.
// Requires epsbar * homogeneous_norm(model) <= delta over that range.
RemainderSlope remainder_scaling_check(const ItoModel& model, const CameronMartinPair& h,
                                       const VolModelSpec& spec, double delta = 8.0);

}  // namespace rvasym
