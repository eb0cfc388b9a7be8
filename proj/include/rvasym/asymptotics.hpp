#pragma once

#include <functional>
#include <string>

#include "rvasym/rate_solver.hpp"
#include "rvasym/vol_spec.hpp"

namespace rvasym {

// Labels used in CSV output for the closed-form prices below.
enum class FormulaId { bs_exact, ldp_main, mdp, bs_abs };
std::string formula_name(FormulaId id);

// Phibar(u) / phi(u) for u >= 0: erfc for moderate u, continued fraction in the tail.
double mills_ratio(double u);

// log E[(exp(mu t + sigma sqrt(t) N) - e^k)^+]. Deep out of the money it is evaluated as
// k + log phi(d2) + log(R(-d1) - R(-d2)) with R the Mills ratio, so it stays finite
// long after the price underflows.
double bs_exact_call(double sigma, double mu, double t, double k);

// log of exp(-k^2/(2 eps^2 sigma^2)) eps^3 sigma^3 e^k / (k^2 sqrt(2 pi)) e^(k mu/sigma^2).
double bs_asymptotic_call(double sigma, double mu, double eps, double k);

// Bounds on M = int exp(-v^2 eps^2/2) e^-v (v + gamma|v| + alpha)^+ dv:
//   upper = max[(1-g) e^(a/(1-g)) + 2g, (1+g) e^(a/(1+g))]
//   lower = min[same] - eps^2 (C (1+a^2) max(e^(a/(1-g)), e^(a/(1+g))) + 6g)
// The middle value comes from adaptive quadrature.
struct BsAbsBounds {
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
  double quadrature_error = 0.0;
};
BsAbsBounds bsabs_sandwich(double alpha, double gamma, double eps);

// Constant in the lower bound: 6 for gamma <= 1/2, max(8, 1/(2(1-gamma))) above.
double bsabs_constant(double gamma);

// log of exp(-Lambda/epsbar^2) eps epsbar^2 A / (Lambda'^2 sigma_x sqrt(2 pi)).
double precise_ldp_price(const RateSolution& sol, double A, const ScalingRegime& regime,
                         double eps);

struct MdpPrice {
  double log_price = 0.0;
  bool regime_ok = true;  // x_eps / epsbar > 10
  double ratio = 0.0;     // x_eps / epsbar
};

// log of exp(-Lambda(x_eps)/epsbar^2) eps epsbar^2 sigma0^3 / (x_eps^2 sqrt(2 pi)), with
// epsbar = eps^(2H) the large-deviation speed and x_eps -> 0 the rescaled strike
// (x_eps = x eps^(2 beta) for the moderate regime). The log-strike is x_eps eps^(1-2H).
MdpPrice precise_mdp_price(double x_eps, double sigma0,
                           const std::function<double(double)>& rate, double H, double eps);

}  // namespace rvasym
