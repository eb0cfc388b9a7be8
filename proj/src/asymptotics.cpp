#include "rvasym/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rvasym/errors.hpp"

namespace rvasym {

namespace {

const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_normal_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

}  // namespace

std::string formula_name(FormulaId id) {
  switch (id) {
    case FormulaId::bs_exact: return "bs_exact";
    case FormulaId::ldp_main: return "ldp_main";
    case FormulaId::mdp: return "mdp";
    case FormulaId::bs_abs: return "bs_abs";
  }
  return "?";
}

double mills_ratio(double u) {
  if (u < 0.0) throw std::invalid_argument("Mills ratio evaluated for u >= 0 only");
  if (u < 20.0)
    return 0.5 * std::erfc(u / std::numbers::sqrt2) * std::exp(0.5 * u * u + kLogSqrt2Pi);
  // 1/(u + 1/(u + 2/(u + 3/(u + ...)))), evaluated bottom-up.
  double t = u;
  for (int k = 60; k >= 1; --k) t = u + k / t;
  return 1.0 / t;
}

double bs_exact_call(double sigma, double mu, double t, double k) {
  if (!(sigma > 0.0) || !(t > 0.0)) throw std::invalid_argument("sigma and t must be positive");
  const double s = sigma * std::sqrt(t);
  const double d2 = (mu * t - k) / s;
  const double d1 = d2 + s;
  if (d1 > -1.0) {
    const double a = mu * t + 0.5 * s * s;
    return std::log(std::exp(a) * normal_cdf(d1) - std::exp(k) * normal_cdf(d2));
  }
  // e^a phi(d1) = e^k phi(d2), so the price is e^k phi(d2) (R(-d1) - R(-d2)).
  return k + log_normal_pdf(d2) + std::log(mills_ratio(-d1) - mills_ratio(-d2));
}

double bs_asymptotic_call(double sigma, double mu, double eps, double k) {
  if (!(sigma > 0.0) || !(eps > 0.0) || !(k > 0.0))
    throw std::invalid_argument("sigma, eps and k must be positive");
  return -k * k / (2.0 * eps * eps * sigma * sigma) + 3.0 * std::log(eps) +
         3.0 * std::log(sigma) + k - 2.0 * std::log(k) - kLogSqrt2Pi + k * mu / (sigma * sigma);
}

double bsabs_constant(double gamma) {
  return gamma <= 0.5 ? 6.0 : std::max(8.0, 1.0 / (2.0 * (1.0 - gamma)));
}

BsAbsBounds bsabs_sandwich(double alpha, double gamma, double eps) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(eps > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("bad sandwich inputs");

  auto f = [=](double v) {
    const double lin = v + gamma * std::abs(v) + alpha;
    return lin > 0.0 ? std::exp(-0.5 * v * v * eps * eps - v) * lin : 0.0;
  };
  // Support starts where v + gamma|v| + alpha = 0; the integrand has a kink at 0.
  const double v0 = alpha >= 0.0 ? -alpha / (1.0 - gamma) : -alpha / (1.0 + gamma);
  BsAbsBounds b;
  double err = 0.0, total_err = 0.0;
  if (v0 < 0.0) {
    b.middle += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, v0, 0.0, 15,
                                                                              1e-13, &err);
    total_err += err;
  }
  const double lo = std::max(v0, 0.0);
  boost::math::quadrature::exp_sinh<double> tail;
  double l1 = 0.0;
  b.middle += tail.integrate([&](double w) { return f(lo + w); },
                             std::sqrt(std::numeric_limits<double>::epsilon()), &err, &l1);
  total_err += err;
  b.quadrature_error = total_err;
  if (!(total_err <= 1e-8 * std::max(1.0, std::abs(b.middle))))
    throw NumericalError("quadrature did not reach its tolerance");

  const double em = std::exp(alpha / (1.0 - gamma));
  const double ep = std::exp(alpha / (1.0 + gamma));
  const double a = (1.0 - gamma) * em + 2.0 * gamma;
  const double c = (1.0 + gamma) * ep;
  b.upper = std::max(a, c);
  b.lower = std::min(a, c) -
            eps * eps * (bsabs_constant(gamma) * (1.0 + alpha * alpha) * std::max(em, ep) +
                         6.0 * gamma);
  return b;
}

double precise_ldp_price(const RateSolution& sol, double A, const ScalingRegime& regime,
                         double eps) {
  if (regime.kind != RegimeKind::ldp) throw std::invalid_argument("large-deviation regime only");
  if (!(A > 0.0) || !(eps > 0.0)) throw std::invalid_argument("A and eps must be positive");
  if (!(sol.q > 0.0) || !(sol.sigma_x > 0.0))
    throw std::invalid_argument("solution has no positive multiplier");
  const double eb = regime.eps_bar(eps, sol.spec.H);
  return -sol.rate / (eb * eb) + std::log(eps) + 2.0 * std::log(eb) + std::log(A) -
         2.0 * std::log(sol.q) - std::log(sol.sigma_x) - kLogSqrt2Pi;
}

MdpPrice precise_mdp_price(double x_eps, double sigma0,
                           const std::function<double(double)>& rate, double H, double eps) {
  if (!(x_eps > 0.0) || !(sigma0 > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("x_eps, sigma0 and eps must be positive");
  const double eb = std::pow(eps, 2.0 * H);
  MdpPrice p;
  p.ratio = x_eps / eb;
  p.regime_ok = p.ratio > 10.0;
  p.log_price = -rate(x_eps) / (eb * eb) + std::log(eps) + 2.0 * std::log(eb) +
                3.0 * std::log(sigma0) - 2.0 * std::log(x_eps) - kLogSqrt2Pi;
  return p;
}

}  // namespace rvasym
