#include "rvasym/vol_spec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rvasym/errors.hpp"
#include "rvasym/fbm_kernel.hpp"

namespace rvasym {

double SigmaFunction::derivative(int order, double v) const {
  if (order < 0) throw std::invalid_argument("negative derivative order");
  switch (kind) {
    case SigmaKind::constant:
      return order == 0 ? sigma0 : 0.0;
    case SigmaKind::linear:
      if (order == 0) return sigma0 * (1.0 + eta * v);
      return order == 1 ? sigma0 * eta : 0.0;
    case SigmaKind::exp_ou:
      return sigma0 * std::pow(eta, order) * std::exp(eta * v);
  }
  return 0.0;
}

SigmaKind parse_sigma_kind(std::string_view name) {
  if (name == "constant") return SigmaKind::constant;
  if (name == "linear") return SigmaKind::linear;
  if (name == "exp-ou" || name == "exp_ou" || name == "bergomi") return SigmaKind::exp_ou;
  throw std::invalid_argument("unknown sigma kind: " + std::string(name));
}

std::string to_string(SigmaKind kind) {
  switch (kind) {
    case SigmaKind::constant: return "constant";
    case SigmaKind::linear: return "linear";
    case SigmaKind::exp_ou: return "exp-ou";
  }
  return "?";
}

double VolModelSpec::rho_bar() const { return std::sqrt(std::max(0.0, 1.0 - rho * rho)); }

void VolModelSpec::validate() const {
  if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("correlation must lie in [-1, 1]");
  validate_hurst(H);
  if (!std::isfinite(sigma.sigma0) || !std::isfinite(sigma.eta))
    throw std::invalid_argument("sigma parameters must be finite");
  if (!(sigma(0.0) > 0.0)) throw DegenerateSpec("sigma(0) must be positive");
}

double ScalingRegime::eps_bar(double eps, double H) const {
  if (kind == RegimeKind::ldp) return std::pow(eps, 2.0 * H);
  return std::pow(eps, 2.0 * H - 2.0 * beta);
}

double ScalingRegime::log_strike(double x, double eps, double H) const {
  return x * eps / eps_bar(eps, H);
}

void ScalingRegime::validate(double H) const {
  if (kind == RegimeKind::mdp && !(beta > 0.0 && beta < H))
    throw std::invalid_argument("moderate-deviation beta must lie in (0, H)");
}

}  // namespace rvasym
