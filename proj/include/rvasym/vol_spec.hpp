#pragma once

#include <string>
#include <string_view>

namespace rvasym {

enum class SigmaKind { constant, linear, exp_ou };

// Built-in volatility functions of the fractional driver v:
//   constant  sigma(v) = sigma0
//   linear    sigma(v) = sigma0 (1 + eta v)
//   exp-ou    sigma(v) = sigma0 exp(eta v)   (rough Bergomi)
struct SigmaFunction {
  SigmaKind kind = SigmaKind::constant;
  double sigma0 = 0.2;
  double eta = 1.0;

  double operator()(double v) const { return derivative(0, v); }
  double derivative(int order, double v) const;
  bool is_constant() const { return kind == SigmaKind::constant || eta == 0.0; }
};

SigmaKind parse_sigma_kind(std::string_view name);
std::string to_string(SigmaKind kind);

struct VolModelSpec {
  SigmaFunction sigma;
  double rho = 0.0;
  double H = 0.5;

  double rho_bar() const;
  // Throws std::invalid_argument for |rho| > 1 or H outside (0, 1/2], and
  // DegenerateSpec when sigma(0) <= 0.
  void validate() const;
};

enum class RegimeKind { ldp, mdp };

// LDP: epsbar = eps^{2H}. MDP: epsbar = eps^{2H - 2 beta} with 0 < beta < H.
// The log-strike is k_eps = x eps / epsbar in both cases.
struct ScalingRegime {
  RegimeKind kind = RegimeKind::ldp;
  double beta = 0.0;

  double eps_bar(double eps, double H) const;
  double log_strike(double x, double eps, double H) const;
  void validate(double H) const;
};

}  // namespace rvasym
