#include "rvasym/taylor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rvasym/errors.hpp"

namespace rvasym {

namespace {

void check_model_spec(const ItoModel& model, const VolModelSpec& spec) {
  spec.validate();
  if (model.params.H != spec.H) throw std::invalid_argument("model and spec disagree on H");
}

}  // namespace

double phi0(const ItoModel& model, const VolModelSpec& spec) {
  check_model_spec(model, spec);
  const double rho = spec.rho, rhobar = spec.rho_bar();
  const int M = model.params.M;
  double total = 0.0;
  for (std::size_t a = 0; a < model.n; ++a) {
    const double base = model.what_node(a);
    double fact = 1.0, cell = 0.0;
    for (int m = 0; m <= M; ++m) {
      if (m > 0) fact *= m;
      cell += spec.sigma.derivative(m, base) / fact *
              (rho * model.cell(m, a) + rhobar * model.cell_bar(m, a));
    }
    total += cell;
  }
  return total;
}

double drift_term(double eps, const ItoModel& model, const VolModelSpec& spec) {
  const std::size_t N = model.fine_size();
  double s = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double v = spec.sigma(model.what[k]);
    s += v * v;
  }
  return -0.5 * eps * std::pow(eps, 2.0 * spec.H) * s / static_cast<double>(N);
}

double phi_eps(double eps, const ItoModel& model, const VolModelSpec& spec) {
  return phi0(model, spec) + drift_term(eps, model, spec);
}

TaylorTerms taylor_terms(const LiftedShift& h, const ItoModel& model, const VolModelSpec& spec) {
  check_model_spec(model, spec);
  if (h.n != model.n || h.refine != model.refine)
    throw GridMismatch("shift and model live on different grids");
  const double rho = spec.rho, rhobar = spec.rho_bar();
  const int M = model.params.M;
  const std::size_t r = model.refine, N = model.fine_size();
  const double dtau = 1.0 / static_cast<double>(N);
  const auto Ms = static_cast<std::size_t>(M);

  // Per cell, with u = What_k - What_s, v = hhat_k - hhat_s:
  //   Y0[l] = sum v^l dh~, X0[l] = sum v^l dW~, Y1[l] = sum u v^l dh~,
  //   X1[l] = sum u v^l dW~, Y2[l] = sum u^2 v^l dh~.
  // Level m of the shifted, dilated model is L0 + e L1 + e^2 L2 + O(e^3) with
  //   L0 = Y0[m], L1 = X0[m] + m Y1[m-1], L2 = m X1[m-1] + C(m,2) Y2[m-2],
  // where X0[0] and X1[0] are the stored level-0 and level-1 model integrals.
  std::vector<double> Y0(Ms + 1), X0(Ms + 1), Y1(Ms + 1), X1(Ms + 1), Y2(Ms + 1);
  std::vector<double> s(Ms + 3);
  TaylorTerms out;
  for (std::size_t a = 0; a < model.n; ++a) {
    std::fill(Y0.begin(), Y0.end(), 0.0);
    std::fill(X0.begin(), X0.end(), 0.0);
    std::fill(Y1.begin(), Y1.end(), 0.0);
    std::fill(X1.begin(), X1.end(), 0.0);
    std::fill(Y2.begin(), Y2.end(), 0.0);
    const std::size_t k0 = a * r;
    for (std::size_t k = k0; k < k0 + r; ++k) {
      const double u = model.what[k] - model.what[k0];
      const double v = h.hhat[k] - h.hhat[k0];
      const double dx = rho * model.dw[k] + rhobar * model.dwbar[k];
      const double dh = (rho * h.hdot[k] + rhobar * h.hbardot[k]) * dtau;
      double pv = 1.0;
      for (std::size_t l = 0; l <= Ms; ++l) {
        Y0[l] += pv * dh;
        X0[l] += pv * dx;
        Y1[l] += u * pv * dh;
        X1[l] += u * pv * dx;
        Y2[l] += u * u * pv * dh;
        pv *= v;
      }
    }
    X0[0] = rho * model.cell(0, a) + rhobar * model.cell_bar(0, a);
    X1[0] = rho * model.cell(1, a) + rhobar * model.cell_bar(1, a);

    const double z = h.hhat[k0];
    const double wa = model.what[k0];
    for (std::size_t m = 0; m < s.size(); ++m) s[m] = spec.sigma.derivative(static_cast<int>(m), z);

    double fact = 1.0;
    for (std::size_t m = 0; m <= Ms; ++m) {
      if (m > 0) fact *= static_cast<double>(m);
      const double dm = static_cast<double>(m);
      const double L0 = Y0[m];
      const double L1 = X0[m] + (m >= 1 ? dm * Y1[m - 1] : 0.0);
      const double L2 = (m >= 1 ? dm * X1[m - 1] : 0.0) +
                        (m >= 2 ? 0.5 * dm * (dm - 1.0) * Y2[m - 2] : 0.0);
      out.g0 += s[m] * L0 / fact;
      out.g1 += (s[m] * L1 + wa * s[m + 1] * L0) / fact;
      out.g2 += (s[m] * L2 + wa * s[m + 1] * L1 + 0.5 * wa * wa * s[m + 2] * L0) / fact;
    }
  }

  if (spec.H == 0.5) {
    double sq = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const double v = spec.sigma(h.hhat[k]);
      sq += v * v;
    }
    out.k2 = -0.5 * sq * dtau;
    out.g2 += out.k2;
  }
  return out;
}

TaylorTerms taylor_terms(const CameronMartinPair& h, const ItoModel& model,
                         const VolModelSpec& spec) {
  return taylor_terms(lift_shift(h, spec.H, model.n, model.refine), model, spec);
}

double taylor_remainder(double eps_bar, const LiftedShift& h, const ItoModel& model,
                        const VolModelSpec& spec, const TaylorTerms& t, bool drift_corrected) {
  const double eps = std::pow(eps_bar, 1.0 / (2.0 * spec.H));
  const ItoModel shifted = translate(dilate(model, eps_bar), h);
  double value = phi0(shifted, spec);
  double expansion = t.g0 + eps_bar * t.g1 + eps_bar * eps_bar * t.g2;
  if (drift_corrected)
    expansion -= eps_bar * eps_bar * t.k2;
  else
    value += drift_term(eps, shifted, spec);
  return value - expansion;
}

RemainderSlope remainder_scaling_check(const ItoModel& model, const CameronMartinPair& h,
                                       const VolModelSpec& spec, double delta) {
  const double hn = homogeneous_norm(model);
  if (hn * 0.125 > delta)
    throw std::invalid_argument("model too large for the expansion: epsbar * norm > delta");
  const auto shift = lift_shift(h, spec.H, model.n, model.refine);
  RemainderSlope out;
  out.terms = taylor_terms(shift, model, spec);
  const bool corrected = spec.H < 0.5;
  bool all_tiny = true;
  for (int e = 3; e <= 8; ++e) {
    const double eb = std::ldexp(1.0, -e);
    const double rem = taylor_remainder(eb, shift, model, spec, out.terms, corrected);
    out.eps_bar.push_back(eb);
    out.remainder.push_back(rem);
    if (std::abs(rem) >= 1e-14) all_tiny = false;
  }
  if (all_tiny) {
    out.vanishing = true;
    out.slope = std::numeric_limits<double>::infinity();
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(out.eps_bar.size());
  for (std::size_t i = 0; i < out.eps_bar.size(); ++i) {
    const double lx = std::log(out.eps_bar[i]);
    const double ly = std::log(std::max(std::abs(out.remainder[i]), 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return out;
}

}  // namespace rvasym
