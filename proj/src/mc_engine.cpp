#include "rvasym/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rvasym/errors.hpp"
#include "rvasym/rng.hpp"

namespace rvasym {

namespace {

constexpr std::uint32_t kStreamW = 0;
constexpr std::uint32_t kStreamWbar = 1;
constexpr std::uint32_t kStreamModelW = 2;
constexpr std::uint32_t kStreamModelWbar = 3;

void check_options(const McOptions& o) {
  if (o.n_steps == 0) throw std::invalid_argument("pricing grid needs at least one step");
  if (o.n_paths < 2) throw std::invalid_argument("need at least two Monte Carlo paths");
  if (o.refine == 0) throw std::invalid_argument("refinement factor must be positive");
}

// Evaluates f(path, scratch) for every path. Results land in path order, so every
// reduction done afterwards is independent of the thread count.
template <class Result, class Scratch, class F>
std::vector<Result> map_paths(std::size_t n_paths, Exec exec, F&& f) {
  std::vector<Result> out(n_paths);
  if (exec == Exec::serial) {
    Scratch s;
    for (std::size_t i = 0; i < n_paths; ++i) out[i] = f(i, s);
    return out;
  }
#pragma omp parallel
  {
    Scratch s;
#pragma omp for schedule(static, 256)
    for (long i = 0; i < static_cast<long>(n_paths); ++i)
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i), s);
  }
  return out;
}

PriceEstimate linear_mean(const std::vector<double>& v, std::uint64_t seed) {
  PriceEstimate e;
  e.n_paths = v.size();
  e.seed = seed;
  const double n = static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  e.price = mean;
  e.se = std::sqrt(ss / (n - 1.0) / n);
  e.log_price = mean > 0.0 ? std::log(mean) : -std::numeric_limits<double>::infinity();
  e.log_se = mean > 0.0 ? e.se / mean : std::numeric_limits<double>::infinity();
  return e;
}

// Mean of exp(ell_i) computed around max ell, with the delta-method s.e. of its log.
PriceEstimate log_mean(const std::vector<double>& ell, std::uint64_t seed) {
  PriceEstimate e;
  e.n_paths = ell.size();
  e.seed = seed;
  const double n = static_cast<double>(ell.size());
  const double top = *std::max_element(ell.begin(), ell.end());
  if (!std::isfinite(top)) {
    e.log_price = -std::numeric_limits<double>::infinity();
    e.log_se = std::numeric_limits<double>::infinity();
    e.ess_fraction = 0.0;
    e.weight_degenerate = true;
    return e;
  }
  double s = 0.0, s2 = 0.0;
  for (double l : ell) {
    const double y = std::exp(l - top);
    s += y;
    s2 += y * y;
  }
  const double mean = s / n;
  const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
  e.log_price = top + std::log(mean);
  e.log_se = std::sqrt(var / n) / mean;
  e.price = std::exp(e.log_price);
  e.se = e.price * e.log_se;
  e.ess_fraction = s * s / (n * s2);
  e.weight_degenerate = e.ess_fraction < 0.01;
  return e;
}

struct PathScratch {
  PathIncrements inc;
  std::vector<double> what;
  std::vector<double> dw2, dwbar2;
};

// Left-point log-price of one path given its (possibly shifted) noise.
double log_return(const VolModelSpec& spec, double eps, const double* dw, const double* dwbar,
                  const double* what, std::size_t n) {
  const double eps_hat = std::pow(eps, 2.0 * spec.H);
  const double rho = spec.rho, rhobar = spec.rho_bar();
  const double dt = 1.0 / static_cast<double>(n);
  double stoch = 0.0, quad = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = spec.sigma(eps_hat * what[k]);
    stoch += s * (rho * dw[k] + rhobar * dwbar[k]);
    quad += s * s;
  }
  return eps * stoch - 0.5 * eps * eps * quad * dt;
}

// log (e^X - e^k)^+ without overflow or cancellation.
double log_call_payoff(double X, double k) {
  if (!(X > k)) return -std::numeric_limits<double>::infinity();
  return k + std::log(std::expm1(X - k));
}

struct ShiftOnGrid {
  std::vector<double> dh, dhbar;  // increments hdot dt
  std::vector<double> hhat;
  double energy = 0.0;
};

ShiftOnGrid shift_on_pricing_grid(const RateSolution& sol, std::size_t n_steps) {
  const std::size_t ns = sol.h.size();
  if (ns == 0 || n_steps % ns != 0)
    throw GridMismatch("pricing grid must be a multiple of the solver grid");
  const auto fine = refine(sol.h, n_steps / ns);
  ShiftOnGrid s;
  const double dt = 1.0 / static_cast<double>(n_steps);
  s.dh.resize(n_steps);
  s.dhbar.resize(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    s.dh[k] = fine.hdot[k] * dt;
    s.dhbar[k] = fine.hbardot[k] * dt;
  }
  s.hhat = FractionalKernel(sol.spec.H, n_steps).integrate_cm(fine.hdot);
  s.energy = 0.5 * cm_norm_sq(fine);
  return s;
}

// Shared body of the importance samplers: log weight plus log payoff per path.
template <class Payoff>
PriceEstimate importance_sample(double eps, const RateSolution& sol,
                                const ScalingRegime& regime, const McOptions& opts,
                                Payoff&& payoff) {
  check_options(opts);
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const VolModelSpec& spec = sol.spec;
  regime.validate(spec.H);
  const double eb = regime.eps_bar(eps, spec.H);
  const double k = regime.log_strike(sol.x, eps, spec.H);
  const std::size_t n = opts.n_steps;
  const FractionalKernel kernel(spec.H, n);
  const ShiftOnGrid shift = shift_on_pricing_grid(sol, n);
  const double log_norm = -shift.energy / (eb * eb);

  auto body = [&](std::size_t path, PathScratch& s) {
    draw_increments(opts.seed, path, n, s.inc);
    s.what.resize(n + 1);
    s.dw2.resize(n);
    s.dwbar2.resize(n);
    kernel.integrate_bm(s.inc.dw, s.what);
    double lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lin += shift.dh[i] * s.inc.dw[i] + shift.dhbar[i] * s.inc.dwbar[i];
      s.dw2[i] = s.inc.dw[i] + shift.dh[i] / eb;
      s.dwbar2[i] = s.inc.dwbar[i] + shift.dhbar[i] / eb;
    }
    // sum hdot_i dW_i = lin / dt
    const double log_w = -lin * static_cast<double>(n) / eb + log_norm;
    for (std::size_t j = 0; j <= n; ++j) s.what[j] += shift.hhat[j] / eb;
    const double X = log_return(spec, eps, s.dw2.data(), s.dwbar2.data(), s.what.data(), n);
    return log_w + payoff(X, k);
  };
  auto ell = map_paths<double, PathScratch>(opts.n_paths, opts.exec, body);
  return log_mean(ell, opts.seed);
}

}  // namespace

void draw_increments(std::uint64_t seed, std::uint64_t path, std::size_t n, PathIncrements& out) {
  out.dw.resize(n);
  out.dwbar.resize(n);
  PathNormals(seed, path, kStreamW).fill(out.dw);
  PathNormals(seed, path, kStreamWbar).fill(out.dwbar);
  const double sq = std::sqrt(1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out.dw[i] *= sq;
    out.dwbar[i] *= sq;
  }
}

std::vector<PathIncrements> simulate_noise(std::size_t n_paths, std::size_t n_steps,
                                           std::uint64_t seed) {
  std::vector<PathIncrements> out(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) draw_increments(seed, i, n_steps, out[i]);
  return out;
}

ModelSampler::ModelSampler(double H, std::size_t n, std::size_t refine, std::uint64_t seed)
    : params_(choose_levels(H)), n_(n), refine_(refine), seed_(seed), fine_(H, n * refine) {}

ItoModel ModelSampler::sample(std::uint64_t path) const {
  const std::size_t N = n_ * refine_;
  std::vector<double> dw(N), dwbar(N);
  PathNormals(seed_, path, kStreamModelW).fill(dw);
  PathNormals(seed_, path, kStreamModelWbar).fill(dwbar);
  const double sq = std::sqrt(1.0 / static_cast<double>(N));
  for (std::size_t i = 0; i < N; ++i) {
    dw[i] *= sq;
    dwbar[i] *= sq;
  }
  return lift_ito(dw, dwbar, params_, refine_, fine_);
}

PriceEstimate price_call_plain(double eps, double x, const VolModelSpec& spec,
                               const ScalingRegime& regime, const McOptions& opts) {
  check_options(opts);
  spec.validate();
  regime.validate(spec.H);
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double k = regime.log_strike(x, eps, spec.H);
  const std::size_t n = opts.n_steps;
  const FractionalKernel kernel(spec.H, n);
  auto body = [&](std::size_t path, PathScratch& s) {
    draw_increments(opts.seed, path, n, s.inc);
    s.what.resize(n + 1);
    kernel.integrate_bm(s.inc.dw, s.what);
    const double X = log_return(spec, eps, s.inc.dw.data(), s.inc.dwbar.data(), s.what.data(), n);
    return X > k ? std::exp(k) * std::expm1(X - k) : 0.0;
  };
  auto v = map_paths<double, PathScratch>(opts.n_paths, opts.exec, body);
  return linear_mean(v, opts.seed);
}

PriceEstimate price_call_is(double eps, const RateSolution& sol, const ScalingRegime& regime,
                            const McOptions& opts) {
  return importance_sample(eps, sol, regime, opts, log_call_payoff);
}

PriceEstimate digital_is(double eps, const RateSolution& sol, const ScalingRegime& regime,
                         const McOptions& opts) {
  return importance_sample(eps, sol, regime, opts, [](double X, double k) {
    return X > k ? 0.0 : -std::numeric_limits<double>::infinity();
  });
}

std::vector<DigitalRow> ldp_digital_bound(const RateSolution& sol, const ScalingRegime& regime,
                                          const std::vector<double>& eps_list,
                                          const McOptions& opts) {
  std::vector<DigitalRow> rows;
  for (double eps : eps_list) {
    const auto p = digital_is(eps, sol, regime, opts);
    const double eb = regime.eps_bar(eps, sol.spec.H);
    rows.push_back({eps, eb, -eb * eb * p.log_price, eb * eb * p.log_se, sol.rate});
  }
  return rows;
}

TaylorTerms sample_g1_g2(const VolModelSpec& spec, const RateSolution& sol,
                         const ItoModel& model) {
  if (sol.h.size() != model.n) throw GridMismatch("model coarse grid differs from solver grid");
  return taylor_terms(sol.h, model, spec);
}

ShiftDecomposer::ShiftDecomposer(const VolModelSpec& spec, const RateSolution& sol,
                                 std::size_t refine)
    : spec_(spec), n_(sol.h.size()), refine_(refine) {
  hx_ = lift_shift(sol.h, spec.H, n_, refine_);
  const auto d = dphi1(sol.h, spec);
  const double dd = cm_norm_sq(d);
  if (!(dd > 0.0)) throw DegenerateSpec("DPhi1 vanishes at the minimizer");
  v_ = CameronMartinPair(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    v_.hdot[i] = d.hdot[i] / dd;
    v_.hbardot[i] = d.hbardot[i] / dd;
  }
  v_shift_ = lift_shift(v_, spec.H, n_, refine_);
  const ItoModel lifted_v = translate(zero_model(choose_levels(spec.H), n_, refine_), v_shift_);
  delta0_ = quadratic(lifted_v);
}

double ShiftDecomposer::quadratic(const ItoModel& m) const {
  const auto t = taylor_terms(hx_, m, spec_);
  return t.g2 - t.k2;
}

ShiftDecomposition ShiftDecomposer::decompose(const ItoModel& model, ItoModel* v_model) const {
  ShiftDecomposition out;
  const auto t = taylor_terms(hx_, model, spec_);
  out.g1 = t.g1;
  out.g2 = t.g2;
  // V = W - g1 v, lifted by translation; equal to lift_ito of the shifted increments.
  ItoModel V = translate(model, v_shift_, -out.g1);
  const double qV = quadratic(V);
  out.delta2 = qV + t.k2;
  out.delta0 = delta0_;
  out.delta1 = quadratic(translate(V, v_shift_, 1.0)) - qV - delta0_;
  out.residual = out.g2 - (out.delta2 + out.g1 * out.delta1 + out.g1 * out.g1 * out.delta0);
  out.delta1_recovered = std::abs(out.g1) > 1e-8
                             ? (out.g2 - out.delta2 - out.g1 * out.g1 * out.delta0) / out.g1
                             : std::numeric_limits<double>::quiet_NaN();
  if (v_model) *v_model = std::move(V);
  return out;
}

ShiftDecomposition decompose_shift(const VolModelSpec& spec, const RateSolution& sol,
                                   const ItoModel& model) {
  if (sol.h.size() != model.n) throw GridMismatch("model coarse grid differs from solver grid");
  return ShiftDecomposer(spec, sol, model.refine).decompose(model);
}

AEstimate estimate_A(const RateSolution& sol, const McOptions& opts) {
  check_options(opts);
  if (!(sol.margin > 0.0))
    throw DegenerateSpec("second-order margin is not positive; A(x) is undefined");
  const VolModelSpec& spec = sol.spec;
  const std::size_t n = sol.h.size();
  const ShiftDecomposer dec(spec, sol, opts.refine);
  const ModelSampler sampler(spec.H, n, opts.refine, opts.seed);
  const double log_pre = spec.H == 0.5 ? sol.x : 0.0;

  struct NoScratch {};
  auto body = [&](std::size_t path, NoScratch&) {
    const auto d = dec.decompose(sampler.sample(path));
    return std::exp(log_pre + sol.q * d.delta2);
  };
  auto a = map_paths<double, NoScratch>(opts.n_paths, opts.exec, body);
  const auto e = linear_mean(a, opts.seed);

  AEstimate out;
  out.A = e.price;
  out.se = e.se;
  out.n_paths = a.size();
  std::sort(a.begin(), a.end(), std::greater<>());
  const std::size_t top = std::max<std::size_t>(1, a.size() / 100);
  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  out.top1_mass = std::accumulate(a.begin(), a.begin() + static_cast<long>(top), 0.0) / total;
  out.heavy_tail = out.top1_mass > 0.25;
  return out;
}

G1Statistics g1_statistics(const RateSolution& sol, const McOptions& opts) {
  check_options(opts);
  const std::size_t n = sol.h.size();
  const auto hx = lift_shift(sol.h, sol.spec.H, n, opts.refine);
  const ModelSampler sampler(sol.spec.H, n, opts.refine, opts.seed);
  struct NoScratch {};
  auto g = map_paths<double, NoScratch>(opts.n_paths, opts.exec, [&](std::size_t p, NoScratch&) {
    return taylor_terms(hx, sampler.sample(p), sol.spec).g1;
  });
  G1Statistics st;
  st.n_paths = g.size();
  const double m = static_cast<double>(g.size());
  double s = 0.0;
  for (double v : g) s += v;
  st.mean = s / m;
  double m2 = 0.0, m4 = 0.0;
  for (double v : g) {
    const double d = (v - st.mean) * (v - st.mean);
    m2 += d;
    m4 += d * d;
  }
  st.variance = m2 / (m - 1.0);
  const double mu4 = m4 / m, mu2 = m2 / m;
  st.variance_se = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / m);
  return st;
}

DecompositionStats decomposition_statistics(const RateSolution& sol, const McOptions& opts) {
  check_options(opts);
  const ShiftDecomposer dec(sol.spec, sol, opts.refine);
  const ModelSampler sampler(sol.spec.H, sol.h.size(), opts.refine, opts.seed);
  struct NoScratch {};
  auto d = map_paths<ShiftDecomposition, NoScratch>(
      opts.n_paths, opts.exec,
      [&](std::size_t p, NoScratch&) { return dec.decompose(sampler.sample(p)); });
  DecompositionStats st;
  st.n_paths = d.size();
  const double m = static_cast<double>(d.size());
  double sa = 0, sb = 0;
  for (const auto& r : d) {
    st.max_residual = std::max(st.max_residual, std::abs(r.residual));
    sa += r.g1;
    sb += r.delta2;
  }
  const double ma = sa / m, mb = sb / m;
  double cab = 0, caa = 0, cbb = 0;
  for (const auto& r : d) {
    cab += (r.g1 - ma) * (r.delta2 - mb);
    caa += (r.g1 - ma) * (r.g1 - ma);
    cbb += (r.delta2 - mb) * (r.delta2 - mb);
  }
  st.corr_g1_delta2 = caa > 0 && cbb > 0 ? cab / std::sqrt(caa * cbb) : 0.0;
  return st;
}

PriceEstimate estimate_j_taylor(double eps, const RateSolution& sol, const McOptions& opts) {
  check_options(opts);
  const VolModelSpec& spec = sol.spec;
  const double eb = std::pow(eps, 2.0 * spec.H);
  const auto hx = lift_shift(sol.h, spec.H, sol.h.size(), opts.refine);
  const ModelSampler sampler(spec.H, sol.h.size(), opts.refine, opts.seed);
  struct NoScratch {};
  auto ell = map_paths<double, NoScratch>(opts.n_paths, opts.exec, [&](std::size_t p, NoScratch&) {
    const auto t = taylor_terms(hx, sampler.sample(p), spec);
    const double y = eps * t.g1 + eb * eps * t.g2;
    if (!(y > 0.0)) return -std::numeric_limits<double>::infinity();
    return -sol.q * t.g1 / eb + std::log(std::expm1(y));
  });
  return log_mean(ell, opts.seed);
}

}  // namespace rvasym
