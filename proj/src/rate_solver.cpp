#include "rvasym/rate_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

#include "rvasym/errors.hpp"

namespace rvasym {

RateProblem::RateProblem(const VolModelSpec& spec, std::size_t n)
    : spec_(spec), n_(n), kernel_(spec.H, n) {
  spec_.validate();
}

double RateProblem::phi1(const CameronMartinPair& h) const {
  if (h.size() != n_) throw GridMismatch("path does not match the solver grid");
  const auto z = kernel_.integrate_mid(h.hdot);
  const double rho = spec_.rho, rhobar = spec_.rho_bar();
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    s += spec_.sigma(z[i]) * (rho * h.hdot[i] + rhobar * h.hbardot[i]);
  return s / static_cast<double>(n_);
}

double RateProblem::phi1_and_gradient(const CameronMartinPair& h,
                                      CameronMartinPair& grad) const {
  if (h.size() != n_) throw GridMismatch("path does not match the solver grid");
  const auto z = kernel_.integrate_mid(h.hdot);
  const double rho = spec_.rho, rhobar = spec_.rho_bar();
  std::vector<double> weighted(n_);
  std::vector<double> sig(n_);
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double y = rho * h.hdot[i] + rhobar * h.hbardot[i];
    sig[i] = spec_.sigma(z[i]);
    weighted[i] = spec_.sigma.derivative(1, z[i]) * y;
    s += sig[i] * y;
  }
  // a_j = rho sigma(z_j) + sum_{i >= j} sigma'(z_i) m_{i-j} y_i,  b_j = rhobar sigma(z_j)
  const auto back = kernel_.integrate_mid_adjoint(weighted);
  grad.hdot.resize(n_);
  grad.hbardot.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    grad.hdot[j] = rho * sig[j] + back[j];
    grad.hbardot[j] = rhobar * sig[j];
  }
  return s / static_cast<double>(n_);
}

CameronMartinPair RateProblem::dphi1(const CameronMartinPair& h) const {
  CameronMartinPair g;
  phi1_and_gradient(h, g);
  return g;
}

double phi1_cm(const CameronMartinPair& h, const VolModelSpec& spec) {
  return RateProblem(spec, h.size()).phi1(h);
}

CameronMartinPair dphi1(const CameronMartinPair& h, const VolModelSpec& spec) {
  return RateProblem(spec, h.size()).dphi1(h);
}

namespace {

using Vec = std::vector<double>;

// Flat layout [hdot, hbardot]; the H inner product is dt times the Euclidean one.
Vec flatten(const CameronMartinPair& h) {
  Vec v(h.hdot);
  v.insert(v.end(), h.hbardot.begin(), h.hbardot.end());
  return v;
}

CameronMartinPair unflatten(const Vec& v) {
  const std::size_t n = v.size() / 2;
  return CameronMartinPair(Vec(v.begin(), v.begin() + static_cast<long>(n)),
                           Vec(v.begin() + static_cast<long>(n), v.end()));
}

double dot(const Vec& a, const Vec& b, double dt) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * dt;
}

struct AugmentedLagrangian {
  const RateProblem& problem;
  double x, lambda, mu;

  // Value and Riesz gradient of |h|^2/2 - lambda c + mu c^2 / 2, c = Phi1(h) - x.
  double eval(const Vec& v, Vec& grad, double& c) const {
    const auto h = unflatten(v);
    CameronMartinPair d;
    c = problem.phi1_and_gradient(h, d) - x;
    const double dt = 1.0 / static_cast<double>(problem.size());
    const double coef = lambda - mu * c;
    const auto dv = flatten(d);
    grad.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) grad[i] = v[i] - coef * dv[i];
    return 0.5 * dot(v, v, dt) - lambda * c + 0.5 * mu * c * c;
  }
};

// L-BFGS until the H-norm of the gradient is below tol. Returns false on stall.
bool lbfgs(const AugmentedLagrangian& f, Vec& v, double tol, int max_iter, int memory,
           int& iterations) {
  const double dt = 1.0 / static_cast<double>(f.problem.size());
  Vec g, g_new, v_new, p(v.size());
  double c = 0.0;
  double fx = f.eval(v, g, c);
  std::deque<Vec> S, Y;
  std::deque<double> R;
  int stalls = 0;

  for (int it = 0; it < max_iter; ++it) {
    ++iterations;
    const double gnorm = std::sqrt(dot(g, g, dt));
    if (gnorm <= tol) return true;

    // Two-loop recursion.
    p = g;
    std::vector<double> alpha(S.size());
    for (std::size_t k = S.size(); k-- > 0;) {
      alpha[k] = R[k] * dot(S[k], p, dt);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= alpha[k] * Y[k][i];
    }
    double gamma = 1.0;
    if (!S.empty()) gamma = dot(S.back(), Y.back(), dt) / dot(Y.back(), Y.back(), dt);
    for (auto& e : p) e *= gamma;
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = R[k] * dot(Y[k], p, dt);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += S[k][i] * (alpha[k] - beta);
    }
    for (auto& e : p) e = -e;

    double slope = dot(g, p, dt);
    if (slope >= 0.0) {  // not a descent direction: reset to steepest descent
      S.clear();
      Y.clear();
      R.clear();
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = -g[i];
      slope = -gnorm * gnorm;
    }

    // Backtracking Armijo. Near the optimum f is flat to rounding, so also accept a
    // step that reduces the gradient norm while f stays within rounding noise.
    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      v_new = v;
      for (std::size_t i = 0; i < v.size(); ++i) v_new[i] += step * p[i];
      f_new = f.eval(v_new, g_new, c);
      const double noise = 1e-14 * (std::abs(fx) + 1e-300);
      if (std::isfinite(f_new) &&
          (f_new <= fx + 1e-4 * step * slope ||
           (f_new <= fx + noise && dot(g_new, g_new, dt) < gnorm * gnorm))) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (++stalls > 2) return false;
      S.clear();
      Y.clear();
      R.clear();
      continue;
    }

    Vec s(v.size()), y(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      s[i] = v_new[i] - v[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y, dt);
    if (sy > 1e-300) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      R.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > memory) {
        S.pop_front();
        Y.pop_front();
        R.pop_front();
      }
    }
    v.swap(v_new);
    g.swap(g_new);
    fx = f_new;
  }
  return std::sqrt(dot(g, g, dt)) <= tol;
}

struct SingleSolve {
  CameronMartinPair h;
  double q = 0.0;
  double kkt = 0.0;
  double constraint = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Multiplier from stationarity by least squares, and the KKT residual.
void kkt_measures(const RateProblem& problem, const CameronMartinPair& h, double x,
                  SingleSolve& out) {
  CameronMartinPair d;
  const double phi = problem.phi1_and_gradient(h, d);
  const double dd = cm_norm_sq(d);
  out.q = dd > 0.0 ? cm_inner(h, d) / dd : 0.0;
  CameronMartinPair r(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    r.hdot[i] = h.hdot[i] - out.q * d.hdot[i];
    r.hbardot[i] = h.hbardot[i] - out.q * d.hbardot[i];
  }
  out.kkt = std::sqrt(cm_norm_sq(r));
  out.constraint = phi - x;
}

SingleSolve solve_from(const RateProblem& problem, double x, CameronMartinPair h0,
                       double lambda0, const SolverOptions& opts) {
  const double sigma0 = problem.spec().sigma(0.0);
  AugmentedLagrangian f{problem, x, lambda0, 10.0 / (sigma0 * sigma0)};
  Vec v = flatten(h0);
  SingleSolve out;
  const double ctol = opts.constraint_tol * std::max(1.0, x);

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    const double hnorm = std::sqrt(dot(v, v, 1.0 / static_cast<double>(problem.size())));
    const double inner_tol = std::max(0.1 * opts.kkt_tol * std::max(hnorm, 1e-12), 1e-15);
    lbfgs(f, v, inner_tol, opts.max_inner, opts.lbfgs_memory, out.iterations);

    out.h = unflatten(v);
    kkt_measures(problem, out.h, x, out);
    const double hn = std::sqrt(cm_norm_sq(out.h));
    if (out.kkt <= opts.kkt_tol * std::max(hn, 1e-300) && std::abs(out.constraint) <= ctol) {
      out.converged = true;
      return out;
    }
    f.lambda -= f.mu * out.constraint;
    // Tighten the penalty when the constraint lags behind stationarity.
    if (std::abs(out.constraint) > ctol && outer % 3 == 2) f.mu *= 4.0;
  }
  return out;
}

}  // namespace

RateSolution solve_rate(double x, const VolModelSpec& spec, std::size_t n,
                        const SolverOptions& opts) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("x must be finite and >= 0");
  if (n < 2) throw std::invalid_argument("solver grid needs at least two cells");
  const RateProblem problem(spec, n);
  const double sigma0 = spec.sigma(0.0);
  const double rho = spec.rho, rhobar = spec.rho_bar();

  RateSolution sol;
  sol.x = x;
  sol.spec = spec;
  sol.h = CameronMartinPair(n);
  if (x == 0.0) {
    sol.sigma_x = sigma0;
    return sol;
  }

  // Closed-form minimizer for constant sigma, used as the starting point.
  auto constant_guess = [&](double xx) {
    CameronMartinPair h(n);
    std::fill(h.hdot.begin(), h.hdot.end(), xx * rho / sigma0);
    std::fill(h.hbardot.begin(), h.hbardot.end(), xx * rhobar / sigma0);
    return h;
  };

  SingleSolve best;
  {
    const int steps = x / sigma0 > opts.continuation_threshold
                          ? static_cast<int>(std::ceil(x / (sigma0 * opts.continuation_threshold)))
                          : 1;
    CameronMartinPair h = constant_guess(x / steps);
    double lambda = x / steps / (sigma0 * sigma0);
    for (int k = 1; k <= steps; ++k) {
      const double xk = x * k / steps;
      best = solve_from(problem, xk, h, lambda, opts);
      if (!best.converged)
        throw NonConvergence("rate solver did not converge at x = " + std::to_string(xk));
      // Warm start the next stage by scaling the current minimizer.
      if (k < steps) {
        const double scale = static_cast<double>(k + 1) / k;
        h = best.h;
        for (auto& e : h.hdot) e *= scale;
        for (auto& e : h.hbardot) e *= scale;
        lambda = best.q;
      }
    }
    sol.iterations += best.iterations;
  }

  // Multi-start from perturbed seeds; keep the lowest energy and flag disagreement.
  std::mt19937_64 rng(opts.restart_seed);
  std::normal_distribution<double> gauss;
  const double base_energy = 0.5 * cm_norm_sq(best.h);
  for (int r = 0; r < opts.restarts; ++r) {
    CameronMartinPair h0 = best.h;
    const double amp = opts.restart_scale * x / sigma0;
    for (std::size_t i = 0; i < n; ++i) {
      h0.hdot[i] += amp * gauss(rng);
      h0.hbardot[i] += amp * gauss(rng);
    }
    SingleSolve alt = solve_from(problem, x, h0, best.q, opts);
    sol.iterations += alt.iterations;
    if (!alt.converged) {
      sol.warnings.push_back("restart " + std::to_string(r) + " did not converge");
      continue;
    }
    const double e = 0.5 * cm_norm_sq(alt.h);
    if (std::abs(e - base_energy) > 1e-7 * base_energy)
      sol.warnings.push_back("restart " + std::to_string(r) + " reached a different critical point");
    if (e < 0.5 * cm_norm_sq(best.h) * (1.0 - 1e-12)) best = alt;
  }

  sol.h = best.h;
  sol.rate = 0.5 * cm_norm_sq(sol.h);
  sol.q = best.q;
  sol.kkt_residual = best.kkt;
  sol.constraint_residual = best.constraint;
  if (!(sol.q > 0.0)) throw DegenerateSpec("non-positive multiplier at the minimizer");
  sol.sigma_x = std::sqrt(2.0 * sol.rate) / sol.q;
  if (opts.compute_margin) {
    check_nondegeneracy(sol, opts);
    if (!(sol.margin > 0.0))
      sol.warnings.push_back("second-order condition fails: margin <= 0");
  }
  return sol;
}

Eigen::MatrixXd phi1_hessian(const RateProblem& problem, const CameronMartinPair& h,
                             double step) {
  const std::size_t n = problem.size();
  Eigen::MatrixXd A(2 * n, 2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) {
    CameronMartinPair hp = h, hm = h;
    auto& cp = i < n ? hp.hdot : hp.hbardot;
    auto& cm = i < n ? hm.hdot : hm.hbardot;
    cp[i % n] += step;
    cm[i % n] -= step;
    const auto gp = problem.dphi1(hp), gm = problem.dphi1(hm);
    for (std::size_t j = 0; j < n; ++j) {
      A(static_cast<long>(j), static_cast<long>(i)) = (gp.hdot[j] - gm.hdot[j]) / (2 * step);
      A(static_cast<long>(n + j), static_cast<long>(i)) =
          (gp.hbardot[j] - gm.hbardot[j]) / (2 * step);
    }
  }
  // d(density_j)/d(hdot_i) is the Euclidean Hessian over dt, symmetric up to
  // differencing error.
  return 0.5 * (A + A.transpose());
}

double check_nondegeneracy(RateSolution& sol, const SolverOptions& opts) {
  const std::size_t n = sol.h.size();
  const RateProblem problem(sol.spec, n);
  const Eigen::MatrixXd A = phi1_hessian(problem, sol.h, opts.hessian_step);
  const long N = static_cast<long>(2 * n);

  Eigen::VectorXd u(N);
  for (std::size_t i = 0; i < n; ++i) {
    u(static_cast<long>(i)) = sol.h.hdot[i];
    u(static_cast<long>(n + i)) = sol.h.hbardot[i];
  }
  Eigen::MatrixXd B;
  if (u.norm() == 0.0) {
    B = A;
  } else {
    // Householder reflector mapping u to a multiple of e_0; its other columns span u-perp.
    Eigen::VectorXd v = u / u.norm();
    v(0) += v(0) >= 0 ? 1.0 : -1.0;
    v.normalize();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(N, N) - 2.0 * v * v.transpose();
    const Eigen::MatrixXd basis = Q.rightCols(N - 1);
    B = basis.transpose() * A * basis;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NonConvergence("eigenvalue iteration failed");
  const double lambda_max = eig.eigenvalues().maxCoeff();
  sol.margin = 1.0 - sol.q * lambda_max;
  return sol.margin;
}

LambdaPrimeCheck lambda_prime_check(double x, const VolModelSpec& spec, std::size_t n,
                                    double delta, const SolverOptions& opts) {
  if (!(delta > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  SolverOptions o = opts;
  o.compute_margin = false;
  o.restarts = 0;
  const auto mid = solve_rate(x, spec, n, o);
  double fd = 0.0;
  if (x - delta < 0.0) {
    fd = (solve_rate(x + delta, spec, n, o).rate - mid.rate) / delta;
  } else {
    fd = (solve_rate(x + delta, spec, n, o).rate - solve_rate(x - delta, spec, n, o).rate) /
         (2.0 * delta);
  }
  return {fd, mid.q, std::abs(fd - mid.q)};
}

double g1_variance_analytic(const RateSolution& sol) {
  return cm_norm_sq(RateProblem(sol.spec, sol.h.size()).dphi1(sol.h));
}

}  // namespace rvasym
