#include <doctest.h>

#include <cmath>

#include "rvasym/asymptotics.hpp"
#include "rvasym/errors.hpp"
#include "rvasym/mc_engine.hpp"
#include "rvasym/rate_solver.hpp"

using namespace rvasym;

namespace {

VolModelSpec bergomi() {
  VolModelSpec s;
  s.sigma = {SigmaKind::exp_ou, 0.2, 1.0};
  s.rho = -0.7;
  s.H = 0.3;
  return s;
}

VolModelSpec black_scholes() {
  VolModelSpec s;
  s.sigma = {SigmaKind::constant, 0.2, 0.0};
  s.rho = -0.7;
  s.H = 0.5;
  return s;
}

McOptions small(std::size_t paths, Exec e = Exec::parallel) {
  McOptions o;
  o.n_steps = 32;
  o.n_paths = paths;
  o.seed = 11;
  o.refine = 2;
  o.exec = e;
  return o;
}

}  // namespace

TEST_CASE("estimates do not depend on the execution mode") {
  const auto s = bergomi();
  const auto sol = solve_rate(0.1, s, 16);
  const ScalingRegime ldp;
  const auto a = price_call_plain(0.3, 0.1, s, ldp, small(3000, Exec::serial));
  const auto b = price_call_plain(0.3, 0.1, s, ldp, small(3000, Exec::parallel));
  CHECK(a.price == b.price);
  CHECK(a.se == b.se);
  const auto c = price_call_is(0.3, sol, ldp, small(3000, Exec::serial));
  const auto d = price_call_is(0.3, sol, ldp, small(3000, Exec::parallel));
  CHECK(c.log_price == d.log_price);
  const auto e = estimate_A(sol, small(500, Exec::serial));
  const auto f = estimate_A(sol, small(500, Exec::parallel));
  CHECK(e.A == f.A);
}

TEST_CASE("importance sampling at the zero shift is plain Monte Carlo") {
  const auto s = bergomi();
  const auto sol = solve_rate(0.0, s, 16);
  const ScalingRegime ldp;
  const auto a = price_call_plain(0.3, 0.0, s, ldp, small(4000));
  const auto b = price_call_is(0.3, sol, ldp, small(4000));
  CHECK(b.log_price == doctest::Approx(a.log_price).epsilon(1e-12));
}

TEST_CASE("Black-Scholes plain and IS prices agree with the closed form") {
  const auto s = black_scholes();
  const auto sol = solve_rate(0.1, s, 16);
  const ScalingRegime ldp;
  const double eps = 0.3, k = 0.1;
  const double exact = bs_exact_call(0.2, -0.02, eps * eps, k);
  const auto p = price_call_plain(eps, 0.1, s, ldp, small(40000));
  const auto q = price_call_is(eps, sol, ldp, small(40000));
  CHECK(std::abs(p.price - std::exp(exact)) <= 4 * p.se);
  CHECK(std::abs(q.log_price - exact) <= 4 * q.log_se);
  CHECK(q.log_se < p.log_se);
  CHECK_FALSE(q.weight_degenerate);
}

TEST_CASE("digital probability at the money is one half") {
  const auto s = black_scholes();
  const auto sol = solve_rate(0.0, s, 16);
  // X has mean -eps^2 sigma^2 / 2, so P[X > 0] sits just below 1/2.
  const auto p = digital_is(0.01, sol, ScalingRegime{}, small(20000));
  CHECK(std::exp(p.log_price) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("digital statistic for Black-Scholes tracks the energy") {
  const auto s = black_scholes();
  const auto sol = solve_rate(0.1, s, 16);
  const auto rows = ldp_digital_bound(sol, ScalingRegime{}, {0.2, 0.1, 0.05}, small(20000));
  REQUIRE(rows.size() == 3);
  double prev = 1e300;
  for (const auto& r : rows) {
    const double gap = std::abs(r.statistic - r.rate);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("digital statistic for the rough model approaches the energy from above") {
  // The log-prefactor keeps the statistic well above Lambda at eps = 0.1 (about 13% at
  // x = 0.2 with 1e5 paths); the gap closes slowly as eps shrinks.
  const auto sol = solve_rate(0.2, bergomi(), 32);
  const auto rows = ldp_digital_bound(sol, ScalingRegime{}, {0.2, 0.1, 0.05, 0.01}, small(20000));
  REQUIRE(rows.size() == 4);
  double prev = 1e300;
  for (const auto& r : rows) {
    REQUIRE(std::isfinite(r.statistic));
    CHECK(r.statistic > r.rate);
    CHECK(r.statistic < prev);
    prev = r.statistic;
  }
  CHECK(rows.back().statistic / rows.back().rate < 1.03);
}

TEST_CASE("prefactor: deterministic for Black-Scholes") {
  const auto s = black_scholes();
  for (double x : {0.05, 0.2}) {
    const auto sol = solve_rate(x, s, 16);
    const auto a = estimate_A(sol, small(200));
    // e^{x(1 + mu/sigma^2)} with mu = -sigma^2/2
    CHECK(std::abs(a.A - std::exp(0.5 * x)) <= 1e-10);
    CHECK(a.se < 1e-12);
  }
}

TEST_CASE("prefactor refuses a degenerate minimizer") {
  auto sol = solve_rate(0.1, bergomi(), 16);
  sol.margin = -0.5;
  CHECK_THROWS_AS(estimate_A(sol, small(100)), DegenerateSpec);
}

TEST_CASE("shift decomposition is exact per sample") {
  const auto s = bergomi();
  const auto sol = solve_rate(0.05, s, 16);
  const ShiftDecomposer dec(s, sol, 2);
  const ModelSampler smp(0.3, 16, 2, 4);
  for (std::uint64_t p = 0; p < 50; ++p) {
    const auto d = dec.decompose(smp.sample(p));
    CHECK(std::abs(d.residual) <= 1e-10);
    if (std::isfinite(d.delta1_recovered))
      CHECK(d.delta1_recovered == doctest::Approx(d.delta1).epsilon(1e-6));
  }
  // g1 of V is small: V removes the component along DPhi1, up to the gap between the
  // solver's midpoint pairing and the fine left-point one.
  ItoModel V;
  const auto d0 = dec.decompose(smp.sample(0), &V);
  CHECK(std::abs(taylor_terms(sol.h, V, s).g1) <= 0.05 * std::abs(d0.g1));
}

TEST_CASE("g1 sample variance matches the energy identity") {
  const auto sol = solve_rate(0.05, bergomi(), 32);
  const auto st = g1_statistics(sol, small(20000));
  CHECK(std::abs(st.variance - g1_variance_analytic(sol)) <= 3 * st.variance_se);
  CHECK(std::abs(st.mean) <= 4 * std::sqrt(st.variance / 20000));
}

TEST_CASE("Taylor form of the price is exact for Black-Scholes") {
  // No cubic remainder when sigma is constant, so both estimators target the same number.
  const auto s = black_scholes();
  const auto sol = solve_rate(0.1, s, 16);
  const double eps = 0.2;
  const auto j = estimate_j_taylor(eps, sol, small(40000));
  const auto is = price_call_is(eps, sol, ScalingRegime{}, small(40000));
  const double from_is = is.log_price + sol.rate / (eps * eps) - 0.1;
  CHECK(std::abs(j.log_price - from_is) <= 4 * (j.log_se + is.log_se));
}

TEST_CASE("option validation") {
  const auto s = bergomi();
  const auto sol = solve_rate(0.1, s, 16);
  McOptions o = small(100);
  o.n_steps = 24;  // not a multiple of 16
  CHECK_THROWS_AS(price_call_is(0.3, sol, ScalingRegime{}, o), GridMismatch);
  o = small(1);
  CHECK_THROWS_AS(price_call_plain(0.3, 0.1, s, ScalingRegime{}, o), std::invalid_argument);
  CHECK_THROWS_AS(price_call_plain(0.0, 0.1, s, ScalingRegime{}, small(10)),
                  std::invalid_argument);
}
