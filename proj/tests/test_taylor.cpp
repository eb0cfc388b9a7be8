#include <doctest.h>

#include <cmath>

#include "rvasym/mc_engine.hpp"
#include "rvasym/rate_solver.hpp"
#include "rvasym/taylor.hpp"

using namespace rvasym;

namespace {

VolModelSpec spec(SigmaKind k, double s0, double H) {
  VolModelSpec s;
  s.sigma = {k, s0, 1.0};
  s.rho = -0.7;
  s.H = H;
  return s;
}

// Left-point Euler sum of sigma(What_k) dWtilde_k on the fine grid.
double euler(const ItoModel& m, const VolModelSpec& s) {
  double acc = 0.0;
  for (std::size_t k = 0; k < m.fine_size(); ++k)
    acc += s.sigma(m.what[k]) * (s.rho * m.dw[k] + s.rho_bar() * m.dwbar[k]);
  return acc;
}

}  // namespace

TEST_CASE("phi0 reproduces the Euler sum when the in-cell Taylor series is exact") {
  // One fine step per cell: all higher levels vanish.
  const auto s = spec(SigmaKind::exp_ou, 0.2, 0.3);
  const ItoModel m1 = ModelSampler(0.3, 64, 1, 3).sample(0);
  CHECK(phi0(m1, s) == doctest::Approx(euler(m1, s)).epsilon(1e-13));
  // Linear sigma: the Taylor series stops at the first derivative.
  const auto lin = spec(SigmaKind::linear, 0.2, 0.5);
  const ItoModel m4 = ModelSampler(0.5, 32, 4, 3).sample(1);
  CHECK(phi0(m4, lin) == doctest::Approx(euler(m4, lin)).epsilon(1e-13));
}

TEST_CASE("g0 is the first-order functional at the shift") {
  const auto s = spec(SigmaKind::exp_ou, 0.2, 0.3);
  const auto sol = solve_rate(0.1, s, 32);
  const ItoModel m = ModelSampler(0.3, 32, 1, 2).sample(0);
  const auto t = taylor_terms(sol.h, m, s);
  const auto sh = lift_shift(sol.h, 0.3, 32, 1);
  double g0 = 0.0;
  for (std::size_t k = 0; k < 32; ++k)
    g0 += s.sigma(sh.hhat[k]) * (s.rho * sh.hdot[k] + s.rho_bar() * sh.hbardot[k]) / 32.0;
  CHECK(t.g0 == doctest::Approx(g0).epsilon(1e-13));
  CHECK(t.k2 == 0.0);
}

TEST_CASE("remainder is cubic for rough Bergomi") {
  for (double H : {0.3, 0.5}) {
    const auto s = spec(SigmaKind::exp_ou, 1.0, H);
    const auto sol = solve_rate(0.1, s, 32);
    const ModelSampler smp(H, 32, 4, 17);
    for (std::uint64_t p = 0; p < 5; ++p) {
      const auto r = remainder_scaling_check(smp.sample(p), sol.h, s);
      CHECK_FALSE(r.vanishing);
      CHECK(r.slope >= 2.7);
      CHECK(r.eps_bar.size() == 6);
    }
  }
}

TEST_CASE("constant sigma at H = 1/2 has no remainder") {
  const auto s = spec(SigmaKind::constant, 0.2, 0.5);
  const auto sol = solve_rate(0.1, s, 16);
  const auto r = remainder_scaling_check(ModelSampler(0.5, 16, 4, 1).sample(0), sol.h, s);
  CHECK(r.vanishing);
  CHECK(std::isinf(r.slope));
  CHECK(r.terms.k2 == doctest::Approx(-0.5 * 0.04));
}

TEST_CASE("dilation without translation keeps the drift-free part linear") {
  const auto s = spec(SigmaKind::exp_ou, 0.2, 0.3);
  const ItoModel m = ModelSampler(0.3, 16, 2, 5).sample(3);
  const CameronMartinPair zero(16);
  const auto t = taylor_terms(zero, m, s);
  CHECK(t.g0 == 0.0);
  // g1 at h = 0 is sigma(0) times the driving increment.
  double inc = 0.0;
  for (std::size_t k = 0; k < m.fine_size(); ++k) inc += s.rho * m.dw[k] + s.rho_bar() * m.dwbar[k];
  CHECK(t.g1 == doctest::Approx(0.2 * inc).epsilon(1e-12));
}

TEST_CASE("expansion precondition") {
  const auto s = spec(SigmaKind::exp_ou, 1.0, 0.3);
  const ItoModel m = dilate(ModelSampler(0.3, 16, 2, 1).sample(0), 1000.0);
  CHECK_THROWS_AS(remainder_scaling_check(m, CameronMartinPair(16), s), std::invalid_argument);
}
