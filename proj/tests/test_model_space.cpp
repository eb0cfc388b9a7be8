#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rvasym/errors.hpp"
#include "rvasym/mc_engine.hpp"
#include "rvasym/model_space.hpp"

using namespace rvasym;

namespace {

CameronMartinPair random_pair(std::size_t n, unsigned seed, double scale = 0.5) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> N;
  CameronMartinPair h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h.hdot[i] = scale * N(g);
    h.hbardot[i] = scale * N(g);
  }
  return h;
}

// Direct left-point sum of (What_k - What_s)^m dW_k between coarse nodes s < t.
double direct_level(const ItoModel& m, int lev, std::size_t s, std::size_t t, bool bar) {
  double acc = 0.0;
  const double base = m.what[s * m.refine];
  for (std::size_t k = s * m.refine; k < t * m.refine; ++k)
    acc += std::pow(m.what[k] - base, lev) * (bar ? m.dwbar[k] : m.dw[k]);
  return acc;
}

}  // namespace

TEST_CASE("level count and Hoelder slack") {
  CHECK(choose_levels(0.5).M == 1);
  CHECK(choose_levels(0.3).M == 1);
  CHECK(choose_levels(0.2).M == 2);
  CHECK(choose_levels(0.1).M == 5);
  CHECK(choose_levels(0.5).kappa == doctest::Approx(0.01));
  // (M+1)H - 1/2 = 0.1 at H = 0.3, so kappa = min(0.01, 0.05/3).
  CHECK(choose_levels(0.3).kappa == doctest::Approx(0.01));
  // H = 0.25: M = 2, (M+1)H - 1/2 = 0.25, half of 0.25/4.
  CHECK(choose_levels(0.25).kappa == doctest::Approx(0.01));
  CHECK(choose_levels(0.17).M == 2);
  CHECK(choose_levels(0.17).kappa == doctest::Approx(0.5 * 0.01 / 4));
  for (double H : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    const auto p = choose_levels(H);
    CHECK((p.M + 1) * H - 0.5 > 0.0);
    CHECK(p.M * H - 0.5 <= 1e-12);
  }
}

TEST_CASE("dilation scales the homogeneous norm exactly") {
  for (double H : {0.2, 0.3, 0.5}) {
    const ItoModel m = ModelSampler(H, 64, 2, 4).sample(0);
    const double base = homogeneous_norm(m);
    for (double e : {0.01, 0.3, 2.5}) {
      const double d = homogeneous_norm(dilate(m, e));
      CHECK(std::abs(d - e * base) <= 1e-12 * e * base);
    }
  }
}

TEST_CASE("pair table satisfies the recombination identity on every pair") {
  const ItoModel m = ModelSampler(0.2, 64, 3, 9).sample(2);
  const PairTable pt(m);
  double worst = 0.0;
  for (std::size_t s = 0; s < 64; ++s)
    for (std::size_t t = s + 1; t <= 64; ++t)
      for (int lev = 1; lev <= m.params.M; ++lev) {
        worst = std::max(worst, std::abs(pt.level(lev, s, t) - direct_level(m, lev, s, t, false)));
        worst = std::max(worst, std::abs(pt.level_bar(lev, s, t) - direct_level(m, lev, s, t, true)));
      }
  CHECK(worst <= 1e-12);
  CHECK_THROWS_AS(pt.level(1, 3, 3), std::out_of_range);
}

TEST_CASE("lift of shifted noise equals the translated lift") {
  const std::size_t n = 32, r = 4, N = n * r;
  for (double H : {0.2, 0.5}) {
    const ItoModel m = ModelSampler(H, n, r, 1).sample(0);
    const auto h = random_pair(n, 2);
    const auto f = refine(h, r);
    std::vector<double> dw(m.dw), dwb(m.dwbar);
    for (std::size_t k = 0; k < N; ++k) {
      dw[k] += f.hdot[k] / N;
      dwb[k] += f.hbardot[k] / N;
    }
    CHECK(model_distance(lift_ito(dw, dwb, H, r), translate(m, h)) <= 1e-12);
  }
}

TEST_CASE("translation round trip and composition") {
  const std::size_t n = 32, r = 2;
  const ItoModel m = ModelSampler(0.3, n, r, 3).sample(5);
  const auto a = lift_shift(random_pair(n, 7), 0.3, n, r);
  const auto b = lift_shift(random_pair(n, 8), 0.3, n, r);
  CHECK(model_distance(translate(translate(m, a), a, -1.0), m) <= 1e-8);
  // T_b T_a = T_{a+b}
  LiftedShift ab = a;
  for (std::size_t k = 0; k < ab.hdot.size(); ++k) {
    ab.hdot[k] += b.hdot[k];
    ab.hbardot[k] += b.hbardot[k];
  }
  for (std::size_t k = 0; k < ab.hhat.size(); ++k) ab.hhat[k] += b.hhat[k];
  CHECK(model_distance(translate(translate(m, a), b), translate(m, ab)) <= 1e-10);
}

TEST_CASE("canonical lift of h is the translated zero model") {
  const auto h = random_pair(16, 4);
  const ItoModel c = canonical_lift(h, 0.3, 16, 4);
  const ItoModel z = translate(zero_model(choose_levels(0.3), 16, 4), h);
  CHECK(model_distance(c, z) == 0.0);
  // Level 0 carries the increments of h.
  for (std::size_t a = 0; a < 16; ++a) CHECK(c.cell(0, a) == doctest::Approx(h.hdot[a] / 16));
}

TEST_CASE("canonical lift converges under refinement") {
  // Level-1 cell integrals of a smooth path against the exact-in-cell value at the finest grid.
  CameronMartinPair h(8);
  for (std::size_t i = 0; i < 8; ++i) {
    h.hdot[i] = std::sin(1.0 + i);
    h.hbardot[i] = std::cos(2.0 * i);
  }
  const ItoModel ref = canonical_lift(h, 0.5, 8, 512);
  double prev = 1e300;
  for (std::size_t r : {4u, 8u, 16u, 32u}) {
    const ItoModel c = canonical_lift(h, 0.5, 8, r);
    double d = 0.0;
    for (std::size_t a = 0; a < 8; ++a) d = std::max(d, std::abs(c.cell(1, a) - ref.cell(1, a)));
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("norms: zero model, serial versus parallel, component layout") {
  const ItoModel z = zero_model(choose_levels(0.3), 8, 2);
  CHECK(model_norm(z) == 0.0);
  CHECK(homogeneous_norm(z) == 0.0);
  const ItoModel m = ModelSampler(0.2, 48, 2, 6).sample(1);
  CHECK(model_norm(m, Exec::serial) == model_norm(m, Exec::parallel));
  CHECK(homogeneous_norm(m, Exec::serial) == homogeneous_norm(m, Exec::parallel));
  const auto sup = component_sups(m);
  const auto hom = component_homogeneity(m.params);
  const auto deg = component_degree(m.params);
  CHECK(sup.size() == static_cast<std::size_t>(3 + 2 * m.params.M));
  CHECK(hom.size() == sup.size());
  CHECK(deg.size() == sup.size());
  CHECK(model_distance(m, m) == 0.0);
}

TEST_CASE("model text format is lossless") {
  const ItoModel m = ModelSampler(0.3, 16, 3, 2).sample(7);
  std::stringstream ss;
  write_model(ss, m);
  const ItoModel back = read_model(ss);
  CHECK(back.n == m.n);
  CHECK(back.refine == m.refine);
  CHECK(back.params.M == m.params.M);
  CHECK(back.dw == m.dw);
  CHECK(back.what == m.what);
  CHECK(back.iw == m.iw);
  CHECK(back.iwbar == m.iwbar);
}

TEST_CASE("mismatched grids are rejected") {
  const ItoModel m = ModelSampler(0.3, 16, 2, 1).sample(0);
  const auto bad = lift_shift(random_pair(8, 1), 0.3, 8, 2);
  CHECK_THROWS_AS(translate(m, bad), GridMismatch);
  CHECK_THROWS_AS(model_distance(m, ModelSampler(0.3, 8, 2, 1).sample(0)), GridMismatch);
  CHECK_THROWS_AS(lift_ito(std::vector<double>(10), std::vector<double>(9), 0.3, 2),
                  GridMismatch);
}
