#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "rvasym/errors.hpp"
#include "rvasym/fbm_kernel.hpp"

using namespace rvasym;

namespace {

std::vector<double> randn(std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> N;
  std::vector<double> v(n);
  for (auto& x : v) x = N(g);
  return v;
}

}  // namespace

TEST_CASE("node and midpoint weights match high-precision quadrature") {
  // mpmath quad of sqrt(2H)(t-s)^(H-1/2) over each cell, H = 0.3, n = 8.
  const double node[] = {0.0,
                         0.18344828186454557,
                         0.13595372836122703,
                         0.12238267063275634,
                         0.11432651898139254,
                         0.10868672032026068,
                         0.10439388539379945,
                         0.10095409929790365,
                         0.098099931699968953};
  const double mid[] = {0.10536336980241795, 0.1483752982801232,  0.12808747056418458,
                        0.11794144610865784, 0.11129213933123607, 0.10641036484183817,
                        0.10258746588391396, 0.099465577762081198};
  const FractionalKernel k(0.3, 8);
  REQUIRE(k.node_weights().size() == 9);
  REQUIRE(k.midpoint_weights().size() == 8);
  for (int d = 0; d <= 8; ++d) CHECK(k.node_weights()[d] == doctest::Approx(node[d]).epsilon(1e-13));
  for (int d = 0; d < 8; ++d) CHECK(k.midpoint_weights()[d] == doctest::Approx(mid[d]).epsilon(1e-13));
}

TEST_CASE("volterra kernel values") {
  CHECK(volterra_kernel(0.5, 0.2, 0.7) == doctest::Approx(1.0));
  CHECK(volterra_kernel(0.3, 0.7, 0.2) == 0.0);
  CHECK(volterra_kernel(0.3, 0.0, 1.0) == doctest::Approx(std::sqrt(0.6)));
}

TEST_CASE("fractional integral of a constant is exact at the nodes") {
  for (double H : {0.1, 0.3, 0.5}) {
    const std::size_t n = 50;
    const std::vector<double> hdot(n, 1.7);
    const auto hh = FractionalKernel(H, n).integrate_cm(hdot);
    const double a = H + 0.5;
    for (std::size_t j = 0; j <= n; ++j) {
      const double t = static_cast<double>(j) / n;
      CHECK(hh[j] == doctest::Approx(1.7 * std::sqrt(2 * H) / a * std::pow(t, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("at H = 1/2 the Brownian integral is the running sum") {
  const auto dw = randn(40, 3);
  const auto w = fractional_integral_bm(dw, 0.5);
  double s = 0.0;
  for (std::size_t j = 0; j < dw.size(); ++j) {
    CHECK(w[j] == doctest::Approx(s).epsilon(1e-13));
    s += dw[j];
  }
  CHECK(w.back() == doctest::Approx(s).epsilon(1e-13));
}

TEST_CASE("shifting the noise by hdot dt moves What by hhat") {
  const std::size_t n = 64;
  const FractionalKernel k(0.3, n);
  const auto dw = randn(n, 5);
  const auto hd = randn(n, 6);
  std::vector<double> dw2(n);
  for (std::size_t i = 0; i < n; ++i) dw2[i] = dw[i] + hd[i] / n;
  const auto a = k.integrate_bm(dw), b = k.integrate_bm(dw2), h = k.integrate_cm(hd);
  for (std::size_t j = 0; j <= n; ++j) CHECK(b[j] - a[j] == doctest::Approx(h[j]).epsilon(1e-12));
}

TEST_CASE("integrate_mid_adjoint is the adjoint of integrate_mid") {
  const FractionalKernel k(0.25, 37);
  const auto x = randn(37, 8), z = randn(37, 9);
  const auto kx = k.integrate_mid(x);
  const auto kz = k.integrate_mid_adjoint(z);
  const double lhs = std::inner_product(kx.begin(), kx.end(), z.begin(), 0.0);
  const double rhs = std::inner_product(x.begin(), x.end(), kz.begin(), 0.0);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("serial and parallel fractional integrals agree bitwise") {
  const FractionalKernel k(0.3, 300);
  const auto x = randn(300, 10);
  CHECK(k.integrate_cm(x, Exec::serial) == k.integrate_cm(x, Exec::parallel));
  CHECK(k.integrate_mid(x, Exec::serial) == k.integrate_mid(x, Exec::parallel));
  CHECK(k.integrate_mid_adjoint(x, Exec::serial) == k.integrate_mid_adjoint(x, Exec::parallel));
}

TEST_CASE("refinement keeps the energy and the node values") {
  CameronMartinPair h(randn(16, 1), randn(16, 2));
  const auto f = refine(h, 4);
  REQUIRE(f.size() == 64);
  CHECK(cm_norm_sq(f) == doctest::Approx(cm_norm_sq(h)).epsilon(1e-14));
  const auto a = fractional_integral_cm(h.hdot, 0.3);
  const auto b = fractional_integral_cm(f.hdot, 0.3);
  for (std::size_t j = 0; j <= 16; ++j) CHECK(b[4 * j] == doctest::Approx(a[j]).epsilon(1e-12));
}

TEST_CASE("Cameron-Martin helpers") {
  CameronMartinPair h(std::vector<double>{1, 2}, std::vector<double>{3, 4});
  CHECK(cm_norm_sq(h) == doctest::Approx((1 + 4 + 9 + 16) * 0.5));
  CHECK(cm_inner(h, h) == doctest::Approx(cm_norm_sq(h)));
  const auto c = correlate(h, 0.6);
  CHECK(c[0] == doctest::Approx(0.6 * 1 + 0.8 * 3));
  const auto p = integrate_path(h.hdot);
  CHECK(p.size() == 3);
  CHECK(p[2] == doctest::Approx(1.5));
  CHECK_THROWS_AS(correlate(h, 1.5), std::invalid_argument);
}

TEST_CASE("invalid Hurst parameters and grid sizes are rejected") {
  CHECK_THROWS_AS(validate_hurst(0.0), std::invalid_argument);
  CHECK_THROWS_AS(validate_hurst(0.51), std::invalid_argument);
  CHECK_NOTHROW(validate_hurst(0.5));
  const FractionalKernel k(0.3, 10);
  CHECK_THROWS_AS(k.integrate_cm(std::vector<double>(9)), GridMismatch);
  std::vector<double> out(5);
  CHECK_THROWS_AS(k.integrate_bm(std::vector<double>(10), out), GridMismatch);
}
