#include <doctest.h>

#include <numeric>
#include <random>

#include "rvasym/kernels.hpp"

using namespace rvasym;

namespace {

std::vector<double> uniform(std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = U(g);
  return v;
}

}  // namespace

TEST_CASE("serial and OpenMP convolutions are bitwise identical") {
  for (std::size_t n : {1u, 7u, 33u, 257u, 1000u}) {
    const auto c = uniform(n, 1), x = uniform(n, 2);
    std::vector<double> a(n), b(n);
    kernels::serial::causal_convolve(c, x, a);
    kernels::omp::causal_convolve(c, x, b);
    CHECK(a == b);
    kernels::serial::causal_convolve_adjoint(c, x, a);
    kernels::omp::causal_convolve_adjoint(c, x, b);
    CHECK(a == b);
  }
}

TEST_CASE("causal convolution against a direct double loop") {
  const std::vector<double> c{1, 2, 3, 4}, x{1, -1, 2};
  std::vector<double> out(4);
  kernels::causal_convolve(c, x, out, Exec::serial);
  // out[j] = sum_{i <= j, i < 3} c[j-i] x[i]
  CHECK(out[0] == 1);
  CHECK(out[1] == 2 - 1);
  CHECK(out[2] == 3 - 2 + 2);
  CHECK(out[3] == 4 - 3 + 4);
}

TEST_CASE("adjoint identity <Cx, z> = <x, C'z>") {
  const std::size_t n = 120;
  const auto c = uniform(n, 3), x = uniform(n, 4), z = uniform(n, 5);
  std::vector<double> cx(n), cz(n);
  kernels::causal_convolve(c, x, cx, Exec::parallel);
  kernels::causal_convolve_adjoint(c, z, cz, Exec::parallel);
  const double l = std::inner_product(cx.begin(), cx.end(), z.begin(), 0.0);
  const double r = std::inner_product(x.begin(), x.end(), cz.begin(), 0.0);
  CHECK(l == doctest::Approx(r).epsilon(1e-13));
}
