#include "rvasym/rng.hpp"

#include <cmath>
#include <numbers>

namespace rvasym {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Block Philox4x32::operator()(Block c) const {
  std::uint32_t k0 = key_[0], k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

void PathNormals::fill(std::span<double> out) const {
  // Box-Muller on each block of four uniforms gives four normals.
  const double two_pi = 2.0 * std::numbers::pi;
  std::uint32_t block = 0;
  for (std::size_t i = 0; i < out.size(); i += 4, ++block) {
    const auto u = gen_({static_cast<std::uint32_t>(path_),
                         static_cast<std::uint32_t>(path_ >> 32), block, stream_});
    const double r0 = std::sqrt(-2.0 * std::log(to_open_unit(u[0])));
    const double r1 = std::sqrt(-2.0 * std::log(to_open_unit(u[2])));
    const double a0 = two_pi * to_open_unit(u[1]);
    const double a1 = two_pi * to_open_unit(u[3]);
    const double z[4] = {r0 * std::cos(a0), r0 * std::sin(a0), r1 * std::cos(a1),
                         r1 * std::sin(a1)};
    for (std::size_t j = 0; j < 4 && i + j < out.size(); ++j) out[i + j] = z[j];
  }
}

}  // namespace rvasym
