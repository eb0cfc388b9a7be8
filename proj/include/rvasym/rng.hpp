#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace rvasym {

// Philox4x32-10 (Salmon et al., SC'11). Stateless: the output is a pure function of
// (key, counter), so path i of a run draws the same numbers on any thread count.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Block operator()(Block counter) const;

 private:
  std::array<std::uint32_t, 2> key_;
};

// Standard normals for one Monte Carlo path. Stream ids separate independent uses of the
// same (seed, path), e.g. the W and Wbar increments.
class PathNormals {
 public:
  PathNormals(std::uint64_t seed, std::uint64_t path, std::uint32_t stream)
      : gen_(seed), path_(path), stream_(stream) {}

  void fill(std::span<double> out) const;

 private:
  Philox4x32 gen_;
  std::uint64_t path_;
  std::uint32_t stream_;
};

// Uniform in (0, 1), never 0 or 1.
inline double to_open_unit(std::uint32_t x) { return (static_cast<double>(x) + 0.5) * 0x1p-32; }

}  // namespace rvasym
