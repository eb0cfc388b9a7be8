#pragma once

#include <cstddef>
#include <vector>

namespace rvasym {

// Uniform grid on [0,1] with nodes t_i = i/n.
struct Grid {
  std::size_t n = 0;

  double dt() const { return 1.0 / static_cast<double>(n); }
  double t(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(n); }
};

// Values at the n+1 nodes of a grid.
using GridPath = std::vector<double>;

// A pair (h, hbar) in H^1_0 x H^1_0 stored as piecewise-constant derivatives,
// one value per cell.
struct CameronMartinPair {
  std::vector<double> hdot;
  std::vector<double> hbardot;

  CameronMartinPair() = default;
  explicit CameronMartinPair(std::size_t n) : hdot(n, 0.0), hbardot(n, 0.0) {}
  CameronMartinPair(std::vector<double> a, std::vector<double> b)
      : hdot(std::move(a)), hbardot(std::move(b)) {}

  std::size_t size() const { return hdot.size(); }
  Grid grid() const { return Grid{hdot.size()}; }
};

}  // namespace rvasym
