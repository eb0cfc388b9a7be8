#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "rvasym/exec.hpp"
#include "rvasym/fbm_kernel.hpp"
#include "rvasym/grid.hpp"

namespace rvasym {

// H, the number M of iterated-integral levels, and the Hoelder slack kappa.
struct ModelParams {
  double H = 0.5;
  int M = 1;
  double kappa = 0.01;
};

// Smallest M with (M+1) H - 1/2 > 0; kappa = min(0.01, half the largest admissible kappa).
ModelParams choose_levels(double H);

// Discrete Ito model over [0,1].
//
// Paths live on a fine grid of N = n * refine steps. Iterated integrals
//   I^m(s,t) = sum_{s <= tau_k < t} (What_k - What_s)^m dW_k   (left point)
// and the same against dWbar are stored per coarse cell for m = 0..M, where
// level 0 is the plain increment. Pair values between coarse nodes follow from
// the recombination identity; see pair_table.
struct ItoModel {
  ModelParams params;
  std::size_t n = 0;
  std::size_t refine = 1;
  std::vector<double> dw, dwbar;  // fine increments, size N
  GridPath what;                  // fine node values of the fractional path, size N+1
  std::vector<double> iw, iwbar;  // cell integrals, entry [m * n + a]

  std::size_t fine_size() const { return n * refine; }
  double cell(int m, std::size_t a) const { return iw[static_cast<std::size_t>(m) * n + a]; }
  double cell_bar(int m, std::size_t a) const {
    return iwbar[static_cast<std::size_t>(m) * n + a];
  }
  // What at coarse node j.
  double what_node(std::size_t j) const { return what[j * refine]; }
};

ItoModel zero_model(const ModelParams& params, std::size_t n, std::size_t refine);

// Lift fine increments (length n * refine) into a model on n coarse cells.
ItoModel lift_ito(std::span<const double> dW, std::span<const double> dWbar, double H,
                  std::size_t refine, Exec exec = Exec::serial);
// Same, reusing a kernel built for the fine grid.
ItoModel lift_ito(std::span<const double> dW, std::span<const double> dWbar,
                  const ModelParams& params, std::size_t refine,
                  const FractionalKernel& fine_kernel, Exec exec = Exec::serial);

// Cameron-Martin path prepared for translation on a model's fine grid.
struct LiftedShift {
  std::size_t n = 0;
  std::size_t refine = 1;
  std::vector<double> hdot, hbardot;  // fine derivatives
  GridPath hhat;                      // fine node values of the fractional integral
};

// h may be given on the coarse grid (n cells) or the fine grid (n * refine cells).
LiftedShift lift_shift(const CameronMartinPair& h, double H, std::size_t n,
                       std::size_t refine);

// Lift of a smooth path: translate(zero_model, h).
ItoModel canonical_lift(const CameronMartinPair& h, double H, std::size_t n,
                        std::size_t refine);

// Paths scale by eps, level m by eps^(m+1).
ItoModel dilate(const ItoModel& model, double eps);

// Model of W + scale * h. Cross terms int What^j hhat^(m-j) d(W or h) use the
// same left-point rule as lift_ito, so lift_ito(dW + dh) == translate(lift_ito(dW), h).
ItoModel translate(const ItoModel& model, const LiftedShift& h, double scale = 1.0);
ItoModel translate(const ItoModel& model, const CameronMartinPair& h);

// All pair values I^m(s,t), s < t coarse nodes, m = 1..M.
class PairTable {
 public:
  PairTable(const ItoModel& model, Exec exec = Exec::parallel);

  std::size_t size() const { return n_; }
  int levels() const { return M_; }
  double level(int m, std::size_t s, std::size_t t) const { return w_[index(m, s, t)]; }
  double level_bar(int m, std::size_t s, std::size_t t) const { return wbar_[index(m, s, t)]; }

 private:
  std::size_t index(int m, std::size_t s, std::size_t t) const;

  std::size_t n_;
  int M_;
  std::vector<std::size_t> row_offset_;
  std::vector<double> w_, wbar_;
};

// Largest n for which callers are expected to materialize a PairTable; the norms
// below never store pairs and work for any n.
inline constexpr std::size_t kPairTableLimit = 512;

// Sum over components of the discrete Hoelder sup over coarse pairs.
double model_norm(const ItoModel& model, Exec exec = Exec::parallel);
// Same with the level-(m+1) quotient raised to 1/(m+1), so that
// homogeneous_norm(dilate(M, eps)) == eps * homogeneous_norm(M).
double homogeneous_norm(const ItoModel& model, Exec exec = Exec::parallel);
// model_norm of the componentwise (pairwise) difference.
double model_distance(const ItoModel& a, const ItoModel& b, Exec exec = Exec::parallel);

// Per-component sups, in the order W, Wbar, What, I^1..I^M, Ibar^1..Ibar^M.
std::vector<double> component_sups(const ItoModel& model, Exec exec = Exec::parallel);
std::vector<double> component_homogeneity(const ModelParams& params);
std::vector<int> component_degree(const ModelParams& params);

// Columnar text format, lossless for doubles.
void write_model(std::ostream& os, const ItoModel& model);
ItoModel read_model(std::istream& is);

}  // namespace rvasym
