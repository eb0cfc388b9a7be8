#include "rvasym/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rvasym/errors.hpp"

namespace rvasym {

namespace {

std::vector<std::vector<double>> binomial_table(int M) {
  std::vector<std::vector<double>> c(static_cast<std::size_t>(M) + 1);
  for (int m = 0; m <= M; ++m) {
    c[m].assign(static_cast<std::size_t>(m) + 1, 1.0);
    for (int j = 1; j < m; ++j) c[m][j] = c[m - 1][j - 1] + c[m - 1][j];
  }
  return c;
}

void check_increments(std::span<const double> dW, std::span<const double> dWbar,
                      std::size_t refine) {
  if (refine == 0) throw std::invalid_argument("refinement factor must be positive");
  if (dW.size() != dWbar.size()) throw GridMismatch("W and Wbar increments differ in length");
  if (dW.empty() || dW.size() % refine != 0)
    throw GridMismatch("increment count is not a positive multiple of the refinement");
}

// Walks the pairs (s, t), t = s+1..n, updating pair values by recombination.
class RowSweeper {
 public:
  RowSweeper(const ItoModel& m, std::size_t s, const std::vector<std::vector<double>>& binom)
      : model_(m), binom_(binom), s_(s), t_(s), lw_(m.params.M + 1, 0.0),
        lwb_(m.params.M + 1, 0.0) {}

  // Advance t by one cell.
  void step() {
    const int M = model_.params.M;
    const double d = model_.what_node(t_) - model_.what_node(s_);
    for (int m = M; m >= 1; --m) {
      double add = 0.0, addb = 0.0, pw = 1.0;
      for (int j = m; j >= 0; --j) {
        add += binom_[m][j] * pw * model_.cell(j, t_);
        addb += binom_[m][j] * pw * model_.cell_bar(j, t_);
        pw *= d;
      }
      lw_[m] += add;
      lwb_[m] += addb;
    }
    lw_[0] += model_.cell(0, t_);
    lwb_[0] += model_.cell_bar(0, t_);
    ++t_;
  }

  std::size_t t() const { return t_; }
  double w() const { return lw_[0]; }
  double wbar() const { return lwb_[0]; }
  double what() const { return model_.what_node(t_) - model_.what_node(s_); }
  double level(int m) const { return lw_[m]; }
  double level_bar(int m) const { return lwb_[m]; }

 private:
  const ItoModel& model_;
  const std::vector<std::vector<double>>& binom_;
  std::size_t s_, t_;
  std::vector<double> lw_, lwb_;
};

std::size_t component_count(const ModelParams& p) { return 3 + 2 * static_cast<std::size_t>(p.M); }

// Component values of the current pair in the canonical order.
void current_components(const RowSweeper& r, int M, std::vector<double>& out) {
  out[0] = r.w();
  out[1] = r.wbar();
  out[2] = r.what();
  for (int m = 1; m <= M; ++m) {
    out[2 + m] = r.level(m);
    out[2 + M + m] = r.level_bar(m);
  }
}

void check_same_shape(const ItoModel& a, const ItoModel& b) {
  if (a.n != b.n || a.refine != b.refine || a.params.M != b.params.M ||
      a.params.H != b.params.H)
    throw GridMismatch("models live on different grids or level sets");
}

// sup over pairs of |component(s,t)| / (t-s)^alpha; with `other`, of the difference.
std::vector<double> sups(const ItoModel& a, const ItoModel* other, Exec exec) {
  if (other) check_same_shape(a, *other);
  const int M = a.params.M;
  const std::size_t nc = component_count(a.params);
  const auto alpha = component_homogeneity(a.params);
  const auto binom = binomial_table(M);
  const std::size_t n = a.n;
  const double dt = 1.0 / static_cast<double>(n);

  auto row = [&](std::size_t s, std::vector<double>& best) {
    RowSweeper ra(a, s, binom);
    std::optional<RowSweeper> rb;
    if (other) rb.emplace(*other, s, binom);
    std::vector<double> ca(nc), cb(nc, 0.0);
    for (std::size_t t = s + 1; t <= n; ++t) {
      ra.step();
      current_components(ra, M, ca);
      if (rb) {
        rb->step();
        current_components(*rb, M, cb);
      }
      const double tau = static_cast<double>(t - s) * dt;
      for (std::size_t c = 0; c < nc; ++c) {
        const double q = std::abs(ca[c] - cb[c]) / std::pow(tau, alpha[c]);
        best[c] = std::max(best[c], q);
      }
    }
  };

  std::vector<double> best(nc, 0.0);
  if (exec == Exec::serial) {
    for (std::size_t s = 0; s < n; ++s) row(s, best);
    return best;
  }
#pragma omp parallel
  {
    std::vector<double> local(nc, 0.0);
#pragma omp for schedule(dynamic, 4) nowait
    for (long s = 0; s < static_cast<long>(n); ++s) row(static_cast<std::size_t>(s), local);
#pragma omp critical
    for (std::size_t c = 0; c < nc; ++c) best[c] = std::max(best[c], local[c]);
  }
  return best;
}

double combine_sups(const std::vector<double>& sup, const ModelParams& p, bool homogeneous) {
  const auto deg = component_degree(p);
  double total = 0.0;
  for (std::size_t c = 0; c < sup.size(); ++c)
    total += homogeneous && deg[c] > 1 ? std::pow(sup[c], 1.0 / deg[c]) : sup[c];
  return total;
}

}  // namespace

ModelParams choose_levels(double H) {
  validate_hurst(H);
  ModelParams p;
  p.H = H;
  p.M = 1;
  while ((p.M + 1) * H - 0.5 <= 1e-12) ++p.M;
  const double kappa_max = ((p.M + 1) * H - 0.5) / (p.M + 2);
  p.kappa = std::min(0.01, 0.5 * kappa_max);
  return p;
}

std::vector<double> component_homogeneity(const ModelParams& p) {
  const double a = 0.5 - p.kappa;
  const double ah = p.H - p.kappa;
  std::vector<double> h = {a, a, ah};
  for (int pass = 0; pass < 2; ++pass)
    for (int m = 1; m <= p.M; ++m) h.push_back(m * ah + a);
  return h;
}

std::vector<int> component_degree(const ModelParams& p) {
  std::vector<int> d = {1, 1, 1};
  for (int pass = 0; pass < 2; ++pass)
    for (int m = 1; m <= p.M; ++m) d.push_back(m + 1);
  return d;
}

ItoModel zero_model(const ModelParams& params, std::size_t n, std::size_t refine) {
  if (n == 0 || refine == 0) throw std::invalid_argument("empty model grid");
  ItoModel z;
  z.params = params;
  z.n = n;
  z.refine = refine;
  z.dw.assign(n * refine, 0.0);
  z.dwbar.assign(n * refine, 0.0);
  z.what.assign(n * refine + 1, 0.0);
  z.iw.assign((params.M + 1) * n, 0.0);
  z.iwbar.assign((params.M + 1) * n, 0.0);
  return z;
}

ItoModel lift_ito(std::span<const double> dW, std::span<const double> dWbar, double H,
                  std::size_t refine, Exec exec) {
  check_increments(dW, dWbar, refine);
  return lift_ito(dW, dWbar, choose_levels(H), refine, FractionalKernel(H, dW.size()), exec);
}

ItoModel lift_ito(std::span<const double> dW, std::span<const double> dWbar,
                  const ModelParams& params, std::size_t refine,
                  const FractionalKernel& fine_kernel, Exec exec) {
  check_increments(dW, dWbar, refine);
  if (fine_kernel.size() != dW.size() || fine_kernel.hurst() != params.H)
    throw GridMismatch("fine kernel does not match the increments");
  const std::size_t n = dW.size() / refine;
  ItoModel m = zero_model(params, n, refine);
  m.dw.assign(dW.begin(), dW.end());
  m.dwbar.assign(dWbar.begin(), dWbar.end());
  fine_kernel.integrate_bm(dW, m.what, exec);

  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t k0 = a * refine;
    for (std::size_t k = k0; k < k0 + refine; ++k) {
      const double u = m.what[k] - m.what[k0];
      double pw = 1.0;
      for (int lv = 0; lv <= params.M; ++lv) {
        m.iw[lv * n + a] += pw * dW[k];
        m.iwbar[lv * n + a] += pw * dWbar[k];
        pw *= u;
      }
    }
  }
  return m;
}

LiftedShift lift_shift(const CameronMartinPair& h, double H, std::size_t n,
                       std::size_t refine) {
  if (h.hdot.size() != h.hbardot.size())
    throw std::invalid_argument("Cameron-Martin components differ in length");
  LiftedShift s;
  s.n = n;
  s.refine = refine;
  if (h.size() == n * refine) {
    s.hdot = h.hdot;
    s.hbardot = h.hbardot;
  } else if (h.size() == n) {
    auto f = rvasym::refine(h, refine);
    s.hdot = std::move(f.hdot);
    s.hbardot = std::move(f.hbardot);
  } else {
    throw GridMismatch("shift grid matches neither the coarse nor the fine model grid");
  }
  s.hhat = FractionalKernel(H, n * refine).integrate_cm(s.hdot);
  return s;
}

ItoModel canonical_lift(const CameronMartinPair& h, double H, std::size_t n,
                        std::size_t refine) {
  return translate(zero_model(choose_levels(H), n, refine), lift_shift(h, H, n, refine));
}

ItoModel dilate(const ItoModel& model, double eps) {
  ItoModel d = model;
  for (auto& v : d.dw) v *= eps;
  for (auto& v : d.dwbar) v *= eps;
  for (auto& v : d.what) v *= eps;
  double f = eps;
  for (int m = 0; m <= d.params.M; ++m) {
    for (std::size_t a = 0; a < d.n; ++a) {
      d.iw[m * d.n + a] *= f;
      d.iwbar[m * d.n + a] *= f;
    }
    f *= eps;
  }
  return d;
}

ItoModel translate(const ItoModel& model, const LiftedShift& h, double scale) {
  if (h.n != model.n || h.refine != model.refine)
    throw GridMismatch("shift and model live on different grids");
  const std::size_t n = model.n, r = model.refine, N = n * r;
  const double dtau = 1.0 / static_cast<double>(N);
  const int M = model.params.M;

  ItoModel out = model;
  for (std::size_t k = 0; k < N; ++k) {
    out.dw[k] += scale * h.hdot[k] * dtau;
    out.dwbar[k] += scale * h.hbardot[k] * dtau;
  }
  for (std::size_t k = 0; k <= N; ++k) out.what[k] += scale * h.hhat[k];

  // Stored level m is the pure model term; add (u+v)^m dX' - u^m dX summed over the cell,
  // which is the sum of all binomial cross terms.
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t k0 = a * r;
    for (std::size_t k = k0; k < k0 + r; ++k) {
      const double u = model.what[k] - model.what[k0];
      const double v = scale * (h.hhat[k] - h.hhat[k0]);
      const double dwk = model.dw[k], dwbk = model.dwbar[k];
      const double dwk2 = out.dw[k], dwbk2 = out.dwbar[k];
      double pu = 1.0, puv = 1.0;
      for (int lv = 0; lv <= M; ++lv) {
        out.iw[lv * n + a] += puv * dwk2 - pu * dwk;
        out.iwbar[lv * n + a] += puv * dwbk2 - pu * dwbk;
        pu *= u;
        puv *= u + v;
      }
    }
  }
  return out;
}

ItoModel translate(const ItoModel& model, const CameronMartinPair& h) {
  return translate(model, lift_shift(h, model.params.H, model.n, model.refine));
}

PairTable::PairTable(const ItoModel& model, Exec exec)
    : n_(model.n), M_(model.params.M), row_offset_(model.n + 1, 0) {
  for (std::size_t s = 0; s < n_; ++s) row_offset_[s + 1] = row_offset_[s] + (n_ - s);
  const std::size_t npairs = row_offset_[n_];
  w_.assign(static_cast<std::size_t>(M_) * npairs, 0.0);
  wbar_.assign(w_.size(), 0.0);
  const auto binom = binomial_table(M_);

  auto fill_row = [&](std::size_t s) {
    RowSweeper r(model, s, binom);
    for (std::size_t t = s + 1; t <= n_; ++t) {
      r.step();
      for (int m = 1; m <= M_; ++m) {
        w_[index(m, s, t)] = r.level(m);
        wbar_[index(m, s, t)] = r.level_bar(m);
      }
    }
  };
  if (exec == Exec::serial) {
    for (std::size_t s = 0; s < n_; ++s) fill_row(s);
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (long s = 0; s < static_cast<long>(n_); ++s) fill_row(static_cast<std::size_t>(s));
  }
}

std::size_t PairTable::index(int m, std::size_t s, std::size_t t) const {
  if (m < 1 || m > M_ || !(s < t) || t > n_) throw std::out_of_range("pair index");
  return static_cast<std::size_t>(m - 1) * row_offset_[n_] + row_offset_[s] + (t - s - 1);
}

std::vector<double> component_sups(const ItoModel& model, Exec exec) {
  return sups(model, nullptr, exec);
}

double model_norm(const ItoModel& model, Exec exec) {
  return combine_sups(sups(model, nullptr, exec), model.params, false);
}

double homogeneous_norm(const ItoModel& model, Exec exec) {
  return combine_sups(sups(model, nullptr, exec), model.params, true);
}

double model_distance(const ItoModel& a, const ItoModel& b, Exec exec) {
  return combine_sups(sups(a, &b, exec), a.params, false);
}

void write_model(std::ostream& os, const ItoModel& m) {
  const auto old = os.precision(17);
  os << "# ito-model v1\n";
  os << "H " << m.params.H << " M " << m.params.M << " kappa " << m.params.kappa << " n "
     << m.n << " refine " << m.refine << "\n";
  os << "# fine: dw dwbar what\n";
  for (std::size_t k = 0; k < m.fine_size(); ++k)
    os << m.dw[k] << ' ' << m.dwbar[k] << ' ' << m.what[k] << '\n';
  os << m.what.back() << '\n';
  os << "# cells: I^0..I^M Ibar^0..Ibar^M\n";
  for (std::size_t a = 0; a < m.n; ++a) {
    for (int lv = 0; lv <= m.params.M; ++lv) os << m.cell(lv, a) << ' ';
    for (int lv = 0; lv <= m.params.M; ++lv)
      os << m.cell_bar(lv, a) << (lv == m.params.M ? '\n' : ' ');
  }
  os.precision(old);
}

ItoModel read_model(std::istream& is) {
  auto next_line = [&is]() {
    std::string line;
    while (std::getline(is, line))
      if (!line.empty() && line[0] != '#') return line;
    throw std::invalid_argument("truncated model stream");
  };
  std::istringstream head(next_line());
  std::string kH, kM, kK, kn, kr;
  ModelParams p;
  std::size_t n = 0, r = 0;
  head >> kH >> p.H >> kM >> p.M >> kK >> p.kappa >> kn >> n >> kr >> r;
  if (!head || kH != "H" || kM != "M" || kK != "kappa" || kn != "n" || kr != "refine")
    throw std::invalid_argument("malformed model header");
  ItoModel m = zero_model(p, n, r);
  for (std::size_t k = 0; k < m.fine_size(); ++k) {
    std::istringstream row(next_line());
    if (!(row >> m.dw[k] >> m.dwbar[k] >> m.what[k]))
      throw std::invalid_argument("malformed fine row");
  }
  {
    std::istringstream row(next_line());
    if (!(row >> m.what.back())) throw std::invalid_argument("malformed final node");
  }
  for (std::size_t a = 0; a < n; ++a) {
    std::istringstream row(next_line());
    for (int lv = 0; lv <= p.M; ++lv) row >> m.iw[lv * n + a];
    for (int lv = 0; lv <= p.M; ++lv) row >> m.iwbar[lv * n + a];
    if (!row) throw std::invalid_argument("malformed cell row");
  }
  return m;
}

}  // namespace rvasym
