#include "rvasym/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rvasym/asymptotics.hpp"
#include "rvasym/cli/csv.hpp"
#include "rvasym/errors.hpp"
#include "rvasym/mc_engine.hpp"
#include "rvasym/model_space.hpp"
#include "rvasym/rate_solver.hpp"
#include "rvasym/taylor.hpp"

namespace rvasym::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return csv_number(*d);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "1" : "0";
  return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c))
    return std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  return std::get<std::string>(c);
}

// Linear price only when it is comfortably representable.
Cell linear_if_representable(double log_price) {
  if (std::isfinite(log_price) && log_price > std::log(1e-300)) return std::exp(log_price);
  return std::string();
}

bool is_black_scholes(const VolModelSpec& s) { return s.H == 0.5 && s.sigma.is_constant(); }

McOptions mc_options(const ScenarioConfig& c, std::size_t paths) {
  McOptions o;
  o.n_steps = c.n_steps;
  o.n_paths = paths;
  o.seed = c.seed;
  o.refine = c.refine;
  return o;
}

std::string join_warnings(const std::vector<std::string>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "; " : "") + w[i];
  return s;
}

}  // namespace

void write_csv(std::ostream& os, const Table& t, const ScenarioConfig& c) {
  CsvWriter w(os, config_hash(c), t.header);
  for (const auto& r : t.rows) {
    std::vector<std::string> f;
    f.reserve(r.size());
    for (const auto& cell : r) f.push_back(cell_text(cell));
    w.row(f);
  }
}

void write_json(std::ostream& os, const Table& t, const ScenarioConfig& c,
                const std::string& command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = RVASYM_VERSION;
  j["config_hash"] = config_hash(c);
  j["seed"] = c.seed;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.size(); ++i) row[t.header[i]] = cell_json(r[i]);
    j["rows"].push_back(row);
  }
  os << j.dump(2) << "\n";
}

Table rate_table(const ScenarioConfig& c) {
  c.validate();
  Table t;
  t.header = {"x",          "Lambda",       "Lambda_prime", "sigma_x",
              "margin",     "kkt_residual", "small_x_ratio", "constraint_residual",
              "iterations", "warnings"};
  const double s0 = c.model.sigma(0.0);
  for (double x : c.x_list) {
    const auto sol = solve_rate(x, c.model, c.n_steps);
    const double ratio = x == 0.0 ? 1.0 : sol.rate * 2.0 * s0 * s0 / (x * x);
    t.rows.push_back({x, sol.rate, sol.q, sol.sigma_x, sol.margin, sol.kkt_residual, ratio,
                      sol.constraint_residual, static_cast<double>(sol.iterations),
                      join_warnings(sol.warnings)});
  }
  return t;
}

Table price_table(const ScenarioConfig& c) {
  c.validate();
  Table t;
  t.header = {"eps",          "x",           "x_eff",        "eps_bar",
              "log_strike",   "Lambda",      "Lambda_prime", "sigma_x",
              "A",            "A_se",        "plain_log_price", "plain_log_se",
              "is_log_price", "is_log_se",   "is_price",     "ess_fraction",
              "weight_degenerate", "ldp_main_log_price", "mdp_log_price", "mdp_regime_ok",
              "bs_exact_log_price", "log_price_plus_rate", "R",    "R_target"};
  const VolModelSpec& spec = c.model;
  const double s0 = spec.sigma(0.0);
  const bool mdp = c.regime.kind == RegimeKind::mdp;
  const ScalingRegime ldp{RegimeKind::ldp, 0.0};
  const McOptions price_opts = mc_options(c, c.n_paths);
  const McOptions a_opts = mc_options(c, c.a_paths);

  struct Solved {
    RateSolution sol;
    double A = kNaN, A_se = kNaN;
  };
  auto solve = [&](double x_eff) {
    Solved s{solve_rate(x_eff, spec, c.n_steps)};
    if (x_eff > 0.0 && s.sol.margin > 0.0) {
      const auto a = estimate_A(s.sol, a_opts);
      s.A = a.A;
      s.A_se = a.se;
    }
    return s;
  };

  for (double x : c.x_list) {
    // In the moderate regime the solve point moves with eps, so it is redone per row.
    std::optional<Solved> fixed;
    if (!mdp) fixed = solve(x);
    for (double eps : c.eps_list) {
      const double x_eff = mdp ? x * std::pow(eps, 2.0 * c.regime.beta) : x;
      const Solved s = mdp ? solve(x_eff) : *fixed;
      const RateSolution& sol = s.sol;
      const double eb = ldp.eps_bar(eps, spec.H);
      const double k = c.regime.log_strike(x, eps, spec.H);

      const auto plain = price_call_plain(eps, x, spec, c.regime, price_opts);
      const auto is = price_call_is(eps, sol, ldp, price_opts);

      double ldp_main = kNaN, r_target = kNaN;
      if (x_eff > 0.0 && std::isfinite(s.A)) {
        ldp_main = precise_ldp_price(sol, s.A, ldp, eps);
        r_target = s.A / (sol.q * sol.q * sol.sigma_x * std::sqrt(2.0 * std::numbers::pi));
      }
      double mdp_price = kNaN;
      Cell regime_ok = std::string();
      if (mdp && x_eff > 0.0) {
        const auto p = precise_mdp_price(
            x_eff, s0, [&](double y) { return y * y / (2.0 * s0 * s0); }, spec.H, eps);
        mdp_price = p.log_price;
        regime_ok = p.regime_ok;
      }
      double bs = kNaN;
      if (is_black_scholes(spec) && k > 0.0) bs = bs_exact_call(s0, -0.5 * s0 * s0, eps * eps, k);

      const double plus_rate = is.log_price + sol.rate / (eb * eb);
      const double log_r = plus_rate - std::log(eps) - 2.0 * std::log(eb);
      t.rows.push_back({eps,
                        x,
                        x_eff,
                        eb,
                        k,
                        sol.rate,
                        sol.q,
                        sol.sigma_x,
                        s.A,
                        s.A_se,
                        plain.price > 0.0 ? plain.log_price : kNaN,
                        plain.price > 0.0 ? plain.log_se : kNaN,
                        is.log_price,
                        is.log_se,
                        linear_if_representable(is.log_price),
                        is.ess_fraction,
                        is.weight_degenerate,
                        ldp_main,
                        mdp_price,
                        regime_ok,
                        bs,
                        plus_rate,
                        std::exp(log_r),
                        r_target});
    }
  }
  return t;
}

Table taylor_table(const ScenarioConfig& c) {
  c.validate();
  Table t;
  t.header = {"x", "path", "H", "slope", "vanishing", "g0", "g1", "g2", "rem_first", "rem_last"};
  const ModelSampler sampler(c.model.H, c.n_steps, c.refine, c.seed);
  for (double x : c.x_list) {
    const auto sol = solve_rate(x, c.model, c.n_steps);
    for (std::size_t p = 0; p < c.taylor_paths; ++p) {
      const auto r = remainder_scaling_check(sampler.sample(p), sol.h, c.model);
      t.rows.push_back({x, static_cast<double>(p), c.model.H, r.slope, r.vanishing,
                        r.terms.g0, r.terms.g1, r.terms.g2, r.remainder.front(),
                        r.remainder.back()});
    }
  }
  return t;
}

Table bsabs_table(const ScenarioConfig&) {
  Table t;
  t.header = {"formula", "alpha", "gamma", "eps", "lower", "middle", "upper", "ordered"};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int l = 0; l < 5; ++l) {
        const double alpha = -2.0 + i;
        const double gamma = 0.125 * j;
        const double eps = 0.01 + (0.5 - 0.01) * l / 4.0;
        const auto b = bsabs_sandwich(alpha, gamma, eps);
        t.rows.push_back({formula_name(FormulaId::bs_abs), alpha, gamma, eps, b.lower, b.middle,
                          b.upper, b.lower <= b.middle && b.middle <= b.upper});
      }
  return t;
}

int VerifyReport::failures() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [](const Check& k) { return !k.passed; }));
}

VerifyReport run_verify(const ScenarioConfig& c) {
  c.validate();
  VerifyReport rep;
  const double tol = c.tolerance;
  const VolModelSpec& spec = c.model;
  const std::size_t n = 32, r = c.refine;
  const ModelSampler sampler(spec.H, n, r, c.seed);
  const ItoModel m = sampler.sample(0);

  auto add = [&](std::string name, double value, double threshold, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, value, threshold, std::move(detail)});
  };
  // Each check runs on its own; a throw is recorded as a failure of that check.
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(name, kNaN, kNaN, false, std::string("error: ") + e.what());
    }
  };

  guarded("dilation", [&] {
    const double e = 0.37;
    const double hn = homogeneous_norm(m);
    const double d = std::abs(homogeneous_norm(dilate(m, e)) - e * hn) / hn;
    add("dilation", d, tol, d <= tol, "relative error of |||dilate(M, 0.37)||| vs 0.37 |||M|||");
  });

  CameronMartinPair h(n);
  {
    std::mt19937_64 g(c.seed);
    std::normal_distribution<double> N;
    for (std::size_t i = 0; i < n; ++i) {
      h.hdot[i] = 0.3 * N(g);
      h.hbardot[i] = 0.3 * N(g);
    }
  }

  guarded("translation_round_trip", [&] {
    const auto sh = lift_shift(h, spec.H, n, r);
    const double d = model_distance(translate(translate(m, sh, 1.0), sh, -1.0), m);
    add("translation_round_trip", d, tol, d <= tol, "distance of T_{-h} T_h M from M");
  });

  guarded("girsanov_lift", [&] {
    const auto fine = refine(h, r);
    const std::size_t N = n * r;
    std::vector<double> dw(m.dw), dwb(m.dwbar);
    for (std::size_t k = 0; k < N; ++k) {
      dw[k] += fine.hdot[k] / static_cast<double>(N);
      dwb[k] += fine.hbardot[k] / static_cast<double>(N);
    }
    const double d = model_distance(lift_ito(dw, dwb, spec.H, r), translate(m, h));
    add("girsanov_lift", d, tol, d <= tol, "lift of shifted noise vs translated lift");
  });

  guarded("recombination", [&] {
    const PairTable pt(m);
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t tt = s + 1; tt <= n; ++tt)
        for (int lev = 1; lev <= m.params.M; ++lev) {
          double a = 0.0, b = 0.0;
          const double base = m.what[s * r];
          for (std::size_t k = s * r; k < tt * r; ++k) {
            const double u = std::pow(m.what[k] - base, lev);
            a += u * m.dw[k];
            b += u * m.dwbar[k];
          }
          worst = std::max({worst, std::abs(pt.level(lev, s, tt) - a) / (1.0 + std::abs(a)),
                            std::abs(pt.level_bar(lev, s, tt) - b) / (1.0 + std::abs(b))});
        }
    add("recombination", worst, tol, worst <= tol, "pair table vs direct sums, all pairs");
  });

  const double x = [&] {
    for (double v : c.x_list)
      if (v > 0.0) return v;
    return 0.05;
  }();
  std::optional<RateSolution> sol;
  guarded("rate_solve", [&] {
    sol = solve_rate(x, spec, n);
    add("rate_solve", sol->kkt_residual, 1e-10 * std::sqrt(2.0 * sol->rate),
        sol->kkt_residual <= 1e-10 * std::sqrt(2.0 * sol->rate) && sol->margin > 0.0,
        "KKT residual at the first positive x; margin must be positive");
  });

  if (sol) {
    guarded("remainder_slope", [&] {
      // Median over paths: a single path can show a dip where the cubic and quartic terms
      // cancel near the largest epsbar.
      std::vector<double> slopes;
      for (std::size_t p = 0; p < 10; ++p)
        slopes.push_back(remainder_scaling_check(sampler.sample(p), sol->h, spec).slope);
      std::sort(slopes.begin(), slopes.end());
      const double med = 0.5 * (slopes[4] + slopes[5]);
      add("remainder_slope", med, 2.7, med >= 2.7,
          "median log-log slope over 10 paths (min " + csv_number(slopes.front()) + ")");
    });

    guarded("ecool_identity", [&] {
      const double a = g1_variance_analytic(*sol);
      const double b = 2.0 * sol->rate / (sol->q * sol->q);
      const double d = std::abs(a - b) / b;
      add("ecool_identity", d, 1e-6, d <= 1e-6, "||DPhi1||^2 vs 2 Lambda / Lambda'^2");
    });

    guarded("g1_variance_mc", [&] {
      McOptions o = mc_options(c, c.verify_paths);
      const auto st = g1_statistics(*sol, o);
      const double z = std::abs(st.variance - g1_variance_analytic(*sol)) / st.variance_se;
      add("g1_variance_mc", z, 3.0, z <= 3.0, "standardized gap of the sample variance of g1");
    });

    guarded("decomposition", [&] {
      McOptions o = mc_options(c, c.verify_paths);
      const auto st = decomposition_statistics(*sol, o);
      const double bound = 4.0 / std::sqrt(static_cast<double>(st.n_paths));
      add("decomposition_residual", st.max_residual, 1e-8, st.max_residual <= 1e-8,
          "max |g2 - (D2 + g1 D1 + g1^2 D0)|");
      add("decomposition_correlation", std::abs(st.corr_g1_delta2), bound,
          std::abs(st.corr_g1_delta2) <= bound, "|corr(g1, Delta2)|");
    });

    guarded("thread_invariance", [&] {
      McOptions o = mc_options(c, 2000);
      o.exec = Exec::serial;
      const auto a = price_call_is(0.3, *sol, ScalingRegime{}, o);
      o.exec = Exec::parallel;
      const auto b = price_call_is(0.3, *sol, ScalingRegime{}, o);
      const double d = std::abs(a.log_price - b.log_price);
      add("thread_invariance", d, 0.0, d == 0.0, "serial vs parallel IS log-price, bitwise");
    });
  }

  guarded("bsabs_sandwich", [&] {
    const Table t = bsabs_table(c);
    double bad = 0.0;
    for (const auto& row : t.rows)
      if (!std::get<bool>(row.back())) bad += 1.0;
    add("bsabs_sandwich", bad, 0.0, bad == 0.0, "grid points violating lower <= middle <= upper");
  });
  return rep;
}

void write_report_text(std::ostream& os, const VerifyReport& r, const ScenarioConfig& c) {
  os << "rvasym verify  version " << RVASYM_VERSION << "  config " << config_hash(c) << "  seed "
     << c.seed << "\n";
  for (const auto& k : r.checks)
    os << (k.passed ? "PASS " : "FAIL ") << k.name << "  value=" << csv_number(k.value)
       << "  threshold=" << csv_number(k.threshold) << "  " << k.detail << "\n";
  os << r.failures() << " of " << r.checks.size() << " checks failed\n";
}

void write_report_json(std::ostream& os, const VerifyReport& r, const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["version"] = RVASYM_VERSION;
  j["config_hash"] = config_hash(c);
  j["seed"] = c.seed;
  j["failures"] = r.failures();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& k : r.checks)
    j["checks"].push_back({{"name", k.name},
                           {"passed", k.passed},
                           {"value", cell_json(k.value)},
                           {"threshold", cell_json(k.threshold)},
                           {"detail", k.detail}});
  os << j.dump(2) << "\n";
}

namespace {

void emit_table(const Table& t, const ScenarioConfig& c, const std::string& stem) {
  std::filesystem::create_directories(c.out_dir);
  const std::filesystem::path dir(c.out_dir);
  if (wants_format(c, "csv")) {
    std::ofstream f(dir / (stem + ".csv"));
    write_csv(f, t, c);
  }
  if (wants_format(c, "json")) {
    std::ofstream f(dir / (stem + ".json"));
    write_json(f, t, c, stem);
  }
  std::cout << "wrote " << t.rows.size() << " rows to " << (dir / stem).string() << ".*\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Small-noise asymptotics and Monte Carlo for rough volatility models"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> paths, grid;
  app.add_option("--config", config_path, "INI scenario file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--out", out, "output directory");
  app.add_option("--paths", paths, "Monte Carlo paths");
  app.add_option("--grid", grid, "time steps of the solver and pricing grid");
  app.fallthrough();
  auto* rate = app.add_subcommand("rate", "rate function sweep over x");
  auto* price = app.add_subcommand("price", "price sweep over (eps, x)");
  auto* verify = app.add_subcommand("verify", "invariant suite; exit code = failures");
  auto* taylor = app.add_subcommand("taylor-check", "Taylor remainder slopes");
  auto* bsabs = app.add_subcommand("bsabs", "sandwich bounds on the (alpha, gamma, eps) grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ScenarioConfig c = config_path.empty() ? ScenarioConfig{} : load_config(config_path);
    if (seed) c.seed = *seed;
    if (out) c.out_dir = *out;
    if (paths) c.n_paths = *paths;
    if (grid) c.n_steps = *grid;
    c.validate();

    if (rate->parsed()) emit_table(rate_table(c), c, "rate");
    if (price->parsed()) emit_table(price_table(c), c, "price");
    if (taylor->parsed()) emit_table(taylor_table(c), c, "taylor_check");
    if (bsabs->parsed()) emit_table(bsabs_table(c), c, "bsabs");
    if (verify->parsed()) {
      const auto rep = run_verify(c);
      std::filesystem::create_directories(c.out_dir);
      const std::filesystem::path dir(c.out_dir);
      {
        std::ofstream f(dir / "verify_report.txt");
        write_report_text(f, rep, c);
      }
      if (wants_format(c, "json")) {
        std::ofstream f(dir / "verify_report.json");
        write_report_json(f, rep, c);
      }
      write_report_text(std::cout, rep, c);
      return std::min(rep.failures(), 125);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DegenerateSpec& e) {
    std::cerr << "degenerate specification: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace rvasym::cli
