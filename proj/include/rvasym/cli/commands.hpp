#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "rvasym/cli/config.hpp"

namespace rvasym::cli {

using Cell = std::variant<double, std::string, bool>;

// Rows of named columns, rendered to CSV or JSON.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

void write_csv(std::ostream& os, const Table& t, const ScenarioConfig& c);
void write_json(std::ostream& os, const Table& t, const ScenarioConfig& c,
                const std::string& command);

// One row per x: x, Lambda, Lambda', sigma_x, margin, kkt residual, small-x ratio, ...
// Throws NonConvergence when any solve fails.
Table rate_table(const ScenarioConfig& c);

// One row per (eps, x) with log-prices from every applicable estimator and formula.
Table price_table(const ScenarioConfig& c);

// Taylor remainder slopes for fixed model samples around h^x, one row per (x, path).
Table taylor_table(const ScenarioConfig& c);

// Sandwich on the 5 x 5 x 5 grid (alpha, gamma, eps) in [-2,2] x [0,0.5] x [0.01,0.5].
Table bsabs_table(const ScenarioConfig& c);

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  int failures() const;
};

VerifyReport run_verify(const ScenarioConfig& c);
void write_report_text(std::ostream& os, const VerifyReport& r, const ScenarioConfig& c);
void write_report_json(std::ostream& os, const VerifyReport& r, const ScenarioConfig& c);

// Full command line: subcommand, flags, file output, exit codes
// (0 success, 1 validation, 2 numerical failure, verify: number of failed checks).
int run_cli(int argc, char** argv);

}  // namespace rvasym::cli
