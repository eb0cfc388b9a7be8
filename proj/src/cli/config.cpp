#include "rvasym/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rvasym/errors.hpp"

namespace rvasym::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": not a number: '" + text + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": not a non-negative integer: '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

template <class F>
void maybe(const pt::ptree& t, const std::string& key, F&& set) {
  if (auto v = t.get_optional<std::string>(pt::ptree::path_type(key, '.'))) set(key, *v);
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    model.validate();
    regime.validate(model.H);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const DegenerateSpec& e) {
    throw ConfigError(e.what());
  }
  if (n_steps < 2) throw ConfigError("grid.n_steps must be at least 2");
  if (refine == 0) throw ConfigError("grid.refine must be positive");
  if (n_paths < 2 || a_paths < 2 || verify_paths < 2 || taylor_paths == 0)
    throw ConfigError("path counts must be at least 2");
  for (double e : eps_list)
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("sweep.eps values must lie in (0, 1]");
  for (double x : x_list)
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("sweep.x values must be >= 0");
  if (!(tolerance > 0.0)) throw ConfigError("verify.tolerance must be positive");
  for (const auto& f : formats)
    if (f != "csv" && f != "json" && f != "txt") throw ConfigError("unknown output format: " + f);
  if (out_dir.empty()) throw ConfigError("outputs.directory must not be empty");
}

ScenarioConfig read_config(std::istream& is) {
  pt::ptree t;
  try {
    pt::read_ini(is, t);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ScenarioConfig c;
  maybe(t, "model.sigma", [&](auto&, auto& v) {
    try {
      c.model.sigma.kind = parse_sigma_kind(trim(v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  });
  maybe(t, "model.sigma0", [&](auto& k, auto& v) { c.model.sigma.sigma0 = to_double(k, v); });
  maybe(t, "model.eta", [&](auto& k, auto& v) { c.model.sigma.eta = to_double(k, v); });
  maybe(t, "model.rho", [&](auto& k, auto& v) { c.model.rho = to_double(k, v); });
  maybe(t, "model.H", [&](auto& k, auto& v) { c.model.H = to_double(k, v); });
  maybe(t, "regime.kind", [&](auto&, auto& v) {
    const auto s = trim(v);
    if (s == "ldp") c.regime.kind = RegimeKind::ldp;
    else if (s == "mdp") c.regime.kind = RegimeKind::mdp;
    else throw ConfigError("regime.kind must be ldp or mdp");
  });
  maybe(t, "regime.beta", [&](auto& k, auto& v) { c.regime.beta = to_double(k, v); });
  maybe(t, "grid.n_steps", [&](auto& k, auto& v) { c.n_steps = to_uint(k, v); });
  maybe(t, "grid.refine", [&](auto& k, auto& v) { c.refine = to_uint(k, v); });
  maybe(t, "mc.n_paths", [&](auto& k, auto& v) { c.n_paths = to_uint(k, v); });
  maybe(t, "mc.a_paths", [&](auto& k, auto& v) { c.a_paths = to_uint(k, v); });
  maybe(t, "mc.seed", [&](auto& k, auto& v) { c.seed = to_uint(k, v); });
  maybe(t, "sweep.eps", [&](auto& k, auto& v) {
    c.eps_list.clear();
    for (const auto& s : split_list(v)) c.eps_list.push_back(to_double(k, s));
  });
  maybe(t, "sweep.x", [&](auto& k, auto& v) {
    c.x_list.clear();
    for (const auto& s : split_list(v)) c.x_list.push_back(to_double(k, s));
  });
  maybe(t, "outputs.directory", [&](auto&, auto& v) { c.out_dir = trim(v); });
  maybe(t, "outputs.formats", [&](auto&, auto& v) { c.formats = split_list(v); });
  maybe(t, "verify.tolerance", [&](auto& k, auto& v) { c.tolerance = to_double(k, v); });
  maybe(t, "verify.paths", [&](auto& k, auto& v) { c.verify_paths = to_uint(k, v); });
  maybe(t, "taylor.paths", [&](auto& k, auto& v) { c.taylor_paths = to_uint(k, v); });
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return read_config(in);
}

std::string to_ini(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "[model]\n"
     << "sigma = " << to_string(c.model.sigma.kind) << "\n"
     << "sigma0 = " << fmt_double(c.model.sigma.sigma0) << "\n"
     << "eta = " << fmt_double(c.model.sigma.eta) << "\n"
     << "rho = " << fmt_double(c.model.rho) << "\n"
     << "H = " << fmt_double(c.model.H) << "\n\n"
     << "[regime]\n"
     << "kind = " << (c.regime.kind == RegimeKind::ldp ? "ldp" : "mdp") << "\n"
     << "beta = " << fmt_double(c.regime.beta) << "\n\n"
     << "[grid]\n"
     << "n_steps = " << c.n_steps << "\n"
     << "refine = " << c.refine << "\n\n"
     << "[mc]\n"
     << "n_paths = " << c.n_paths << "\n"
     << "a_paths = " << c.a_paths << "\n"
     << "seed = " << c.seed << "\n\n"
     << "[sweep]\n"
     << "eps = " << join(c.eps_list) << "\n"
     << "x = " << join(c.x_list) << "\n\n"
     << "[outputs]\n"
     << "directory = " << c.out_dir << "\n"
     << "formats = " << join(c.formats) << "\n\n"
     << "[verify]\n"
     << "tolerance = " << fmt_double(c.tolerance) << "\n"
     << "paths = " << c.verify_paths << "\n\n"
     << "[taylor]\n"
     << "paths = " << c.taylor_paths << "\n";
  return os.str();
}

void write_config(std::ostream& os, const ScenarioConfig& c) { os << to_ini(c); }

std::string config_hash(const ScenarioConfig& c) {
  // The output location does not influence any result, so it stays out of the hash.
  ScenarioConfig canon = c;
  canon.out_dir = "-";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_ini(canon)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool wants_format(const ScenarioConfig& c, const std::string& fmt) {
  for (const auto& f : c.formats)
    if (f == fmt) return true;
  return false;
}

}  // namespace rvasym::cli
