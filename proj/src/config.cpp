#include "tnbs/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "tnbs/errors.hpp"
#include "tnbs/state.hpp"

namespace tnbs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError(key, "expected an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError(key, "expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ParseError(key, "expected a boolean, got '" + v + "'");
}

int checked_int(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x < -2147483647LL || x > 2147483647LL) throw ParseError(key, "value out of range");
  return static_cast<int>(x);
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ParseError(key, what);
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::mps: return "mps";
    case Mode::mpo: return "mpo";
    case Mode::asymptotic: return "asymptotic";
    case Mode::oracle_check: return "oracle-check";
    case Mode::bond_search: return "bond-search";
  }
  return "?";
}

double SimulationConfig::survival() const {
  if (mu) return *mu;
  if (beta || gamma) {
    const double b = beta.value_or(1.0), g = gamma.value_or(1.0);
    if (N < 1) return 1.0;
    return std::min(1.0, b * std::pow(static_cast<double>(N), g) / N);
  }
  return 1.0;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "mode",  "N",    "M",   "d",   "chi",   "r",    "mu",   "beta",         "gamma",        "n_max",
      "cut",   "seed", "stop_on_plateau", "error_budget", "target_error", "chi_initial", "chi_max",
      "refine_steps", "fragment", "timing", "output"};
  return keys;
}

void set_config_value(SimulationConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "mode") {
    if (v == "mps") c.mode = Mode::mps;
    else if (v == "mpo") c.mode = Mode::mpo;
    else if (v == "asymptotic") c.mode = Mode::asymptotic;
    else if (v == "oracle-check") c.mode = Mode::oracle_check;
    else if (v == "bond-search") c.mode = Mode::bond_search;
    else throw ParseError(key, "unknown mode '" + v + "'");
  } else if (key == "N") {
    c.N = checked_int(key, v);
  } else if (key == "M") {
    c.M = checked_int(key, v);
  } else if (key == "d") {
    c.d = checked_int(key, v);
  } else if (key == "chi") {
    c.chi = checked_int(key, v);
  } else if (key == "r") {
    c.r = parse_double(key, v);
  } else if (key == "mu") {
    c.mu = parse_double(key, v);
  } else if (key == "beta") {
    c.beta = parse_double(key, v);
  } else if (key == "gamma") {
    c.gamma = parse_double(key, v);
  } else if (key == "n_max") {
    c.n_max = checked_int(key, v);
  } else if (key == "cut") {
    c.cut = checked_int(key, v);
  } else if (key == "seed") {
    const long long s = parse_int(key, v);
    require(s >= 0, key, "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "stop_on_plateau") {
    c.stop_on_plateau = parse_bool(key, v);
  } else if (key == "error_budget") {
    c.error_budget = parse_double(key, v);
  } else if (key == "target_error") {
    c.target_error = parse_double(key, v);
  } else if (key == "chi_initial") {
    c.chi_initial = checked_int(key, v);
  } else if (key == "chi_max") {
    c.chi_max = checked_int(key, v);
  } else if (key == "refine_steps") {
    c.refine_steps = checked_int(key, v);
  } else if (key == "fragment") {
    c.fragment = checked_int(key, v);
  } else if (key == "timing") {
    c.timing = parse_bool(key, v);
  } else if (key == "output") {
    c.output = v;
  } else {
    throw ParseError(key, "unknown key");
  }
}

SimulationConfig parse_config(const std::string& text,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
  SimulationConfig c = parse_config_unresolved(text, overrides);
  resolve(c);
  return c;
}

SimulationConfig parse_config_unresolved(const std::string& text,
                                         const std::vector<std::pair<std::string, std::string>>& overrides) {
  SimulationConfig c;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(t, "expected key=value");
    set_config_value(c, trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  for (const auto& [k, v] : overrides) set_config_value(c, k, v);
  return c;
}

void resolve(SimulationConfig& c) {
  if (c.mu && (c.beta || c.gamma)) throw ParseError("mu", "conflicts with beta/gamma; give only one of them");
  if (c.beta && !c.gamma) throw ParseError("beta", "needs gamma as well");
  require(c.N >= 0, "N", "must be non-negative");
  if (c.M == 0) c.M = std::max(20, 4 * c.N);
  require(c.M >= 2, "M", "must be at least 2");
  require(c.N <= c.M, "N", "cannot exceed M");
  require(c.r >= 0.0, "r", "must be non-negative");
  require(c.n_max >= 0 && c.n_max % 2 == 0, "n_max", "must be a non-negative even integer");
  if (c.mu) require(*c.mu >= 0.0 && *c.mu <= 1.0, "mu", "must lie in [0, 1]");
  if (c.beta) require(*c.beta > 0.0, "beta", "must be positive");
  if (c.gamma) require(*c.gamma >= 0.0 && *c.gamma <= 1.0, "gamma", "must lie in [0, 1]");
  if (c.mode == Mode::mps) require(c.survival() == 1.0, "mu", "mps mode is lossless; use mode=mpo for loss");
  require(c.chi >= 1, "chi", "must be at least 1");
  require(c.error_budget > 0.0, "error_budget", "must be positive");
  require(c.target_error > 0.0 && c.target_error < 1.0, "target_error", "must lie in (0, 1)");
  require(c.chi_initial >= 1, "chi_initial", "must be at least 1");
  require(c.chi_max >= c.chi_initial, "chi_max", "must be at least chi_initial");
  require(c.refine_steps >= 0, "refine_steps", "must be non-negative");
  require(c.fragment >= 1, "fragment", "must be at least 1");
  if (c.cut == 0) c.cut = c.M / 2;
  require(c.cut >= 1 && c.cut < c.M, "cut", "must lie in [1, M-1]");
  if (c.d == 0) {
    const double mu = c.mode == Mode::mps ? 1.0 : c.survival();
    c.d = choose_local_dim(c.r, c.N, c.n_max, mu);
  }
  require(c.d >= 2, "d", "must be at least 2");
  require(c.d > c.n_max, "d", "must exceed n_max");
}

std::string canonical_text(const SimulationConfig& c) {
  std::ostringstream os;
  os << "mode=" << to_string(c.mode) << "\n";
  os << "N=" << c.N << "\nM=" << c.M << "\nd=" << c.d << "\nchi=" << c.chi << "\n";
  os << "r=" << fmt_double(c.r) << "\n";
  if (c.mu) os << "mu=" << fmt_double(*c.mu) << "\n";
  if (c.beta) os << "beta=" << fmt_double(*c.beta) << "\n";
  if (c.gamma) os << "gamma=" << fmt_double(*c.gamma) << "\n";
  os << "n_max=" << c.n_max << "\ncut=" << c.cut << "\nseed=" << c.seed << "\n";
  os << "stop_on_plateau=" << (c.stop_on_plateau ? "true" : "false") << "\n";
  os << "error_budget=" << fmt_double(c.error_budget) << "\n";
  os << "target_error=" << fmt_double(c.target_error) << "\n";
  os << "chi_initial=" << c.chi_initial << "\nchi_max=" << c.chi_max << "\nrefine_steps=" << c.refine_steps << "\n";
  os << "fragment=" << c.fragment << "\n";
  return os.str();
}

std::uint64_t text_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const SimulationConfig& c) { return text_hash(canonical_text(c)); }

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string output_dir(const SimulationConfig& c) {
  if (!c.output.empty()) return c.output;
  if (const char* env = std::getenv("TNBS_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace tnbs
