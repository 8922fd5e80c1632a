#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "mmcomp/model.hpp"

namespace mmcomp {

/// Carries every problem found in a config, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errs) {
    std::string s = "invalid config:";
    for (const auto& e : errs) s += "\n  " + e;
    return s;
  }
  std::vector<std::string> errors_;
};

enum class StrategyKind { ClosedForm, Euler, Constant };

struct StrategySpec {
  StrategyKind kind = StrategyKind::ClosedForm;
  double ask = 0.0;
  double bid = 0.0;

  bool operator==(const StrategySpec&) const = default;
};

/// Parses "closed-form", "euler" or "constant:ASK:BID".
inline std::optional<StrategySpec> parse_strategy(std::string_view text) {
  if (text == "closed-form") return StrategySpec{StrategyKind::ClosedForm};
  if (text == "euler") return StrategySpec{StrategyKind::Euler};
  constexpr std::string_view prefix = "constant:";
  if (text.substr(0, prefix.size()) != prefix) return std::nullopt;
  const std::string rest(text.substr(prefix.size()));
  const auto colon = rest.find(':');
  if (colon == std::string::npos) return std::nullopt;
  try {
    std::size_t used_a = 0, used_b = 0;
    const std::string a = rest.substr(0, colon), b = rest.substr(colon + 1);
    StrategySpec s{StrategyKind::Constant, std::stod(a, &used_a), std::stod(b, &used_b)};
    if (used_a != a.size() || used_b != b.size()) return std::nullopt;
    if (!std::isfinite(s.ask) || !std::isfinite(s.bid)) return std::nullopt;
    return s;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::string to_string(const StrategySpec& s) {
  switch (s.kind) {
    case StrategyKind::ClosedForm: return "closed-form";
    case StrategyKind::Euler: return "euler";
    case StrategyKind::Constant: {
      char buf[96];
      std::snprintf(buf, sizeof buf, "constant:%.17g:%.17g", s.ask, s.bid);
      return buf;
    }
  }
  return {};
}

struct RunSettings {
  long paths = 10000;
  long steps = 1000;
  std::uint64_t seed = 7;
  StrategySpec strategy;
  double confidence = 0.99;
  long euler_steps = 100000;
  bool euler_truncated = true;
  long omega_steps = 1000;

  bool operator==(const RunSettings&) const = default;
};

struct RunConfig {
  ModelParams model;
  RunSettings run;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> to_double(std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) return std::nullopt;
  return out;
}

template <class Int>
std::optional<Int> to_int(std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) return std::nullopt;
  return out;
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// Model keys: all required.
inline const std::vector<std::string>& model_keys() {
  static const std::vector<std::string> keys = {
      "sigma", "lambda_a", "lambda_b", "kappa", "beta", "a_tilde", "b_tilde", "gamma",
      "phi",   "sigma_z",  "q_min",    "q_max", "horizon", "s0",  "tick"};
  return keys;
}

/// Run keys: all optional.
inline const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> keys = {"paths",       "steps",           "seed",
                                                "strategy",    "confidence",      "euler_steps",
                                                "euler_truncated", "omega_steps"};
  return keys;
}

/// Parses `key = value` lines (`#` starts a comment). Reports every missing, unknown,
/// duplicated, malformed and out-of-range key in one ConfigError.
inline RunConfig parse_config_text(std::string_view text) {
  std::vector<std::string> errs;
  std::map<std::string, std::string, std::less<>> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected `key = value`");
      continue;
    }
    const std::string key(detail::trim(sv.substr(0, eq)));
    const std::string value(detail::trim(sv.substr(eq + 1)));
    const bool known = std::find(model_keys().begin(), model_keys().end(), key) != model_keys().end() ||
                       std::find(run_keys().begin(), run_keys().end(), key) != run_keys().end();
    if (!known) {
      errs.push_back(key + ": unknown key (line " + std::to_string(lineno) + ")");
      continue;
    }
    if (kv.count(key)) {
      errs.push_back(key + ": duplicated (line " + std::to_string(lineno) + ")");
      continue;
    }
    kv.emplace(key, value);
  }

  RunConfig cfg;
  auto real = [&](const char* key, double& dst, bool required) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) errs.push_back(std::string(key) + ": missing required key");
      return;
    }
    if (auto v = detail::to_double(it->second)) dst = *v;
    else errs.push_back(std::string(key) + ": expected a finite number, got '" + it->second + "'");
  };
  auto integer = [&](const char* key, auto& dst, bool required) {
    using Int = std::remove_reference_t<decltype(dst)>;
    const auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) errs.push_back(std::string(key) + ": missing required key");
      return;
    }
    if (auto v = detail::to_int<Int>(it->second)) dst = *v;
    else errs.push_back(std::string(key) + ": expected an integer, got '" + it->second + "'");
  };

  ModelParams& m = cfg.model;
  real("sigma", m.sigma, true);
  real("lambda_a", m.lambda_a, true);
  real("lambda_b", m.lambda_b, true);
  real("kappa", m.kappa, true);
  real("beta", m.beta, true);
  real("a_tilde", m.a_tilde, true);
  real("b_tilde", m.b_tilde, true);
  real("gamma", m.gamma, true);
  real("phi", m.phi, true);
  real("sigma_z", m.sigma_z, true);
  integer("q_min", m.q_min, true);
  integer("q_max", m.q_max, true);
  real("horizon", m.horizon, true);
  real("s0", m.s0, true);
  real("tick", m.tick, true);

  RunSettings& r = cfg.run;
  integer("paths", r.paths, false);
  integer("steps", r.steps, false);
  integer("seed", r.seed, false);
  real("confidence", r.confidence, false);
  integer("euler_steps", r.euler_steps, false);
  integer("omega_steps", r.omega_steps, false);
  if (const auto it = kv.find("strategy"); it != kv.end()) {
    if (auto s = parse_strategy(it->second)) r.strategy = *s;
    else errs.push_back("strategy: expected closed-form, euler or constant:ASK:BID, got '" + it->second + "'");
  }
  if (const auto it = kv.find("euler_truncated"); it != kv.end()) {
    if (it->second == "true") r.euler_truncated = true;
    else if (it->second == "false") r.euler_truncated = false;
    else errs.push_back("euler_truncated: expected true or false, got '" + it->second + "'");
  }

  // Range checks only for keys that parsed, so a bad value is reported once.
  auto parsed = [&](const std::string& key) {
    if (!kv.count(key)) return false;
    const std::string prefix = key + ":";
    for (const auto& e : errs)
      if (e.compare(0, prefix.size(), prefix) == 0) return false;
    return true;
  };
  for (const auto& v : violations(m)) {
    const std::string key = v.substr(0, v.find(':'));
    if (parsed(key)) errs.push_back(v);
  }
  if (parsed("paths") && r.paths < 1) errs.push_back("paths: must be >= 1");
  if (parsed("steps") && r.steps < 1) errs.push_back("steps: must be >= 1");
  if (parsed("euler_steps") && r.euler_steps < 1) errs.push_back("euler_steps: must be >= 1");
  if (parsed("omega_steps") && r.omega_steps < 1) errs.push_back("omega_steps: must be >= 1");
  if (parsed("confidence") && !(r.confidence > 0.0 && r.confidence < 1.0))
    errs.push_back("confidence: must be in (0, 1)");

  if (!errs.empty()) throw ConfigError(std::move(errs));
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Canonical `key = value` text; parse_config_text(to_config_text(c)) == c.
inline std::string to_config_text(const RunConfig& c) {
  const ModelParams& m = c.model;
  const RunSettings& r = c.run;
  std::ostringstream o;
  o << "sigma = " << detail::fmt(m.sigma) << "\n"
    << "lambda_a = " << detail::fmt(m.lambda_a) << "\n"
    << "lambda_b = " << detail::fmt(m.lambda_b) << "\n"
    << "kappa = " << detail::fmt(m.kappa) << "\n"
    << "beta = " << detail::fmt(m.beta) << "\n"
    << "a_tilde = " << detail::fmt(m.a_tilde) << "\n"
    << "b_tilde = " << detail::fmt(m.b_tilde) << "\n"
    << "gamma = " << detail::fmt(m.gamma) << "\n"
    << "phi = " << detail::fmt(m.phi) << "\n"
    << "sigma_z = " << detail::fmt(m.sigma_z) << "\n"
    << "q_min = " << m.q_min << "\n"
    << "q_max = " << m.q_max << "\n"
    << "horizon = " << detail::fmt(m.horizon) << "\n"
    << "s0 = " << detail::fmt(m.s0) << "\n"
    << "tick = " << detail::fmt(m.tick) << "\n"
    << "paths = " << r.paths << "\n"
    << "steps = " << r.steps << "\n"
    << "seed = " << r.seed << "\n"
    << "strategy = " << to_string(r.strategy) << "\n"
    << "confidence = " << detail::fmt(r.confidence) << "\n"
    << "euler_steps = " << r.euler_steps << "\n"
    << "euler_truncated = " << (r.euler_truncated ? "true" : "false") << "\n"
    << "omega_steps = " << r.omega_steps << "\n";
  return o.str();
}

/// FNV-1a 64 of the canonical text, as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_config_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mmcomp
