#include "uip/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "uip/errors.hpp"

namespace uip {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& why) {
  std::ostringstream msg;
  if (line > 0) msg << "line " << line << ": ";
  msg << "key '" << key << "': " << why;
  throw Error(ErrorCode::Config, msg.str());
}

double to_double(const std::string& text, int line, const std::string& key) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) fail(line, key, "not a number: " + text);
  return v;
}

std::uint64_t to_u64(const std::string& text, int line, const std::string& key) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(line, key, "not a non-negative integer: " + text);
  }
  return v;
}

std::vector<double> to_list(const std::string& text, int line, const std::string& key) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(part, line, key));
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt_double(v[i]);
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, bool require_seed) {
  ExperimentConfig cfg;
  using Setter = std::function<void(const std::string&, int, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"model.d", [&](auto& v, int l, auto& k) { cfg.d = to_u64(v, l, k); }},
      {"model.s0", [&](auto& v, int l, auto& k) { cfg.s0 = to_list(v, l, k); }},
      {"model.mu", [&](auto& v, int l, auto& k) { cfg.mu = to_list(v, l, k); }},
      {"model.sigma", [&](auto& v, int l, auto& k) { cfg.sigma = to_list(v, l, k); }},
      {"model.T", [&](auto& v, int l, auto& k) { cfg.T = to_double(v, l, k); }},
      {"payoff.kind", [&](auto& v, int, auto&) { cfg.payoff_kind = v; }},
      {"payoff.a", [&](auto& v, int l, auto& k) { cfg.a = to_list(v, l, k); }},
      {"payoff.b", [&](auto& v, int l, auto& k) { cfg.b = to_double(v, l, k); }},
      {"impact.A", [&](auto& v, int l, auto& k) { cfg.A = to_double(v, l, k); }},
      {"impact.A_grid", [&](auto& v, int l, auto& k) { cfg.A_grid = to_list(v, l, k); }},
      {"impact.lambda", [&](auto& v, int l, auto& k) { cfg.lambdas = to_list(v, l, k); }},
      {"impact.phi0", [&](auto& v, int l, auto& k) { cfg.phi0 = to_list(v, l, k); }},
      {"numerics.n_paths", [&](auto& v, int l, auto& k) { cfg.n_paths = to_u64(v, l, k); }},
      {"numerics.n_steps",
       [&](auto& v, int l, auto& k) { cfg.n_steps = v == "auto" ? 0 : to_u64(v, l, k); }},
      {"numerics.quadrature", [&](auto& v, int, auto&) { cfg.quadrature = v; }},
      {"numerics.quad_m", [&](auto& v, int l, auto& k) { cfg.quad_m = static_cast<int>(to_u64(v, l, k)); }},
      {"numerics.fd_dt", [&](auto& v, int l, auto& k) { cfg.fd_dt = to_double(v, l, k); }},
      {"numerics.fd_dx_rel", [&](auto& v, int l, auto& k) { cfg.fd_dx_rel = to_double(v, l, k); }},
      {"numerics.seed", [&](auto& v, int l, auto& k) { cfg.seed = to_u64(v, l, k); }},
      {"numerics.workers", [&](auto& v, int l, auto& k) { cfg.workers = static_cast<int>(to_u64(v, l, k)); }},
      {"price.t", [&](auto& v, int l, auto& k) { cfg.price_t = to_double(v, l, k); }},
      {"price.x",
       [&](auto& v, int l, auto& k) {
         cfg.price_points.clear();
         for (const auto& point : split(v, ';')) cfg.price_points.push_back(to_list(point, l, k));
       }},
      {"dual.specs", [&](auto& v, int, auto&) { cfg.dual_specs = split(v, ','); }},
      {"dual.constant", [&](auto& v, int l, auto& k) { cfg.dual_constant = to_list(v, l, k); }},
      {"output.csv", [&](auto& v, int, auto&) { cfg.csv = v; }},
      {"output.precision",
       [&](auto& v, int l, auto& k) { cfg.precision = static_cast<int>(to_u64(v, l, k)); }},
  };

  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, line, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) fail(line_no, key, "unknown key");
    if (!seen.insert(key).second) fail(line_no, key, "duplicate key");
    it->second(value, line_no, key);
  }
  if (require_seed && !seen.count("numerics.seed")) fail(0, "numerics.seed", "a seed is required");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "model.d = " << cfg.d << "\n";
  out << "model.s0 = " << fmt_list(cfg.s0) << "\n";
  out << "model.mu = " << fmt_list(cfg.mu) << "\n";
  out << "model.sigma = " << fmt_list(cfg.sigma) << "\n";
  out << "model.T = " << fmt_double(cfg.T) << "\n";
  out << "payoff.kind = " << cfg.payoff_kind << "\n";
  out << "payoff.a = " << fmt_list(cfg.a) << "\n";
  out << "payoff.b = " << fmt_double(cfg.b) << "\n";
  out << "impact.A = " << fmt_double(cfg.A) << "\n";
  out << "impact.A_grid = " << fmt_list(cfg.A_grid) << "\n";
  out << "impact.lambda = " << fmt_list(cfg.lambdas) << "\n";
  out << "impact.phi0 = " << fmt_list(cfg.phi0) << "\n";
  out << "numerics.n_paths = " << cfg.n_paths << "\n";
  out << "numerics.n_steps = " << (cfg.n_steps == 0 ? std::string("auto") : std::to_string(cfg.n_steps)) << "\n";
  out << "numerics.quadrature = " << cfg.quadrature << "\n";
  out << "numerics.quad_m = " << cfg.quad_m << "\n";
  out << "numerics.fd_dt = " << fmt_double(cfg.fd_dt) << "\n";
  out << "numerics.fd_dx_rel = " << fmt_double(cfg.fd_dx_rel) << "\n";
  out << "numerics.seed = " << cfg.seed << "\n";
  out << "numerics.workers = " << cfg.workers << "\n";
  out << "price.t = " << fmt_double(cfg.price_t) << "\n";
  out << "price.x = ";
  for (std::size_t i = 0; i < cfg.price_points.size(); ++i) out << (i ? "; " : "") << fmt_list(cfg.price_points[i]);
  out << "\n";
  out << "dual.specs = ";
  for (std::size_t i = 0; i < cfg.dual_specs.size(); ++i) out << (i ? ", " : "") << cfg.dual_specs[i];
  out << "\n";
  out << "dual.constant = " << fmt_list(cfg.dual_constant) << "\n";
  if (!cfg.csv.empty()) out << "output.csv = " << cfg.csv << "\n";
  out << "output.precision = " << cfg.precision << "\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // Results do not depend on the worker count, so neither does the hash.
  ExperimentConfig canonical = cfg;
  canonical.workers = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : emit_config(canonical)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void validate(const ExperimentConfig& cfg) {
  const std::size_t d = cfg.d;
  if (d == 0) fail(0, "model.d", "dimension must be >= 1");
  if (cfg.s0.size() != d) fail(0, "model.s0", "expected " + std::to_string(d) + " values");
  if (cfg.mu.size() != d) fail(0, "model.mu", "expected " + std::to_string(d) + " values");
  if (cfg.sigma.size() != d * d) fail(0, "model.sigma", "expected " + std::to_string(d * d) + " values");
  if (!(cfg.T > 0.0)) fail(0, "model.T", "must be positive");
  static const std::set<std::string> kinds = {"basket_call", "basket_call_generic", "zero", "straddle"};
  if (!kinds.count(cfg.payoff_kind)) fail(0, "payoff.kind", "unknown payoff " + cfg.payoff_kind);
  if (cfg.payoff_kind != "zero" && cfg.a.size() != d) fail(0, "payoff.a", "expected " + std::to_string(d) + " values");
  if (!(cfg.A > 0.0)) fail(0, "impact.A", "must be positive");
  for (double a : cfg.A_grid)
    if (!(a > 0.0)) fail(0, "impact.A_grid", "entries must be positive");
  if (cfg.lambdas.empty()) fail(0, "impact.lambda", "needs at least one value");
  for (double l : cfg.lambdas)
    if (!(l > 0.0)) fail(0, "impact.lambda", "entries must be positive");
  if (cfg.phi0.size() != d) fail(0, "impact.phi0", "expected " + std::to_string(d) + " values");
  if (cfg.n_paths == 0) fail(0, "numerics.n_paths", "must be >= 1");
  static const std::set<std::string> rules = {"default", "composite", "hermite"};
  if (!rules.count(cfg.quadrature)) fail(0, "numerics.quadrature", "unknown rule " + cfg.quadrature);
  if (cfg.quad_m < 2) fail(0, "numerics.quad_m", "must be >= 2");
  if (!(cfg.fd_dt > 0.0)) fail(0, "numerics.fd_dt", "must be positive");
  if (!(cfg.fd_dx_rel > 0.0)) fail(0, "numerics.fd_dx_rel", "must be positive");
  if (cfg.price_t < 0.0 || cfg.price_t > cfg.T) fail(0, "price.t", "must lie in [0, T]");
  for (const auto& p : cfg.price_points)
    if (p.size() != d) fail(0, "price.x", "each point needs " + std::to_string(d) + " coordinates");
  for (const auto& s : cfg.dual_specs) {
    if (s == "zero" || s == "optimal" || s == "constant") continue;
    if (s.rfind("random:", 0) == 0) {
      to_u64(s.substr(7), 0, "dual.specs");
      continue;
    }
    fail(0, "dual.specs", "unknown spec " + s);
  }
  if (cfg.dual_constant.size() != d) fail(0, "dual.constant", "expected " + std::to_string(d) + " values");
  if (cfg.precision < 1 || cfg.precision > 17) fail(0, "output.precision", "must be in [1, 17]");
  // Module-level checks (NotSymmetric / NotPositiveDefinite surface here).
  build_model(cfg);
}

BachelierModel build_model(const ExperimentConfig& cfg) {
  Matrix sigma(cfg.d, cfg.d);
  for (std::size_t i = 0; i < cfg.d; ++i)
    for (std::size_t j = 0; j < cfg.d; ++j) sigma(i, j) = cfg.sigma[i * cfg.d + j];
  return BachelierModel::make(cfg.s0, cfg.mu, make_spd(sigma), cfg.T);
}

Payoff build_payoff(const ExperimentConfig& cfg) {
  if (cfg.payoff_kind == "zero") return Payoff::zero(cfg.d);
  if (cfg.payoff_kind == "basket_call_generic") return Payoff::generic_basket_call(cfg.a, cfg.b);
  if (cfg.payoff_kind == "straddle") {
    const RowVec a = cfg.a;
    const double b = cfg.b;
    return Payoff::generic([a, b](std::span<const double> x) { return std::abs(dot(a, x) + b); }, norm(a),
                           "straddle");
  }
  return Payoff::basket_call(cfg.a, cfg.b);
}

std::shared_ptr<const QuadratureRule> build_rule(const ExperimentConfig& cfg) {
  if (cfg.quadrature == "hermite") {
    return std::make_shared<const QuadratureRule>(build_gauss_hermite(cfg.quad_m, static_cast<int>(cfg.d)));
  }
  if (cfg.quadrature == "composite") return std::make_shared<const QuadratureRule>(default_rule(cfg.d));
  return nullptr;
}

Execution build_execution(const ExperimentConfig& cfg) { return Execution::openmp(cfg.workers); }

}  // namespace uip
