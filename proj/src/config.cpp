#include "fsi/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

using Scalar = std::variant<double, std::string, bool>;
struct Value {
  std::vector<Scalar> items;
  bool is_array = false;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

Scalar parse_scalar(const std::string& tok, const std::string& origin, int line) {
  if (tok.empty()) parse_fail(origin, line, "missing value");
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"') parse_fail(origin, line, "unterminated string");
    return tok.substr(1, tok.size() - 2);
  }
  if (tok == "true") return true;
  if (tok == "false") return false;
  std::string num;
  for (char c : tok) {
    if (c != '_') num += c;
  }
  double v = 0.0;
  const char* first = num.data();
  if (!num.empty() && num.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, num.data() + num.size(), v);
  if (ec != std::errc() || ptr != num.data() + num.size()) {
    parse_fail(origin, line, "cannot parse value '" + tok + "'");
  }
  return v;
}

std::map<std::string, Value> parse_document(const std::string& text, const std::string& origin) {
  std::map<std::string, Value> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) parse_fail(origin, line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string rhs = trim(s.substr(eq + 1));
    if (key.empty()) parse_fail(origin, line, "empty key");
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
        parse_fail(origin, line, "invalid key '" + key + "'");
      }
    }
    if (out.count(key)) parse_fail(origin, line, "duplicate key '" + key + "'");
    Value v;
    v.line = line;
    if (!rhs.empty() && rhs.front() == '[') {
      if (rhs.back() != ']') parse_fail(origin, line, "unterminated array");
      v.is_array = true;
      std::stringstream items(rhs.substr(1, rhs.size() - 2));
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        v.items.push_back(parse_scalar(item, origin, line));
      }
    } else {
      v.items.push_back(parse_scalar(rhs, origin, line));
    }
    out.emplace(key, std::move(v));
  }
  return out;
}

class Reader {
public:
  Reader(std::map<std::string, Value> doc, std::string origin)
      : doc_(std::move(doc)), origin_(std::move(origin)) {}

  void number(const std::string& key, double& target) {
    if (const Value* v = take(key)) target = as_number(key, *v, single(key, *v));
  }
  void integer(const std::string& key, int& target) {
    if (const Value* v = take(key)) target = as_int(key, *v, single(key, *v));
  }
  void boolean(const std::string& key, bool& target) {
    if (const Value* v = take(key)) {
      const Scalar& s = single(key, *v);
      if (!std::holds_alternative<bool>(s)) fail(key, *v, "expected true or false");
      target = std::get<bool>(s);
    }
  }
  void choice(const std::string& key, const std::map<std::string, std::function<void()>>& options) {
    const Value* v = take(key);
    if (!v) return;
    const Scalar& s = single(key, *v);
    if (!std::holds_alternative<std::string>(s)) fail(key, *v, "expected a string");
    const auto it = options.find(std::get<std::string>(s));
    if (it == options.end()) {
      std::string names;
      for (const auto& [name, _] : options) names += (names.empty() ? "" : ", ") + name;
      fail(key, *v, "expected one of " + names);
    }
    it->second();
  }
  void numbers(const std::string& key, std::vector<double>& target) {
    if (const Value* v = take(key)) {
      target.clear();
      for (const auto& s : v->items) target.push_back(as_number(key, *v, s));
    }
  }
  void integers(const std::string& key, std::vector<int>& target) {
    if (const Value* v = take(key)) {
      target.clear();
      for (const auto& s : v->items) target.push_back(as_int(key, *v, s));
    }
  }
  bool has(const std::string& key) const { return doc_.count(key) > 0; }

  void reject_unknown() const {
    for (const auto& [key, v] : doc_) {
      if (!used_.count(key)) parse_fail(origin_, v.line, "unknown key '" + key + "'");
    }
  }

private:
  const Value* take(const std::string& key) {
    used_.insert({key, true});
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &it->second;
  }
  [[noreturn]] void fail(const std::string& key, const Value& v, const std::string& msg) const {
    parse_fail(origin_, v.line, key + ": " + msg);
  }
  const Scalar& single(const std::string& key, const Value& v) const {
    if (v.is_array || v.items.size() != 1) fail(key, v, "expected a single value");
    return v.items.front();
  }
  double as_number(const std::string& key, const Value& v, const Scalar& s) const {
    if (!std::holds_alternative<double>(s)) fail(key, v, "expected a number");
    return std::get<double>(s);
  }
  int as_int(const std::string& key, const Value& v, const Scalar& s) const {
    const double d = as_number(key, v, s);
    if (d != static_cast<double>(static_cast<int>(d))) fail(key, v, "expected an integer");
    return static_cast<int>(d);
  }

  std::map<std::string, Value> doc_;
  std::string origin_;
  std::map<std::string, bool> used_;
};

}  // namespace

void ExperimentSpec::validate() const {
  auto ladder = [](const std::vector<int>& nx, const std::vector<int>& ny, const char* key) {
    if (nx.empty()) throw ConfigError(std::string(key) + ": must not be empty");
    if (nx.size() != ny.size()) throw ConfigError(std::string(key) + ": nx and ny lists differ in length");
    for (size_t i = 0; i < nx.size(); ++i) {
      if (nx[i] < 2 || ny[i] < 1) throw ConfigError(std::string(key) + ": invalid mesh size");
    }
  };
  for (double t : snapshot_times) {
    if (!(t >= 0.0)) throw ConfigError("snapshot_times: must be nonnegative");
  }
  if (vtk_every < 0) throw ConfigError("vtk_every: must be nonnegative");
  ladder(audit_nx, audit_ny, "audit_nx");
  if (!(audit_tolerance > 0.0)) throw ConfigError("audit_tolerance: must be positive");
  if (kind != ExperimentKind::convergence_matrix) return;

  ladder(spatial_nx, spatial_ny, "spatial_nx");
  for (size_t i = 0; i + 1 < spatial_nx.size(); ++i) {
    if (spatial_nx[i + 1] <= spatial_nx[i]) throw ConfigError("spatial_nx: must be strictly refining");
  }
  for (size_t i = 0; i < spatial_nx.size(); ++i) {
    if (reference_nx % spatial_nx[i] || reference_ny % spatial_ny[i] ||
        reference_nx == spatial_nx[i]) {
      throw ConfigError("reference_nx: the reference mesh must strictly refine every ladder mesh");
    }
  }
  if (!(spatial_tau > 0.0)) throw ConfigError("spatial_tau: must be positive");
  if (temporal_tau.empty()) throw ConfigError("temporal_tau: must not be empty");
  for (size_t i = 0; i < temporal_tau.size(); ++i) {
    const double r = temporal_tau[i] / reference_tau;
    if (!(reference_tau > 0.0) || std::abs(r - std::round(r)) > 1e-9 * r || std::round(r) < 2) {
      throw ConfigError("reference_tau: must divide every entry of temporal_tau and be smaller");
    }
    if (i + 1 < temporal_tau.size() && !(temporal_tau[i + 1] < temporal_tau[i])) {
      throw ConfigError("temporal_tau: must be strictly refining");
    }
  }
  if (temporal_nx < 2 || temporal_ny < 1) throw ConfigError("temporal_nx: invalid mesh size");
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::single_run: return "single_run";
    case ExperimentKind::energy_audit: return "energy_audit";
    case ExperimentKind::convergence_matrix: return "convergence_matrix";
  }
  return "?";
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  Reader r(parse_document(text, origin), origin);
  RunConfig cfg;
  cfg.source = text;
  SchemeConfig& s = cfg.scheme;
  ExperimentSpec& e = cfg.experiment;

  r.choice("experiment", {{"single_run", [&] { e.kind = ExperimentKind::single_run; }},
                          {"energy_audit", [&] { e.kind = ExperimentKind::energy_audit; }},
                          {"convergence_matrix", [&] { e.kind = ExperimentKind::convergence_matrix; }}});
  r.number("mu", s.physics.mu);
  r.number("rho_f", s.physics.rho_f);
  r.number("rho_s", s.physics.rho_s);
  r.number("gamma1", s.physics.gamma1);
  r.number("gamma2", s.physics.gamma2);
  r.number("length", s.length);
  r.integer("nx", s.nx);
  r.integer("ny", s.ny);
  r.choice("lateral", {{"periodic", [&] { s.lateral = LateralMode::periodic; }},
                       {"clamped", [&] { s.lateral = LateralMode::clamped; }}});
  if (!r.has("tau")) throw ConfigError(origin + ": tau: required key is missing");
  r.number("tau", s.tau);
  r.number("final_time", s.final_time);
  r.choice("forcing", {{"none", [&] { s.forcing.kind = ForcingKind::none; }},
                       {"pulse", [&] { s.forcing.kind = ForcingKind::pulse; }}});
  r.number("force_amplitude", s.forcing.amplitude);
  r.number("force_off", s.forcing.switch_off);
  r.choice("force_sampling", {{"left", [&] { s.sampling = ForceSampling::left; }},
                              {"right", [&] { s.sampling = ForceSampling::right; }}});
  r.choice("initial", {{"rest", [&] { s.initial = InitialKind::rest; }},
                       {"cosine", [&] { s.initial = InitialKind::cosine; }}});
  r.number("initial_amplitude", s.initial_amplitude);
  r.number("eta_floor", s.eta_floor);
  r.choice("solver", {{"direct", [&] { s.solver.kind = SolverKind::direct; }},
                      {"iterative", [&] { s.solver.kind = SolverKind::iterative; }}});
  r.number("solver_tol", s.solver.tol);
  r.integer("solver_max_iterations", s.solver.max_iterations);
  r.integer("quad_degree", s.quad_degree);
  r.choice("interface", {{"penalty", [&] { s.top = TopCondition::penalty; }},
                         {"strong", [&] { s.top = TopCondition::strong; }}});
  r.boolean("check_divergence", s.check_divergence);

  r.numbers("snapshot_times", e.snapshot_times);
  r.integer("vtk_every", e.vtk_every);
  r.integers("audit_nx", e.audit_nx);
  if (r.has("audit_nx") && !r.has("audit_ny")) {
    e.audit_ny.clear();
    for (int n : e.audit_nx) e.audit_ny.push_back(std::max(1, n / 2));
  }
  r.integers("audit_ny", e.audit_ny);
  r.number("audit_tolerance", e.audit_tolerance);
  r.integers("spatial_nx", e.spatial_nx);
  if (r.has("spatial_nx") && !r.has("spatial_ny")) {
    e.spatial_ny.clear();
    for (int n : e.spatial_nx) e.spatial_ny.push_back(std::max(1, n / 2));
  }
  r.integers("spatial_ny", e.spatial_ny);
  r.number("spatial_tau", e.spatial_tau);
  r.integer("reference_nx", e.reference_nx);
  r.integer("reference_ny", e.reference_ny);
  r.numbers("temporal_tau", e.temporal_tau);
  r.integer("temporal_nx", e.temporal_nx);
  r.integer("temporal_ny", e.temporal_ny);
  r.number("reference_tau", e.reference_tau);
  r.reject_unknown();

  s.validate();
  e.validate();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace fsi
