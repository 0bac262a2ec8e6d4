#include "lcefem/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lcefem/mesh.hpp"

namespace lce {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
    throw std::invalid_argument("config: " + key + ": not a number: '" + v + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw std::invalid_argument("config: " + key + ": not an integer: '" + v + "'");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  if (items.size() == 1 && items[0].empty()) items.clear();
  return items;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
  return out;
}

std::array<double, 2> parse_pair(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text);
  if (v.size() != 2) throw std::invalid_argument("config: " + key + ": expected two values");
  return {v[0], v[1]};
}

// Shortest representation that reads back to the same double.
std::string fmt(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

LinearSolverKind parse_solver_kind(const std::string& text) {
  const std::string v = trim(text);
  if (v == "sparselu") return LinearSolverKind::SparseLU;
  if (v == "umfpack") return LinearSolverKind::Umfpack;
  throw std::invalid_argument("config: linear_solver: expected sparselu or umfpack, got '" + v + "'");
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  MaterialParams& m = c.material;
  SolverConfig& s = c.solver;
  if (key == "a") m.a = parse_double(key, value);
  else if (key == "b") m.b = parse_double(key, value);
  else if (key == "ar_n") m.ar_n = parse_double(key, value);
  else if (key == "M") m.M = parse_double(key, value);
  else if (key == "dt") m.dt = parse_double(key, value);
  else if (key == "f") m.f = parse_pair(key, value);
  else if (key == "g") m.g = parse_pair(key, value);
  else if (key == "newton_abs_tol") s.newton_abs_tol = parse_double(key, value);
  else if (key == "newton_max_iter") s.newton_max_iter = parse_int(key, value);
  else if (key == "dt_min") s.dt_min = parse_double(key, value);
  else if (key == "unit_tol") s.unit_tol = parse_double(key, value);
  else if (key == "linear_solver") s.linear_solver = parse_solver_kind(value);
  else if (key == "h") c.h = parse_mesh_size(value);
  else if (key == "ladder") {
    c.ladder.clear();
    for (const auto& item : split_list(value)) c.ladder.push_back(parse_mesh_size(item));
  } else if (key == "dump_stretches") c.dump_stretches = parse_list(key, value);
  else if (key == "out") c.out = trim(value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

std::pair<std::string, std::string> split_assignment(const std::string& line, int lineno) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("config: line " + std::to_string(lineno) + ": expected key = value");
  }
  std::string key = trim(line.substr(0, eq));
  if (key.empty()) {
    throw std::invalid_argument("config: line " + std::to_string(lineno) + ": empty key");
  }
  return {key, line.substr(eq + 1)};
}

}  // namespace

bool operator==(const RunConfig& x, const RunConfig& y) {
  const MaterialParams& a = x.material;
  const MaterialParams& b = y.material;
  const SolverConfig& s = x.solver;
  const SolverConfig& t = y.solver;
  return a.a == b.a && a.b == b.b && a.ar_n == b.ar_n && a.M == b.M && a.dt == b.dt &&
         a.f == b.f && a.g == b.g && s.newton_abs_tol == t.newton_abs_tol &&
         s.newton_max_iter == t.newton_max_iter && s.dt_min == t.dt_min &&
         s.unit_tol == t.unit_tol && s.linear_solver == t.linear_solver && x.h == y.h &&
         x.ladder == y.ladder && x.dump_stretches == y.dump_stretches && x.out == y.out;
}

double parse_mesh_size(const std::string& text) {
  const std::string v = trim(text);
  if (v.rfind("2^", 0) == 0) {
    const int k = parse_int("mesh size", v.substr(2));
    return std::ldexp(1.0, k);
  }
  return parse_double("mesh size", v);
}

RunConfig parse_config(std::istream& is) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto [key, value] = split_assignment(body, lineno);
    set_key(c, key, value);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  return parse_config(in);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto [key, value] = split_assignment(assignment, 0);
  set_key(config, key, value);
}

void write_config(std::ostream& os, const RunConfig& c) {
  const MaterialParams& m = c.material;
  const SolverConfig& s = c.solver;
  os << "# material\n"
     << "a = " << fmt(m.a) << '\n'
     << "b = " << fmt(m.b) << '\n'
     << "ar_n = " << fmt(m.ar_n) << '\n'
     << "M = " << fmt(m.M) << '\n'
     << "dt = " << fmt(m.dt) << '\n'
     << "f = " << fmt(m.f[0]) << ", " << fmt(m.f[1]) << '\n'
     << "g = " << fmt(m.g[0]) << ", " << fmt(m.g[1]) << '\n'
     << "# solver\n"
     << "newton_abs_tol = " << fmt(s.newton_abs_tol) << '\n'
     << "newton_max_iter = " << s.newton_max_iter << '\n'
     << "dt_min = " << fmt(s.dt_min) << '\n'
     << "unit_tol = " << fmt(s.unit_tol) << '\n'
     << "linear_solver = "
     << (s.linear_solver == LinearSolverKind::SparseLU ? "sparselu" : "umfpack") << '\n'
     << "# meshes and outputs\n"
     << "h = " << fmt(c.h) << '\n'
     << "ladder = " << fmt_list(c.ladder) << '\n'
     << "dump_stretches = " << fmt_list(c.dump_stretches) << '\n'
     << "out = " << c.out << '\n';
}

void validate(const RunConfig& c) {
  validate(c.material);
  validate(c.solver, c.material);
  validate(MeshParams{c.h, c.material.ar()});
  for (double h : c.ladder) {
    try {
      validate(MeshParams{h, c.material.ar()});
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("config: ladder entry " + fmt(h) + " is not a power of two");
    }
  }
  for (std::size_t i = 1; i < c.ladder.size(); ++i) {
    if (!(c.ladder[i] < c.ladder[i - 1])) {
      throw std::invalid_argument("config: ladder must be sorted in strictly descending order");
    }
  }
  for (double s : c.dump_stretches) stretch_to_t(s, c.material);
  if (c.out.empty()) throw std::invalid_argument("config: out must not be empty");
}

double stretch_to_t(double s, const MaterialParams& params) {
  if (!(params.M > 0.0)) {
    if (s == 1.0) return 0.0;
    throw std::invalid_argument("config: stretch " + fmt(s) + " unreachable with M = 0");
  }
  const double t = (s - 1.0) / params.M;
  if (t < -1e-12 || t > 1.0 + 1e-12) {
    throw std::invalid_argument("config: stretch " + fmt(s) + " lies outside [1, 1 + M]");
  }
  return std::clamp(t, 0.0, 1.0);
}

}  // namespace lce
