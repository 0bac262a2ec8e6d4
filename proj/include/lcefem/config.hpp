#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lcefem/btw.hpp"
#include "lcefem/solver.hpp"

namespace lce {

/// Everything an experiment needs, read from a flat `key = value` file.
/// Lines starting with `#` are comments.  Lists are comma separated; mesh
/// sizes may be written as `0.0625` or `2^-4`.
struct RunConfig {
  MaterialParams material;
  SolverConfig solver;
  double h = 0.0625;  // mesh for `run`
  std::vector<double> ladder{0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> dump_stretches{1.10, 1.17, 1.22, 1.4};
  std::string out = "out";
};

bool operator==(const RunConfig& x, const RunConfig& y);

/// Throws std::invalid_argument naming the offending key or value.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Applies one `key=value` override on top of an existing config.
void apply_override(RunConfig& config, const std::string& assignment);

/// Writes every key so that parse_config reproduces the config exactly.
void write_config(std::ostream& os, const RunConfig& config);

/// Accepts a decimal number or `2^-k`.
double parse_mesh_size(const std::string& text);

/// Material, solver, mesh and ladder checks.  Ladder entries must be powers
/// of two sorted in descending order without repeats.
void validate(const RunConfig& config);

/// Continuation parameter at which the clamp elongation equals s.
double stretch_to_t(double s, const MaterialParams& params);

}  // namespace lce
