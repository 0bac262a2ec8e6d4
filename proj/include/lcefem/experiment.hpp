#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcefem/config.hpp"
#include "lcefem/diagnostics.hpp"
#include "lcefem/solver.hpp"

namespace lce {

/// Exit codes shared by all subcommands.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Raised before any computation when an output file exists and overwriting
/// was not requested.
class OutputExists : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandOptions {
  bool force = false;   // overwrite existing outputs
  bool resume = false;  // reuse cached final states (implies overwrite)
};

/// Each command validates the config, writes `resolved.cfg` next to its
/// outputs and returns an ExitCode.  Invalid configs throw
/// std::invalid_argument; existing outputs throw OutputExists.  Solver
/// failures are reported on `log` and turn into kExitFailure.
int cmd_run(const RunConfig& config, const CommandOptions& opts, std::ostream& log);
int cmd_convergence(const RunConfig& config, const CommandOptions& opts, std::ostream& log);
int cmd_infsup(const RunConfig& config, const CommandOptions& opts, std::ostream& log);
int cmd_verify_analytic(const RunConfig& config, const CommandOptions& opts, std::ostream& log);

/// Ladder entries coarser than or equal to h.  Throws std::invalid_argument
/// when h is not on the ladder.
std::vector<double> truncate_ladder(const std::vector<double>& ladder, double h);

/// Label used in file names, e.g. 1.1 -> "1.10".
std::string stretch_label(double s);

/// Final continuation state on mesh h, read from the cache under `out` when
/// `resume` is set and the cached run used the same material and solver
/// settings, otherwise computed and cached.
FieldState final_state(const RunConfig& config, const Spaces& spaces, bool resume,
                       std::ostream& log);

/// Record whose t is closest to the target, within half a step.  Throws
/// std::out_of_range when none is.
const TrajectoryRecord& record_at(const Trajectory& traj, double t, double dt);

// ------------------------------------------------------------- analysis

/// Nominal stress along the recorded strains, linearly interpolated.
double stress_at_strain(const Trajectory& traj, double strain);

/// (stress(hi) - stress(lo)) / (hi - lo).
double mean_slope(const Trajectory& traj, double lo, double hi);

/// Largest drop of the nominal stress below its running maximum.
double max_stress_drop(const Trajectory& traj);

/// Share of interior P1 nodes (no boundary tag) with |n_x| > threshold.
double director_fraction(const FieldState& s, const Spaces& spaces, double threshold);

}  // namespace lce
