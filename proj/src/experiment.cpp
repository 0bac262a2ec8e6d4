#include "lcefem/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "lcefem/analytic_suite.hpp"
#include "lcefem/io.hpp"

namespace lce {

namespace fs = std::filesystem;

namespace {

// Dense diagnostics beyond this many free unknowns need several GB.
constexpr int kMaxDenseFree = 4000;

std::string mesh_label(double h) {
  int e = 0;
  std::frexp(h, &e);
  return "2^" + std::to_string(e - 1);
}

void prepare_outputs(const fs::path& dir, const std::vector<std::string>& names,
                     const CommandOptions& opts) {
  if (!opts.force && !opts.resume) {
    for (const auto& n : names) {
      if (fs::exists(dir / n)) {
        throw OutputExists("output exists: " + (dir / n).string() + " (use --force to overwrite)");
      }
    }
  }
  fs::create_directories(dir);
}

void write_resolved(const fs::path& dir, const RunConfig& config) {
  atomic_write(dir / "resolved.cfg", [&](std::ostream& os) { write_config(os, config); });
}

std::string cache_key(const RunConfig& config, double h) {
  RunConfig c;
  c.material = config.material;
  c.solver = config.solver;
  c.h = h;
  c.ladder.clear();
  c.dump_stretches.clear();
  std::ostringstream os;
  write_config(os, c);
  std::string key = os.str();
  key.erase(key.rfind("out = "));  // output location does not affect the state
  return key;
}

void log_record(std::ostream& log, double h, const TrajectoryRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "h=%s t=%.4f strain=%.4f stress=%.6f newton=%d\n",
                mesh_label(h).c_str(), r.t, r.strain, r.nominal_stress, r.newton_iterations);
  log << buf;
}

}  // namespace

std::vector<double> truncate_ladder(const std::vector<double>& ladder, double h) {
  std::vector<double> out;
  for (double x : ladder) {
    out.push_back(x);
    if (x == h) return out;
  }
  throw std::invalid_argument("--h " + mesh_label(h) + " is not on the ladder");
}

std::string stretch_label(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", s);
  return buf;
}

const TrajectoryRecord& record_at(const Trajectory& traj, double t, double dt) {
  const TrajectoryRecord* best = nullptr;
  for (const auto& r : traj.records) {
    if (!best || std::abs(r.t - t) < std::abs(best->t - t)) best = &r;
  }
  if (!best || std::abs(best->t - t) > 0.5 * dt + 1e-12) {
    throw std::out_of_range("no trajectory record near t = " + std::to_string(t));
  }
  return *best;
}

FieldState final_state(const RunConfig& config, const Spaces& spaces, bool resume,
                       std::ostream& log) {
  const double h = spaces.mesh->h();
  const fs::path cache = fs::path(config.out) / "cache" / ("final_h" + mesh_label(h) + ".state");
  const std::string key = cache_key(config, h);
  if (resume) {
    if (auto s = load_state(cache, key)) {
      check_state(*s, spaces);
      log << "h=" << mesh_label(h) << " final state loaded from " << cache.string() << '\n';
      return *s;
    }
  }
  Trajectory traj = continuation_run(config.material, config.solver, spaces,
                                     [&](const TrajectoryRecord& r) {
                                       if (std::abs(r.t - std::round(r.t * 10) / 10) < 1e-9) {
                                         log_record(log, h, r);
                                       }
                                     });
  fs::create_directories(cache.parent_path());
  save_state(cache, traj.records.back().state, key);
  return traj.records.back().state;
}

// ----------------------------------------------------------------- commands

int cmd_run(const RunConfig& config, const CommandOptions& opts, std::ostream& log) {
  validate(config);
  const fs::path dir(config.out);
  std::vector<std::string> names{"stress_strain.csv", "resolved.cfg"};
  for (double s : config.dump_stretches) {
    names.push_back("director_s" + stretch_label(s) + ".txt");
    names.push_back("energy_s" + stretch_label(s) + ".txt");
  }
  prepare_outputs(dir, names, opts);
  write_resolved(dir, config);

  const auto sp = make_spaces({config.h, config.material.ar()});
  log << "run: h=" << mesh_label(config.h) << " free unknowns " << sp->dofs.num_free() << '\n';
  Trajectory traj;
  int code = kExitOk;
  try {
    continuation_run(config.material, config.solver, *sp, [&](const TrajectoryRecord& r) {
      log_record(log, config.h, r);
      traj.records.push_back(r);
    });
  } catch (const SolverError& e) {
    log << "run: failed at t=" << e.t() << ": " << e.what() << '\n';
    code = kExitFailure;
  }
  atomic_write(dir / "stress_strain.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  for (double s : config.dump_stretches) {
    const double t = stretch_to_t(s, config.material);
    const TrajectoryRecord* rec = nullptr;
    try {
      rec = &record_at(traj, t, config.material.dt);
    } catch (const std::out_of_range&) {
      continue;  // not reached before a failure
    }
    atomic_write(dir / ("director_s" + stretch_label(s) + ".txt"),
                 [&](std::ostream& os) { write_director_field(os, sp->n, rec->state.n); });
    const auto density = nodal_btw_density(rec->state, config.material, *sp);
    atomic_write(dir / ("energy_s" + stretch_label(s) + ".txt"),
                 [&](std::ostream& os) { write_nodal_field(os, sp->p, density); });
  }
  return code;
}

int cmd_convergence(const RunConfig& config, const CommandOptions& opts, std::ostream& log) {
  validate(config);
  if (config.ladder.size() < 2) {
    throw std::invalid_argument("convergence: the ladder needs at least two mesh sizes");
  }
  const fs::path dir(config.out);
  prepare_outputs(dir, {"errors.csv", "rates.csv", "resolved.cfg"}, opts);
  write_resolved(dir, config);

  std::vector<std::shared_ptr<const Spaces>> spaces;
  std::vector<FieldState> finals;
  std::vector<ErrorRow> rows;
  int code = kExitOk;
  for (double h : config.ladder) {
    auto sp = make_spaces({h, config.material.ar()});
    log << "convergence: h=" << mesh_label(h) << " free unknowns " << sp->dofs.num_free() << '\n';
    try {
      finals.push_back(final_state(config, *sp, opts.resume, log));
    } catch (const SolverError& e) {
      log << "convergence: h=" << mesh_label(h) << " failed at t=" << e.t() << ": " << e.what()
          << '\n';
      code = kExitFailure;
      break;
    }
    spaces.push_back(std::move(sp));
    const std::size_t k = finals.size();
    if (k >= 2) rows.push_back(error_table(*spaces[k - 2], finals[k - 2], *spaces[k - 1], finals[k - 1]));
  }
  atomic_write(dir / "errors.csv", [&](std::ostream& os) { write_errors_csv(os, rows); });
  std::vector<RateRow> rates;
  try {
    rates = convergence_rates(rows);
  } catch (const std::domain_error& e) {
    log << "convergence: " << e.what() << '\n';
    code = kExitFailure;
  }
  atomic_write(dir / "rates.csv", [&](std::ostream& os) { write_rates_csv(os, rates); });
  return code;
}

int cmd_infsup(const RunConfig& config, const CommandOptions& opts, std::ostream& log) {
  validate(config);
  if (config.ladder.empty()) throw std::invalid_argument("infsup: the ladder is empty");
  std::vector<std::shared_ptr<const Spaces>> spaces;
  for (double h : config.ladder) {
    auto sp = make_spaces({h, config.material.ar()});
    if (sp->dofs.num_free() > kMaxDenseFree) {
      throw std::invalid_argument("infsup: h=" + mesh_label(h) + " has " +
                                  std::to_string(sp->dofs.num_free()) +
                                  " free unknowns, too many for dense diagnostics");
    }
    spaces.push_back(std::move(sp));
  }
  const fs::path dir(config.out);
  prepare_outputs(dir, {"infsup_t0.csv", "infsup_t1.csv", "resolved.cfg"}, opts);
  write_resolved(dir, config);

  std::vector<InfSupReport> r0, r1;
  int code = kExitOk;
  for (const auto& sp : spaces) {
    const double h = sp->mesh->h();
    FieldState s0 = stress_free_field_state(*sp, config.material);
    r0.push_back(infsup_report(s0, config.material, *sp));
    log << "infsup: h=" << mesh_label(h) << " t=0 b1=" << r0.back().beta_b1
        << " b2=" << r0.back().beta_b2 << '\n';
    try {
      const FieldState s1 = final_state(config, *sp, opts.resume, log);
      r1.push_back(infsup_report(s1, config.material, *sp));
      log << "infsup: h=" << mesh_label(h) << " t=1 b1=" << r1.back().beta_b1
          << " b2=" << r1.back().beta_b2 << '\n';
    } catch (const SolverError& e) {
      log << "infsup: h=" << mesh_label(h) << " failed at t=" << e.t() << ": " << e.what() << '\n';
      code = kExitFailure;
    }
  }
  atomic_write(dir / "infsup_t0.csv", [&](std::ostream& os) { write_infsup_csv(os, r0); });
  atomic_write(dir / "infsup_t1.csv", [&](std::ostream& os) { write_infsup_csv(os, r1); });
  return code;
}

int cmd_verify_analytic(const RunConfig& config, const CommandOptions& opts, std::ostream& log) {
  validate(config.material);
  const fs::path dir(config.out);
  prepare_outputs(dir, {"analytic_report.txt", "resolved.cfg"}, opts);
  write_resolved(dir, config);
  const AnalyticReport report = run_analytic_suites();
  print_report(log, report);
  atomic_write(dir / "analytic_report.txt", [&](std::ostream& os) { print_report(os, report); });
  return report.passed() ? kExitOk : kExitFailure;
}

// ----------------------------------------------------------------- analysis

double stress_at_strain(const Trajectory& traj, double strain) {
  const auto& r = traj.records;
  if (r.empty()) throw std::out_of_range("stress_at_strain: empty trajectory");
  if (strain < r.front().strain - 1e-12 || strain > r.back().strain + 1e-12) {
    throw std::out_of_range("stress_at_strain: strain outside the trajectory");
  }
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (strain <= r[i].strain + 1e-12) {
      const double w = (strain - r[i - 1].strain) / (r[i].strain - r[i - 1].strain);
      return (1.0 - w) * r[i - 1].nominal_stress + w * r[i].nominal_stress;
    }
  }
  return r.back().nominal_stress;
}

double mean_slope(const Trajectory& traj, double lo, double hi) {
  return (stress_at_strain(traj, hi) - stress_at_strain(traj, lo)) / (hi - lo);
}

double max_stress_drop(const Trajectory& traj) {
  double peak = -INFINITY;
  double drop = 0.0;
  for (const auto& r : traj.records) {
    peak = std::max(peak, r.nominal_stress);
    drop = std::max(drop, peak - r.nominal_stress);
  }
  return drop;
}

double director_fraction(const FieldState& s, const Spaces& sp, double threshold) {
  const auto& tags = sp.n.node_tags();
  int interior = 0, hits = 0;
  for (std::size_t k = 0; k < tags.size(); ++k) {
    if (tags[k] != 0) continue;
    ++interior;
    if (std::abs(s.n[sp.n.dof(static_cast<int>(k), 0)]) > threshold) ++hits;
  }
  return interior ? static_cast<double>(hits) / interior : 0.0;
}

}  // namespace lce
