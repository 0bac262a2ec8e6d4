// Command-line driver for the clamped-pulling experiment.
//
//   lcefem run|convergence|infsup|verify-analytic --config <path>
//          [--out <dir>] [--h <val>] [--resume] [--force] [--set key=value]...
//
// Exit codes: 0 success, 1 solver or verification failure, 2 usage error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lcefem/config.hpp"
#include "lcefem/experiment.hpp"
#include "lcefem/kernels.hpp"

namespace {

struct Args {
  std::string config;
  std::string out;
  std::string h;
  std::vector<std::string> overrides;
  std::string backend;
  lce::CommandOptions opts;
};

void add_common(CLI::App* cmd, Args& args, bool config_required) {
  cmd->set_help_flag("--help", "print this help message and exit");  // -h would clash with --h
  auto* c = cmd->add_option("--config", args.config, "key = value configuration file");
  if (config_required) c->required();
  cmd->add_option("--out", args.out, "output directory (overrides `out`)");
  cmd->add_option("--h", args.h,
                  "mesh size, e.g. 2^-4; for ladder commands the finest ladder entry");
  cmd->add_option("--set", args.overrides, "extra key=value override, repeatable");
  cmd->add_flag("--resume", args.opts.resume, "reuse cached final states");
  cmd->add_flag("--force", args.opts.force, "overwrite existing outputs");
  cmd->add_option("--kernels", args.backend, "pointwise kernel backend: scalar or avx2");
}

lce::RunConfig resolve(const Args& args, bool ladder_command) {
  lce::RunConfig c = args.config.empty() ? lce::RunConfig{} : lce::load_config(args.config);
  for (const auto& o : args.overrides) lce::apply_override(c, o);
  if (!args.out.empty()) c.out = args.out;
  if (!args.h.empty()) {
    const double h = lce::parse_mesh_size(args.h);
    if (ladder_command) c.ladder = lce::truncate_ladder(c.ladder, h);
    else c.h = h;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed finite element solver for nematic elastomer pulling experiments"};
  app.require_subcommand(1);
  Args args;
  auto* run = app.add_subcommand("run", "continuation on one mesh with field dumps");
  auto* conv = app.add_subcommand("convergence", "error and rate tables over the mesh ladder");
  auto* infsup = app.add_subcommand("infsup", "inf-sup and ellipticity diagnostics at t = 0 and 1");
  auto* analytic = app.add_subcommand("verify-analytic", "closed-form property suites");
  add_common(run, args, true);
  add_common(conv, args, true);
  add_common(infsup, args, true);
  add_common(analytic, args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? lce::kExitOk : lce::kExitUsage;
  }

  try {
    if (!args.backend.empty()) {
      if (args.backend == "scalar") lce::kernels::set_backend(lce::kernels::Backend::Scalar);
      else if (args.backend == "avx2") lce::kernels::set_backend(lce::kernels::Backend::Avx2);
      else throw std::invalid_argument("--kernels: expected scalar or avx2");
    }
    const bool ladder = conv->parsed() || infsup->parsed();
    const lce::RunConfig config = resolve(args, ladder);
    std::clog << "kernels: " << lce::kernels::backend_name(lce::kernels::active_backend()) << '\n';
    if (run->parsed()) return lce::cmd_run(config, args.opts, std::clog);
    if (conv->parsed()) return lce::cmd_convergence(config, args.opts, std::clog);
    if (infsup->parsed()) return lce::cmd_infsup(config, args.opts, std::clog);
    return lce::cmd_verify_analytic(config, args.opts, std::cout);
  } catch (const lce::OutputExists& e) {
    std::cerr << "lcefem: " << e.what() << '\n';
    return lce::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "lcefem: invalid configuration: " << e.what() << '\n';
    return lce::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "lcefem: " << e.what() << '\n';
    return lce::kExitFailure;
  }
}
