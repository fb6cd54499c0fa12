// impdelay: simulate impulsive delay systems, certify stability, analyze impulse schedules.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace cli = impdelay::cli;

int main(int argc, char** argv) {
  CLI::App app{"Impulsive delay systems: simulation, stability certificates, schedule analysis"};
  app.require_subcommand(1);

  cli::Tolerances tol;
  app.add_option("--tol", tol.bound, "relative tolerance of the envelope and final-bound checks")->capture_default_str();
  app.add_option("--dini-tol", tol.dini, "slack of the Dini-derivative rate check")->capture_default_str();
  app.add_option("--decay-tol", tol.decay, "largest accepted tail sup-norm ratio")->capture_default_str();

  cli::ExampleOptions ex;
  auto* example = app.add_subcommand("example", "run a preset end to end and write report and CSV files");
  example->add_option("name", ex.name, "ex1 | ex2-c1 | ex2-c2 | ex2-c3 | ex3")->required();
  example->add_option("-o,--out", ex.out_dir, "output directory")->capture_default_str();
  example->add_option("--step", ex.step, "base integration step")->capture_default_str();

  cli::CertifyOptions cert;
  auto* certify = app.add_subcommand("certify", "compute the stability certificate for params and a schedule");
  certify->add_option("--params", cert.params_file, "certificate params JSON")->required();
  certify->add_option("--schedule", cert.schedule_file, "schedule JSON")->required();
  certify->add_option("--horizon", cert.horizon, "end of the checked time span");
  certify->add_option("--t0", cert.t0, "initial time")->capture_default_str();

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "simulate a preset or a system file and write the trajectory CSV");
  simulate->add_option("--preset", sim.preset, "preset name");
  simulate->add_option("--system", sim.system_file, "system JSON");
  simulate->add_option("--schedule", sim.schedule_file, "schedule JSON (overrides the preset's)");
  simulate->add_option("--initial", sim.initial, "constant initial history, comma separated");
  simulate->add_option("--t-end", sim.t_end, "end time");
  simulate->add_option("--step", sim.step, "base integration step")->capture_default_str();
  simulate->add_option("--t0", sim.t0, "initial time")->capture_default_str();
  simulate->add_option("--stride", sim.stride, "keep every n-th continuous node")->capture_default_str();
  simulate->add_option("-o,--out", sim.out_file, "CSV file (default: stdout)");

  cli::ScheduleOptions sch;
  auto* schedule = app.add_subcommand("schedule", "window counts and dwell-time checks of an impulse schedule");
  schedule->add_option("--schedule", sch.schedule_file, "schedule JSON");
  schedule->add_option("--preset", sch.preset, "use a preset's schedule");
  schedule->add_option("--analysis", sch.analysis, "adt | reverse | windows")
      ->check(CLI::IsMember({"adt", "reverse", "windows"}))
      ->capture_default_str();
  schedule->add_option("--tau", sch.tau, "window length");
  schedule->add_option("--t-star", sch.t_star, "T*");
  schedule->add_option("--n-star", sch.n_star, "N*");
  schedule->add_option("--sigma", sch.sigma, "sigma for the window-count band");
  schedule->add_option("--params", sch.params_file, "certificate params JSON for the window-count band");
  schedule->add_option("--horizon", sch.horizon, "end of the analyzed time span");
  schedule->add_option("--t0", sch.t0, "start of the analyzed time span")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kInputError;
  }

  try {
    if (*example) {
      ex.tol = tol;
      return cli::cmd_example(ex, std::cout, std::cerr);
    }
    if (*certify) return cli::cmd_certify(cert, std::cout, std::cerr);
    if (*simulate) return cli::cmd_simulate(sim, std::cout, std::cerr);
    if (*schedule) return cli::cmd_schedule(sch, std::cout, std::cerr);
  } catch (const impdelay::DivergenceError& e) {
    std::cerr << "diverged: blow-up at t = " << cli::fmt(e.time()) << "\n";
    return cli::kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kInputError;
  }
  return cli::kInputError;
}
