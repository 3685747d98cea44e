// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <CLI11.hpp>

#include "selfsteer/commands.hpp"

namespace cmd = selfsteer::commands;

int main(int argc, char** argv) {
  CLI::App app{"Self-steering target-speaker extraction testbed"};
  app.require_subcommand(1);

  // generate -----------------------------------------------------------------
  cmd::GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Synthesize moving-speaker scenes");
  generate->add_option("--config", gen.config_path, "Scene template JSON")
      ->required()
      ->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out_dir, "Output directory")->required();
  generate->add_option("--count", gen.count, "Number of scenes")->required();
  generate->add_option("--seed", gen.seed, "Dataset seed")->required();
  generate->add_option("--workers", gen.workers, "Worker threads");

  // run ----------------------------------------------------------------------
  cmd::RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a pipeline over generated scenes");
  run_cmd->add_option("--scenes", run.scenes_dir, "Scenes directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  run_cmd->add_option("--pipeline", run.pipeline, "concat | ar | strong")->required();
  run_cmd->add_option("--motion", run.motion, "Tracker transition: rw | cv");
  run_cmd->add_option("--ssf", run.ssf, "Mask implementation: oracle | coherence");
  run_cmd->add_option("--ssf-mode", run.ssf_mode, "miso | mimo (defaults per pipeline)");
  run_cmd->add_option("--out", run.out_prefix, "Output CSV prefix")->required();
  run_cmd->add_option("--seed", run.seed, "Run seed")->required();
  run_cmd->add_option("--workers", run.workers, "Worker threads");
  run_cmd->add_option("--n-particles", run.n_particles, "Particle count");
  run_cmd->add_option("--sigma-rw", run.sigma_rw, "RW step std, rad/frame");
  run_cmd->add_option("--sigma-cv", run.sigma_cv, "CV acceleration std, rad/s^2");
  run_cmd->add_option("--gamma", run.gamma, "Likelihood exponent");
  run_cmd->add_option("--q0", run.q0, "Likelihood floor fraction");
  run_cmd->add_option("--band-lo", run.band_lo_hz, "Likelihood band low edge, Hz");
  run_cmd->add_option("--band-hi", run.band_hi_hz, "Likelihood band high edge, Hz");
  run_cmd->add_option("--resample-threshold", run.resample_threshold,
                      "Conditional resampling ratio");
  run_cmd->add_option("--init-spread-theta", run.init_spread_theta_deg,
                      "Initial azimuth spread, deg");
  run_cmd->add_option("--init-spread-vel", run.init_spread_vel,
                      "Initial velocity spread, rad/s");
  run_cmd->add_option("--beta", run.beta, "Coherence mask sharpness");
  run_cmd->add_option("--alpha", run.alpha, "Coherence mask smoothing");
  run_cmd->add_option("--oracle-degrade", run.oracle_degrade,
                      "Fraction of mask bins passed through");

  // eval ---------------------------------------------------------------------
  cmd::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Summarize run CSVs into a report");
  eval_cmd->add_option("--results", eval.results, "Run prefixes or *_scenes.csv paths")
      ->required();
  eval_cmd->add_option("--report", eval.report_path, "Report output path");
  eval_cmd->add_option("--regression", eval.regression_path,
                       "Tracking-vs-enhancement scatter CSV");

  // sweep ----------------------------------------------------------------------
  cmd::SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Exhaustive parameter grid search");
  sweep_cmd->add_option("--grid", sweep.grid_path, "Grid JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--scenes", sweep.base.scenes_dir, "Scenes directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  sweep_cmd->add_option("--out", sweep.out_path, "Ranked table CSV")->required();
  sweep_cmd->add_option("--pipeline", sweep.base.pipeline, "concat | ar");
  sweep_cmd->add_option("--motion", sweep.base.motion, "rw | cv");
  sweep_cmd->add_option("--ssf", sweep.base.ssf, "oracle | coherence");
  sweep_cmd->add_option("--seed", sweep.base.seed, "Run seed")->required();
  sweep_cmd->add_option("--workers", sweep.base.workers, "Worker threads");

  // calibrate ------------------------------------------------------------------
  double cal_v = 1.5, cal_r = 2.0, cal_dt = 0.016;
  std::size_t cal_frames = 312;
  auto* cal_cmd =
      app.add_subcommand("calibrate", "Motion perturbation std for a target speed");
  cal_cmd->add_option("--speed", cal_v, "Target absolute speed, m/s");
  cal_cmd->add_option("--radius", cal_r, "Speaker distance, m");
  cal_cmd->add_option("--frames", cal_frames, "Trajectory length, frames");
  cal_cmd->add_option("--dt", cal_dt, "Frame period, s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? cmd::kExitOk : cmd::kExitUsage;
  }

  if (generate->parsed()) return cmd::cmd_generate(gen);
  if (run_cmd->parsed()) return cmd::cmd_run(run);
  if (eval_cmd->parsed()) return cmd::cmd_eval(eval);
  if (sweep_cmd->parsed()) return cmd::cmd_sweep(sweep);
  if (cal_cmd->parsed()) return cmd::cmd_calibrate(cal_v, cal_r, cal_frames, cal_dt);
  return cmd::kExitUsage;
}
