// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace selfsteer::commands {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct GenerateOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct RunOptions {
  std::filesystem::path scenes_dir;
  std::string pipeline = "ar";  // concat | ar | strong
  std::string motion = "cv";    // rw | cv
  std::string ssf = "oracle";   // oracle | coherence
  std::string ssf_mode;         // miso | mimo; defaults per pipeline
  std::filesystem::path out_prefix;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  std::size_t n_particles = 50;
  double sigma_rw = 0.035;  // rad/frame
  double sigma_cv = 3.33;   // rad/s^2
  double gamma = 2.0;
  double q0 = 0.1;
  double band_lo_hz = 200.0;
  double band_hi_hz = 2000.0;
  double resample_threshold = 0.5;
  double init_spread_theta_deg = 5.0;
  double init_spread_vel = 0.5;
  double beta = 2.0;
  double alpha = 0.6;
  double oracle_degrade = 0.0;
};

struct EvalOptions {
  std::vector<std::filesystem::path> results;  // *_scenes.csv paths or run prefixes
  std::filesystem::path report_path;
  std::filesystem::path regression_path;  // optional
};

struct SweepOptions {
  std::filesystem::path grid_path;
  std::filesystem::path out_path;
  RunOptions base;  // scenes dir, pipeline selection, seed
};

int cmd_generate(const GenerateOptions& opts);
int cmd_run(const RunOptions& opts);
int cmd_eval(const EvalOptions& opts);
int cmd_sweep(const SweepOptions& opts);
int cmd_calibrate(double v_target, double r, std::size_t frames, double dt);

}  // namespace selfsteer::commands
