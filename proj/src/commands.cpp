// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "selfsteer/angles.hpp"
#include "selfsteer/metrics.hpp"
#include "selfsteer/pipeline.hpp"
#include "selfsteer/rng.hpp"
#include "selfsteer/scenario_io.hpp"
#include "selfsteer/scene.hpp"
#include "selfsteer/wav.hpp"

namespace selfsteer::commands {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// shared helpers

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n == 0 ? 1 : n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string fmt(double v, int precision = 4) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::vector<std::filesystem::path> list_scene_dirs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> dirs;
  const auto manifest_path = dir / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    json m;
    in >> m;
    for (const auto& name : m.at("scenes")) dirs.push_back(dir / name.get<std::string>());
    return dirs;
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_directory() &&
        entry.path().filename().string().rfind("scene_", 0) == 0)
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

double median(std::vector<double> v) {
  return metrics::quartiles(std::move(v)).q50;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateConfig {
  std::filesystem::path audio_pool;
  std::size_t frames = 312;
  std::array<double, 2> snr_db = {20.0, 30.0};
  std::array<double, 2> sir_db = {-5.0, 5.0};
  std::array<double, 2> radius = {1.0, 3.0};
  std::array<double, 2> height = {0.0, 1.0};
  double min_separation_deg = 10.0;
  double v_target_mps = 1.5;
  std::size_t mics = 3;
  double array_diameter = 0.10;
  std::optional<scene::ReverbConfig> reverb;
  json echo;
};

GenerateConfig parse_generate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("generate: cannot open config " + path.string());
  json j;
  in >> j;

  GenerateConfig cfg;
  cfg.echo = j;
  cfg.audio_pool = j.at("audio_pool").get<std::string>();
  if (cfg.audio_pool.is_relative())
    cfg.audio_pool = path.parent_path() / cfg.audio_pool;
  cfg.frames = j.value("frames", cfg.frames);
  if (j.contains("snr_db")) cfg.snr_db = j.at("snr_db").get<std::array<double, 2>>();
  if (j.contains("sir_db")) cfg.sir_db = j.at("sir_db").get<std::array<double, 2>>();
  if (j.contains("radius")) cfg.radius = j.at("radius").get<std::array<double, 2>>();
  if (j.contains("height")) cfg.height = j.at("height").get<std::array<double, 2>>();
  cfg.min_separation_deg = j.value("min_separation_deg", cfg.min_separation_deg);
  cfg.v_target_mps = j.value("v_target_mps", cfg.v_target_mps);
  if (j.contains("geometry")) {
    cfg.mics = j.at("geometry").value("mics", cfg.mics);
    cfg.array_diameter = j.at("geometry").value("diameter", cfg.array_diameter);
  }
  if (j.contains("reverb") && j.at("reverb").value("enabled", false)) {
    scene::ReverbConfig rv;
    const auto& r = j.at("reverb");
    if (r.contains("room")) rv.room = r.at("room").get<std::array<double, 3>>();
    if (r.contains("array_position"))
      rv.array_position = r.at("array_position").get<std::array<double, 3>>();
    rv.reflection_coeff = r.value("reflection_coeff", rv.reflection_coeff);
    cfg.reverb = rv;
  }
  return cfg;
}

std::vector<std::filesystem::path> usable_pool_files(const GenerateConfig& cfg,
                                                     const dsp::StftConfig& stft) {
  if (!std::filesystem::is_directory(cfg.audio_pool))
    throw std::runtime_error("generate: audio pool directory not found: " +
                             cfg.audio_pool.string());
  const std::size_t need = scene::required_source_samples(cfg.frames, stft);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(cfg.audio_pool)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".wav") continue;
    try {
      const auto wav = wavio::read_wav(entry.path());
      if (wav.channels.size() == 1 && wav.sample_rate == stft.sample_rate &&
          wav.samples() >= need)
        files.push_back(entry.path());
    } catch (const std::exception& e) {
      std::cerr << "generate: skipping " << entry.path() << ": " << e.what() << "\n";
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("generate: audio pool has no usable mono 16 kHz files of >= " +
                             std::to_string(need) + " samples");
  return files;
}

dsp::Signal load_segment(const std::filesystem::path& file, std::size_t need,
                         std::mt19937_64& rng) {
  auto wav = wavio::read_wav(file);
  auto& x = wav.channels[0];
  if (x.size() == need) return std::move(x);
  std::uniform_int_distribution<std::size_t> d_off(0, x.size() - need);
  const std::size_t off = d_off(rng);
  return dsp::Signal(x.begin() + static_cast<std::ptrdiff_t>(off),
                     x.begin() + static_cast<std::ptrdiff_t>(off + need));
}

}  // namespace

int cmd_generate(const GenerateOptions& opts) {
  try {
    const auto cfg = parse_generate_config(opts.config_path);
    const dsp::StftConfig stft;
    const auto geometry = geom::ArrayGeometry::circular(cfg.mics, cfg.array_diameter);
    const auto pool = usable_pool_files(cfg, stft);
    const std::size_t need = scene::required_source_samples(cfg.frames, stft);

    std::filesystem::create_directories(opts.out_dir);
    std::vector<std::string> names(opts.count);
    std::vector<std::string> errors(opts.count);

    parallel_for(opts.count, opts.workers, [&](std::size_t i) {
      try {
        auto rng = make_rng(opts.seed, i);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        auto draw_range = [&](const std::array<double, 2>& r) {
          return r[0] + (r[1] - r[0]) * unit(rng);
        };

        std::uniform_int_distribution<std::size_t> d_file(0, pool.size() - 1);
        const std::size_t tgt_file = d_file(rng);
        std::size_t int_file = d_file(rng);
        for (int tries = 0; pool.size() > 1 && int_file == tgt_file && tries < 16; ++tries)
          int_file = d_file(rng);

        scene::SpeakerSpec target, interferer;
        target.radius = draw_range(cfg.radius);
        target.height = draw_range(cfg.height);
        interferer.radius = draw_range(cfg.radius);
        interferer.height = draw_range(cfg.height);

        const double min_sep = deg_to_rad(cfg.min_separation_deg);
        double theta_t = kTwoPi * unit(rng);
        double theta_i = kTwoPi * unit(rng);
        while (std::abs(wrap_pi(theta_t - theta_i)) < min_sep)
          theta_i = kTwoPi * unit(rng);

        const double dt = stft.frame_dt();
        target.motion = {dt,
                         scene::calibrate_sigma(cfg.v_target_mps, target.radius,
                                                cfg.frames, dt),
                         cfg.frames, theta_t, 0.0};
        interferer.motion = {dt,
                             scene::calibrate_sigma(cfg.v_target_mps, interferer.radius,
                                                    cfg.frames, dt),
                             cfg.frames, theta_i, 0.0};

        target.source_audio = load_segment(pool[tgt_file], need, rng);
        interferer.source_audio = load_segment(pool[int_file], need, rng);
        interferer.level_offset_db = draw_range(cfg.sir_db);
        const double snr = draw_range(cfg.snr_db);

        auto truth = scene::mix_scenario(target, interferer, snr, geometry, stft, rng,
                                         cfg.reverb);
        truth.seed = splitmix64(splitmix64(opts.seed) ^ i);

        char name[32];
        std::snprintf(name, sizeof(name), "scene_%04zu", i);
        scenario_io::save_scenario(opts.out_dir / name, truth, geometry, stft);
        names[i] = name;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });

    for (std::size_t i = 0; i < opts.count; ++i)
      if (!errors[i].empty()) {
        std::cerr << "generate: scene " << i << " failed: " << errors[i] << "\n";
        return kExitData;
      }

    json manifest;
    manifest["seed"] = opts.seed;
    manifest["count"] = opts.count;
    manifest["scenes"] = names;
    manifest["config"] = cfg.echo;
    std::ofstream out(opts.out_dir / "manifest.json");
    out << manifest.dump(2) << "\n";
    if (!out) throw std::runtime_error("generate: cannot write manifest");
    std::cout << "generated " << opts.count << " scene(s) in " << opts.out_dir << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  }
}

// ---------------------------------------------------------------------------
// run

namespace {

struct SceneRunResult {
  std::string scene_id;
  std::vector<double> theta_true_deg;
  std::vector<double> theta_est_deg;
  std::vector<double> ae_deg;
  std::vector<double> n_eff;
  std::vector<std::uint8_t> resampled;
  double mae_deg = 0.0;
  double sisdr_in_db = 0.0;
  double sisdr_out_db = 0.0;
  double wall_ms_per_frame = 0.0;
  bool has_estimates = false;
  std::string error;
};

pipeline::PipelineConfig build_pipeline_config(const RunOptions& opts,
                                               std::uint64_t tracker_seed,
                                               double theta0) {
  pipeline::PipelineConfig cfg;
  if (opts.pipeline == "concat")
    cfg.mode = pipeline::PipelineMode::Concatenative;
  else if (opts.pipeline == "ar")
    cfg.mode = pipeline::PipelineMode::Autoregressive;
  else if (opts.pipeline == "strong")
    cfg.mode = pipeline::PipelineMode::StrongGuidance;
  else
    throw std::invalid_argument("run: unknown pipeline '" + opts.pipeline + "'");

  cfg.tracker.n_particles = opts.n_particles;
  cfg.tracker.transition =
      opts.motion == "rw"
          ? tracker::TransitionModel::random_walk(opts.sigma_rw)
          : tracker::TransitionModel::constant_velocity(opts.sigma_cv, 0.016);
  if (opts.motion != "rw" && opts.motion != "cv")
    throw std::invalid_argument("run: unknown motion model '" + opts.motion + "'");
  cfg.tracker.band_lo_hz = opts.band_lo_hz;
  cfg.tracker.band_hi_hz = opts.band_hi_hz;
  cfg.tracker.likelihood_floor = opts.q0;
  cfg.tracker.likelihood_exponent = opts.gamma;
  cfg.tracker.resample_threshold = opts.resample_threshold;
  cfg.tracker.init_spread_theta = deg_to_rad(opts.init_spread_theta_deg);
  cfg.tracker.init_spread_vel = opts.init_spread_vel;
  cfg.tracker.seed = tracker_seed;

  if (opts.ssf == "oracle")
    cfg.ssf.kind = ssf::SsfKind::Oracle;
  else if (opts.ssf == "coherence")
    cfg.ssf.kind = ssf::SsfKind::Coherence;
  else
    throw std::invalid_argument("run: unknown ssf '" + opts.ssf + "'");

  std::string mode = opts.ssf_mode;
  if (mode.empty()) mode = opts.pipeline == "concat" ? "miso" : "mimo";
  if (mode == "miso")
    cfg.ssf.mode = ssf::SsfMode::Miso;
  else if (mode == "mimo")
    cfg.ssf.mode = ssf::SsfMode::Mimo;
  else
    throw std::invalid_argument("run: unknown ssf mode '" + mode + "'");

  cfg.ssf.sharpness = opts.beta;
  cfg.ssf.smoothing = opts.alpha;
  cfg.ssf.oracle_degrade = opts.oracle_degrade;
  cfg.ssf.band_lo_hz = opts.band_lo_hz;
  cfg.ssf.band_hi_hz = opts.band_hi_hz;
  cfg.theta0 = theta0;
  return cfg;
}

dsp::Signal interior(const dsp::Signal& x, const dsp::StftConfig& cfg) {
  if (x.size() < 2 * cfg.window_len) return x;
  return dsp::Signal(x.begin() + static_cast<std::ptrdiff_t>(cfg.window_len),
                     x.end() - static_cast<std::ptrdiff_t>(cfg.window_len));
}

SceneRunResult run_one_scene(const std::filesystem::path& dir, const RunOptions& opts,
                             std::uint64_t tracker_seed) {
  SceneRunResult r;
  r.scene_id = dir.filename().string();
  try {
    auto loaded = scenario_io::load_scenario(dir);
    const auto& truth = loaded.truth;
    const auto& geometry = loaded.geometry;
    const auto spec = dsp::stft(truth.mixture, loaded.stft);
    const std::size_t frames = std::min<std::size_t>(spec.frames(),
                                                     truth.target.theta.size());

    const auto cfg = build_pipeline_config(opts, tracker_seed, truth.target.theta[0]);

    pipeline::RunTrace trace;
    switch (cfg.mode) {
      case pipeline::PipelineMode::Concatenative:
        trace = pipeline::run_concat(spec, cfg, geometry, &truth);
        break;
      case pipeline::PipelineMode::Autoregressive:
        trace = pipeline::run_ar(spec, cfg, geometry, &truth);
        break;
      case pipeline::PipelineMode::StrongGuidance:
        trace = pipeline::run_strong(spec, cfg, geometry, truth);
        break;
    }

    r.has_estimates = !trace.theta_est.empty();
    for (std::size_t t = 0; t < frames; ++t) {
      r.theta_true_deg.push_back(rad_to_deg(truth.target.theta[t]));
      if (r.has_estimates) {
        r.theta_est_deg.push_back(rad_to_deg(trace.theta_est[t]));
        r.ae_deg.push_back(
            metrics::angular_error(trace.theta_est[t], truth.target.theta[t]));
        r.n_eff.push_back(trace.n_eff[t]);
        r.resampled.push_back(trace.resampled[t]);
      }
    }
    if (r.has_estimates) {
      double sum = 0.0;
      for (double ae : r.ae_deg) sum += ae;
      r.mae_deg = sum / static_cast<double>(r.ae_deg.size());
    }

    // Edge frames carry partial window overlap; compare on the interior only.
    const std::size_t ref = geometry.reference_index;
    const auto enhanced = dsp::istft(trace.enhanced_ref)[0];
    const auto n = static_cast<std::ptrdiff_t>(enhanced.size());
    const dsp::Signal mix_ref(truth.mixture[ref].begin(), truth.mixture[ref].begin() + n);
    const dsp::Signal tgt_ref(truth.target_direct[ref].begin(),
                              truth.target_direct[ref].begin() + n);
    r.sisdr_in_db = metrics::si_sdr(interior(mix_ref, loaded.stft),
                                    interior(tgt_ref, loaded.stft));
    r.sisdr_out_db = metrics::si_sdr(interior(enhanced, loaded.stft),
                                     interior(tgt_ref, loaded.stft));

    double wall = 0.0;
    for (double w : trace.wall_ms) wall += w;
    r.wall_ms_per_frame = trace.wall_ms.empty()
                              ? 0.0
                              : wall / static_cast<double>(trace.wall_ms.size());
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

std::string run_metadata_line(const RunOptions& opts) {
  std::string mode = opts.ssf_mode;
  if (mode.empty()) mode = opts.pipeline == "concat" ? "miso" : "mimo";
  std::ostringstream os;
  os << "# selfsteer-run pipeline=" << opts.pipeline << " motion=" << opts.motion
     << " ssf=" << opts.ssf << " mode=" << mode << " degrade=" << fmt(opts.oracle_degrade, 2)
     << " seed=" << opts.seed;
  return os.str();
}

}  // namespace

int cmd_run(const RunOptions& opts) {
  try {
    const auto dirs = list_scene_dirs(opts.scenes_dir);
    if (dirs.empty()) {
      std::cerr << "run: no scene directories under " << opts.scenes_dir << "\n";
      return kExitData;
    }
    if (opts.pipeline != "concat" && opts.pipeline != "ar" && opts.pipeline != "strong") {
      std::cerr << "run: unknown pipeline '" << opts.pipeline << "'\n";
      return kExitUsage;
    }

    std::vector<SceneRunResult> results(dirs.size());
    parallel_for(dirs.size(), opts.workers, [&](std::size_t i) {
      results[i] = run_one_scene(dirs[i], opts, splitmix64(splitmix64(opts.seed) + i));
    });

    std::size_t failures = 0;
    for (const auto& r : results)
      if (!r.error.empty()) {
        std::cerr << "run: skipping " << r.scene_id << ": " << r.error << "\n";
        ++failures;
      }
    if (failures == dirs.size()) {
      std::cerr << "run: all scenes failed\n";
      return kExitData;
    }

    const bool strong = opts.pipeline == "strong";
    const auto frames_path = opts.out_prefix.string() + "_frames.csv";
    const auto scenes_path = opts.out_prefix.string() + "_scenes.csv";

    std::ofstream ff(frames_path);
    ff << run_metadata_line(opts) << "\n";
    ff << (strong ? "scene_id,frame,theta_true_deg"
                  : "scene_id,frame,theta_true_deg,theta_est_deg,ae_deg,n_eff,resampled")
       << "\n";
    for (const auto& r : results) {
      if (!r.error.empty()) continue;
      for (std::size_t t = 0; t < r.theta_true_deg.size(); ++t) {
        ff << r.scene_id << ',' << t << ',' << fmt(r.theta_true_deg[t]);
        if (!strong)
          ff << ',' << fmt(r.theta_est_deg[t]) << ',' << fmt(r.ae_deg[t]) << ','
             << fmt(r.n_eff[t]) << ',' << int(r.resampled[t]);
        ff << '\n';
      }
    }
    if (!ff) throw std::runtime_error("run: cannot write " + frames_path);

    std::ofstream sf(scenes_path);
    sf << run_metadata_line(opts) << "\n";
    sf << "scene_id,mae_deg,sisdr_in_db,sisdr_out_db,wall_ms_per_frame\n";
    for (const auto& r : results) {
      if (!r.error.empty()) continue;
      sf << r.scene_id << ',' << (strong ? "" : fmt(r.mae_deg)) << ','
         << fmt(r.sisdr_in_db) << ',' << fmt(r.sisdr_out_db) << ','
         << fmt(r.wall_ms_per_frame, 3) << '\n';
    }
    if (!sf) throw std::runtime_error("run: cannot write " + scenes_path);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  }
}

// ---------------------------------------------------------------------------
// eval

namespace {

struct ParsedRun {
  std::string pipeline;
  std::string motion;
  std::vector<metrics::SceneResult> scenes;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::map<std::string, std::string> parse_metadata(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream is(line);
  std::string token;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq != std::string::npos) kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return kv;
}

void check_header(const std::vector<std::string>& got,
                  const std::vector<std::string>& want,
                  const std::filesystem::path& file) {
  for (std::size_t i = 0; i < std::max(got.size(), want.size()); ++i) {
    const std::string g = i < got.size() ? got[i] : "<missing>";
    const std::string w = i < want.size() ? want[i] : "<none>";
    if (g != w)
      throw std::runtime_error("eval: " + file.string() + ": unexpected column '" + g +
                               "' (expected '" + w + "')");
  }
}

ParsedRun parse_run(const std::filesystem::path& scenes_csv) {
  std::ifstream in(scenes_csv);
  if (!in) throw std::runtime_error("eval: cannot open " + scenes_csv.string());

  std::string line;
  std::getline(in, line);
  if (line.rfind("# selfsteer-run", 0) != 0)
    throw std::runtime_error("eval: " + scenes_csv.string() +
                             ": missing run metadata line");
  const auto meta = parse_metadata(line);

  ParsedRun run;
  run.pipeline = meta.count("pipeline") ? meta.at("pipeline") : "?";
  run.motion = meta.count("motion") ? meta.at("motion") : "?";
  const bool strong = run.pipeline == "strong";
  const std::string tracker_label = strong ? "-" : run.motion;

  std::getline(in, line);
  check_header(split_csv_line(line),
               {"scene_id", "mae_deg", "sisdr_in_db", "sisdr_out_db",
                "wall_ms_per_frame"},
               scenes_csv);

  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5)
      throw std::runtime_error("eval: " + scenes_csv.string() + ": malformed row");
    metrics::SceneResult r;
    r.scene_id = f[0];
    r.pipeline_label = run.pipeline;
    r.tracker_label = tracker_label;
    r.mae_deg = f[1].empty() ? 0.0 : std::stod(f[1]);
    r.sisdr_in_db = std::stod(f[2]);
    r.sisdr_out_db = std::stod(f[3]);
    index[r.scene_id] = run.scenes.size();
    run.scenes.push_back(std::move(r));
  }

  // Per-frame angular errors, when the companion file exists.
  auto frames_csv = scenes_csv;
  auto name = scenes_csv.filename().string();
  const std::string suffix = "_scenes.csv";
  if (name.size() > suffix.size() &&
      name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
    name.replace(name.size() - suffix.size(), suffix.size(), "_frames.csv");
    frames_csv = scenes_csv.parent_path() / name;
  }
  if (!strong && std::filesystem::exists(frames_csv)) {
    std::ifstream fin(frames_csv);
    std::getline(fin, line);  // metadata
    std::getline(fin, line);
    check_header(split_csv_line(line),
                 {"scene_id", "frame", "theta_true_deg", "theta_est_deg", "ae_deg",
                  "n_eff", "resampled"},
                 frames_csv);
    while (std::getline(fin, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != 7)
        throw std::runtime_error("eval: " + frames_csv.string() + ": malformed row");
      const auto it = index.find(f[0]);
      if (it != index.end()) run.scenes[it->second].ae_deg.push_back(std::stod(f[4]));
    }
  }
  return run;
}

std::filesystem::path normalize_results_path(const std::filesystem::path& p) {
  if (p.extension() == ".csv") return p;
  return std::filesystem::path(p.string() + "_scenes.csv");
}

std::string method_label(const metrics::SceneResult& r) {
  return r.tracker_label == "-" ? r.pipeline_label
                                : r.pipeline_label + "-" + r.tracker_label;
}

}  // namespace

int cmd_eval(const EvalOptions& opts) {
  try {
    if (opts.results.empty()) {
      std::cerr << "eval: need at least one results file\n";
      return kExitUsage;
    }

    std::vector<metrics::SceneResult> all;
    std::map<std::string, metrics::SceneResult> unprocessed;  // keyed by scene id
    for (const auto& arg : opts.results) {
      auto run = parse_run(normalize_results_path(arg));
      for (auto& r : run.scenes) {
        if (!unprocessed.count(r.scene_id)) {
          metrics::SceneResult u;
          u.scene_id = r.scene_id;
          u.pipeline_label = "unprocessed";
          u.tracker_label = "-";
          u.sisdr_in_db = r.sisdr_in_db;
          u.sisdr_out_db = r.sisdr_in_db;
          unprocessed[u.scene_id] = std::move(u);
        }
        all.push_back(std::move(r));
      }
    }
    for (auto& [id, u] : unprocessed) all.push_back(std::move(u));

    const auto report = metrics::summarize(all);
    const std::string text = report.to_text();
    std::cout << text;
    if (!opts.report_path.empty()) {
      std::ofstream out(opts.report_path);
      out << text;
      if (!out) throw std::runtime_error("eval: cannot write " + opts.report_path.string());
    }

    if (!opts.regression_path.empty()) {
      // Scene-wise tracking-accuracy vs enhancement-gain scatter per method.
      std::map<std::string, std::vector<std::array<double, 2>>> points;
      std::map<std::string, std::vector<const metrics::SceneResult*>> rows;
      for (const auto& r : all) {
        if (r.pipeline_label == "strong" || r.pipeline_label == "unprocessed") continue;
        const auto label = method_label(r);
        points[label].push_back({std::max(r.mae_deg, 1e-3), r.delta_sisdr_db()});
        rows[label].push_back(&r);
      }

      std::ofstream out(opts.regression_path);
      out << "method,scene_id,mae_deg,delta_sisdr_db,fit_slope,fit_intercept,fit_r2\n";
      for (const auto& [label, pts] : points) {
        std::string slope, intercept, r2;
        try {
          const auto fit = metrics::loglinear_fit(pts);
          slope = fmt(fit.slope, 6);
          intercept = fmt(fit.intercept, 6);
          r2 = fmt(fit.r_squared, 6);
        } catch (const std::exception&) {
          // Leave the fit columns empty for degenerate clouds.
        }
        const auto& members = rows[label];
        for (std::size_t i = 0; i < members.size(); ++i)
          out << label << ',' << members[i]->scene_id << ',' << fmt(pts[i][0]) << ','
              << fmt(pts[i][1]) << ',' << slope << ',' << intercept << ',' << r2 << '\n';
      }
      if (!out)
        throw std::runtime_error("eval: cannot write " + opts.regression_path.string());
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  }
}

// ---------------------------------------------------------------------------
// sweep

namespace {

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

void apply_param(RunOptions& opts, const std::string& name, double value) {
  if (name == "sigma_rw")
    opts.sigma_rw = value;
  else if (name == "sigma_cv")
    opts.sigma_cv = value;
  else if (name == "gamma")
    opts.gamma = value;
  else if (name == "q0")
    opts.q0 = value;
  else if (name == "band_lo_hz")
    opts.band_lo_hz = value;
  else if (name == "band_hi_hz")
    opts.band_hi_hz = value;
  else if (name == "resample_threshold")
    opts.resample_threshold = value;
  else if (name == "init_spread_theta_deg")
    opts.init_spread_theta_deg = value;
  else if (name == "init_spread_vel")
    opts.init_spread_vel = value;
  else if (name == "n_particles")
    opts.n_particles = static_cast<std::size_t>(value);
  else if (name == "beta")
    opts.beta = value;
  else if (name == "alpha")
    opts.alpha = value;
  else if (name == "oracle_degrade")
    opts.oracle_degrade = value;
  else
    throw std::runtime_error("sweep: unknown parameter '" + name + "'");
}

}  // namespace

int cmd_sweep(const SweepOptions& opts) {
  try {
    if (opts.base.pipeline == "strong") {
      std::cerr << "sweep: strong guidance has no tracker parameters to sweep\n";
      return kExitUsage;
    }

    std::ifstream in(opts.grid_path);
    if (!in) {
      std::cerr << "sweep: cannot open grid " << opts.grid_path << "\n";
      return kExitData;
    }
    json grid_json;
    in >> grid_json;
    std::vector<GridAxis> axes;
    for (const auto& [key, values] : grid_json.items()) {
      GridAxis axis{key, {}};
      for (const auto& v : values) axis.values.push_back(v.get<double>());
      if (axis.values.empty()) throw std::runtime_error("sweep: empty axis '" + key + "'");
      axes.push_back(std::move(axis));
    }
    if (axes.empty()) throw std::runtime_error("sweep: empty parameter grid");

    std::size_t combos = 1;
    for (const auto& a : axes) combos *= a.values.size();

    const auto dirs = list_scene_dirs(opts.base.scenes_dir);
    if (dirs.empty()) throw std::runtime_error("sweep: no scenes found");

    struct Row {
      std::vector<double> params;
      double median_ae = 0.0;
      double median_delta = 0.0;
      std::size_t combo = 0;
    };
    std::vector<Row> rows(combos);

    for (std::size_t c = 0; c < combos; ++c) {
      RunOptions run_opts = opts.base;
      Row row;
      row.combo = c;
      std::size_t rem = c;
      for (const auto& a : axes) {
        const double v = a.values[rem % a.values.size()];
        rem /= a.values.size();
        apply_param(run_opts, a.name, v);
        row.params.push_back(v);
      }

      std::vector<SceneRunResult> results(dirs.size());
      parallel_for(dirs.size(), opts.base.workers, [&](std::size_t i) {
        results[i] =
            run_one_scene(dirs[i], run_opts, splitmix64(splitmix64(opts.base.seed) + i));
      });

      std::vector<double> ae_pool, delta_pool;
      for (const auto& r : results) {
        if (!r.error.empty())
          throw std::runtime_error("sweep: scene " + r.scene_id + " failed: " + r.error);
        ae_pool.insert(ae_pool.end(), r.ae_deg.begin(), r.ae_deg.end());
        delta_pool.push_back(r.sisdr_out_db - r.sisdr_in_db);
      }
      row.median_ae = median(ae_pool);
      row.median_delta = median(delta_pool);
      rows[c] = std::move(row);
    }

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (std::abs(a.median_ae - b.median_ae) > 1e-9) return a.median_ae < b.median_ae;
      if (std::abs(a.median_delta - b.median_delta) > 1e-9)
        return a.median_delta > b.median_delta;
      return a.combo < b.combo;
    });

    std::ofstream out(opts.out_path);
    out << "rank";
    for (const auto& a : axes) out << ',' << a.name;
    out << ",median_ae_deg,median_delta_sisdr_db\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out << (i + 1);
      for (double v : rows[i].params) out << ',' << fmt(v, 6);
      out << ',' << fmt(rows[i].median_ae) << ',' << fmt(rows[i].median_delta) << '\n';
    }
    if (!out) throw std::runtime_error("sweep: cannot write " + opts.out_path.string());

    json best;
    for (std::size_t a = 0; a < axes.size(); ++a) best[axes[a].name] = rows[0].params[a];
    const auto best_path = opts.out_path.string() + ".best.json";
    std::ofstream bout(best_path);
    bout << best.dump(2) << "\n";
    std::cout << "best configuration: " << best.dump() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  }
}

// ---------------------------------------------------------------------------
// calibrate

int cmd_calibrate(double v_target, double r, std::size_t frames, double dt) {
  try {
    const double sigma = scene::calibrate_sigma(v_target, r, frames, dt);
    std::printf("sigma_rad_per_s2=%.9g\n", sigma);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace selfsteer::commands
