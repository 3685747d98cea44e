// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/scenario_io.hpp"

#include <json.hpp>

#include <fstream>

#include "selfsteer/angles.hpp"
#include "selfsteer/wav.hpp"

namespace selfsteer::scenario_io {

using nlohmann::json;

namespace {

json speaker_json(const scene::SpeakerTruth& s, const std::string& role) {
  std::vector<double> theta_deg(s.theta.size());
  for (std::size_t t = 0; t < s.theta.size(); ++t) theta_deg[t] = rad_to_deg(s.theta[t]);
  return json{{"role", role},
              {"r", s.radius},
              {"height", s.height},
              {"sigma", s.sigma},
              {"theta_deg", theta_deg}};
}

scene::SpeakerTruth speaker_from_json(const json& j) {
  scene::SpeakerTruth s;
  s.radius = j.at("r").get<double>();
  s.height = j.at("height").get<double>();
  s.sigma = j.at("sigma").get<double>();
  for (double deg : j.at("theta_deg")) s.theta.push_back(deg_to_rad(deg));
  return s;
}

}  // namespace

void save_scenario(const std::filesystem::path& dir, const scene::ScenarioTruth& truth,
                   const geom::ArrayGeometry& geom, const dsp::StftConfig& cfg) {
  std::filesystem::create_directories(dir);
  wavio::write_wav_float32(dir / "mixture.wav", truth.mixture, cfg.sample_rate);
  wavio::write_wav_float32(dir / "target_direct.wav", truth.target_direct,
                           cfg.sample_rate);

  json j;
  j["seed"] = truth.seed;
  j["snr_db"] = truth.snr_db;
  j["sir_db"] = truth.sir_db;
  j["sample_rate"] = cfg.sample_rate;
  j["window_len"] = cfg.window_len;
  j["hop"] = cfg.hop;
  j["frames"] = truth.target.theta.size();
  j["speakers"] = json::array({speaker_json(truth.target, "target"),
                               speaker_json(truth.interferer, "interferer")});
  j["geometry"] = {{"mic_positions", geom.mic_positions},
                   {"reference_index", geom.reference_index},
                   {"speed_of_sound", geom.speed_of_sound}};

  std::ofstream out(dir / "truth.json");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("scenario: cannot write " + dir.string());
}

LoadedScenario load_scenario(const std::filesystem::path& dir) {
  std::ifstream in(dir / "truth.json");
  if (!in) throw std::runtime_error("scenario: missing " + (dir / "truth.json").string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("scenario: malformed " + (dir / "truth.json").string() +
                             ": " + e.what());
  }

  LoadedScenario loaded;
  try {
    loaded.stft.sample_rate = j.at("sample_rate").get<double>();
    loaded.stft.window_len = j.at("window_len").get<std::size_t>();
    loaded.stft.hop = j.at("hop").get<std::size_t>();

    const auto& g = j.at("geometry");
    for (const auto& p : g.at("mic_positions"))
      loaded.geometry.mic_positions.push_back(
          {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
    loaded.geometry.reference_index = g.at("reference_index").get<std::size_t>();
    loaded.geometry.speed_of_sound = g.at("speed_of_sound").get<double>();

    loaded.truth.seed = j.at("seed").get<std::uint64_t>();
    loaded.truth.snr_db = j.at("snr_db").get<double>();
    loaded.truth.sir_db = j.at("sir_db").get<double>();
    for (const auto& sp : j.at("speakers")) {
      if (sp.at("role") == "target")
        loaded.truth.target = speaker_from_json(sp);
      else
        loaded.truth.interferer = speaker_from_json(sp);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("scenario: bad field in " + (dir / "truth.json").string() +
                             ": " + e.what());
  }

  auto mixture = wavio::read_wav(dir / "mixture.wav");
  auto target = wavio::read_wav(dir / "target_direct.wav");
  if (mixture.channels.size() != loaded.geometry.channels())
    throw std::runtime_error("scenario: mixture channel count mismatch in " +
                             dir.string());
  if (target.channels.size() != mixture.channels.size() ||
      target.samples() != mixture.samples())
    throw std::runtime_error("scenario: target/mixture shape mismatch in " +
                             dir.string());
  loaded.truth.mixture = std::move(mixture.channels);
  loaded.truth.target_direct = std::move(target.channels);
  return loaded;
}

}  // namespace selfsteer::scenario_io
