// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>

#include "selfsteer/geom.hpp"
#include "selfsteer/scene.hpp"

namespace selfsteer::scenario_io {

// On-disk layout of one scene directory:
//   mixture.wav        multichannel 32-bit float PCM
//   target_direct.wav  per-channel direct-path target, same layout
//   truth.json         trajectories (degrees), levels, seed, geometry echo
void save_scenario(const std::filesystem::path& dir, const scene::ScenarioTruth& truth,
                   const geom::ArrayGeometry& geom, const dsp::StftConfig& cfg);

struct LoadedScenario {
  scene::ScenarioTruth truth;  // noise/interferer components are not stored on disk
  geom::ArrayGeometry geometry;
  dsp::StftConfig stft;
};

// Throws std::runtime_error with the offending path on malformed input.
LoadedScenario load_scenario(const std::filesystem::path& dir);

}  // namespace selfsteer::scenario_io
