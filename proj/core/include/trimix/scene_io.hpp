#pragma once

#include <filesystem>

#include "trimix/scene.hpp"

namespace trimix {

// On-disk scene layout (see docs/formats.md):
//   <dir>/scene.json            manifest: sweeps, poses, cameras, annotations, truth
//   <dir>/captions.json         caption sidecar keyed by (instance, camera, timestamp)
//   <dir>/sweeps/sweep_NNNN.bin float32 little-endian x,y,z,intensity records
void write_scene(const std::filesystem::path& dir, const SceneBundle& bundle);

SceneBundle read_scene(const std::filesystem::path& dir);

} // namespace trimix
