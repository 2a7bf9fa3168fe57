#pragma once

#include <filesystem>
#include <variant>

#include "xxlseg/volume.hpp"

namespace xxlseg {

/// On-disk layout: `<name>.vol.json` sidecar
///   {"dims": [x,y,z], "origin": [x,y,z], "voxel_kind": "label-u32"|"scalar-f32",
///    "payload": "<name>.raw"}
/// next to a headerless little-endian x-fastest payload.
using AnyVolume = std::variant<LabelVolume, ScalarVolume>;

/// Accepts either the sidecar path or the bare `<name>` stem.
std::filesystem::path sidecar_path(const std::filesystem::path& path);

AnyVolume load_volume(const std::filesystem::path& path);
LabelVolume load_label_volume(const std::filesystem::path& path);
ScalarVolume load_scalar_volume(const std::filesystem::path& path);

void save_volume(const LabelVolume& volume, const std::filesystem::path& path);
void save_volume(const ScalarVolume& volume, const std::filesystem::path& path);

}  // namespace xxlseg
