#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "xxlseg/volume.hpp"

namespace xxlseg {

/// Per-axis sequences of 2D instance maps. Ids are local to one map.
class SliceStack {
 public:
  SliceStack() = default;
  /// All-background stack for a volume of the given meta.
  explicit SliceStack(const VolumeMeta& meta);
  /// Throws InvalidArgument when a map count or map dims disagree with `meta`.
  SliceStack(const VolumeMeta& meta, std::array<std::vector<LabelMap>, 3> maps);

  const VolumeMeta& meta() const noexcept { return meta_; }
  Vec3 dims() const noexcept { return meta_.dims; }
  std::int64_t slice_count(Axis axis) const noexcept {
    return static_cast<std::int64_t>(maps_[axis_index(axis)].size());
  }
  const LabelMap& map(Axis axis, std::int64_t index) const { return maps_[axis_index(axis)].at(index); }
  LabelMap& map(Axis axis, std::int64_t index) { return maps_[axis_index(axis)].at(index); }
  const std::vector<LabelMap>& maps(Axis axis) const noexcept { return maps_[axis_index(axis)]; }

  /// Re-checks the stack invariants.
  void validate() const;

  friend bool operator==(const SliceStack&, const SliceStack&) = default;

 private:
  VolumeMeta meta_;
  std::array<std::vector<LabelMap>, 3> maps_;
};

/// Slices every axis of `volume` without relabelling.
SliceStack slice_volume(const LabelVolume& volume);

/// Directory layout: `stack.json` manifest
///   {"meta": {"dims": [..], "origin": [..]}, "axes": {"X": n, "Y": n, "Z": n}}
/// plus `X/`, `Y/`, `Z/` subdirectories holding maps `<index>.vol.json`
/// (zero-padded to 4 digits) of dims (w, h, 1).
void save_slice_stack(const SliceStack& stack, const std::filesystem::path& dir);
SliceStack load_slice_stack(const std::filesystem::path& dir);

}  // namespace xxlseg
