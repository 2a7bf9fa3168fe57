#include "xxlseg/volume.hpp"

#include <algorithm>
#include <string>

namespace xxlseg {

std::string_view voxel_kind_name(VoxelKind k) noexcept {
  return k == VoxelKind::Label32 ? "label-u32" : "scalar-f32";
}

VoxelKind voxel_kind_from_name(std::string_view name) {
  if (name == "label-u32") return VoxelKind::Label32;
  if (name == "scalar-f32") return VoxelKind::Scalar32;
  throw IoError(IoErrorKind::UnknownVoxelKind, "unknown voxel_kind '" + std::string(name) + "'");
}

std::pair<Axis, Axis> plane_axes(Axis axis) noexcept {
  switch (axis) {
    case Axis::X: return {Axis::Y, Axis::Z};
    case Axis::Y: return {Axis::X, Axis::Z};
    default: return {Axis::X, Axis::Y};
  }
}

Vec3 plane_to_volume(Axis axis, std::int64_t index, std::int64_t u, std::int64_t v) noexcept {
  const auto [ua, va] = plane_axes(axis);
  Vec3 p;
  p[axis] = index;
  p[ua] = u;
  p[va] = v;
  return p;
}

Vec3 slice_dims(Vec3 dims, Axis axis) noexcept {
  const auto [ua, va] = plane_axes(axis);
  return {dims[ua], dims[va], 1};
}

namespace {

void check_slice_index(const LabelVolume& volume, Axis axis, std::int64_t index) {
  if (index < 0 || index >= volume.dims()[axis]) {
    throw InvalidArgument("slice index " + std::to_string(index) + " out of range along " +
                          std::string(axis_name(axis)) + " (size " +
                          std::to_string(volume.dims()[axis]) + ")");
  }
}

}  // namespace

LabelMap extract_slice(const LabelVolume& volume, Axis axis, std::int64_t index) {
  check_slice_index(volume, axis, index);
  const Vec3 sd = slice_dims(volume.dims(), axis);
  LabelMap map(sd);
  for (std::int64_t v = 0; v < sd.y; ++v)
    for (std::int64_t u = 0; u < sd.x; ++u) map(u, v, 0) = volume[plane_to_volume(axis, index, u, v)];
  return map;
}

void insert_slice(LabelVolume& volume, Axis axis, std::int64_t index, const LabelMap& map) {
  check_slice_index(volume, axis, index);
  const Vec3 sd = slice_dims(volume.dims(), axis);
  if (map.dims() != sd) throw InvalidArgument("slice map dims do not match the volume plane");
  for (std::int64_t v = 0; v < sd.y; ++v)
    for (std::int64_t u = 0; u < sd.x; ++u) volume[plane_to_volume(axis, index, u, v)] = map(u, v, 0);
}

std::int64_t count_foreground(const LabelVolume& volume) noexcept {
  const auto v = volume.voxels();
  return std::count_if(v.begin(), v.end(), [](Label l) { return l != 0; });
}

}  // namespace xxlseg
