#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "xxlseg/error.hpp"
#include "xxlseg/geometry.hpp"

namespace xxlseg {

using Label = std::uint32_t;

enum class VoxelKind { Label32, Scalar32 };

std::string_view voxel_kind_name(VoxelKind k) noexcept;
VoxelKind voxel_kind_from_name(std::string_view name);

struct VolumeMeta {
  Vec3 dims{1, 1, 1};
  Vec3 origin{};
  VoxelKind voxel_kind = VoxelKind::Label32;

  std::int64_t voxel_count() const noexcept { return dims.product(); }
  friend bool operator==(const VolumeMeta&, const VolumeMeta&) = default;
};

template <typename T>
constexpr VoxelKind voxel_kind_of() {
  if constexpr (std::is_same_v<T, Label>) {
    return VoxelKind::Label32;
  } else {
    static_assert(std::is_same_v<T, float>, "voxels are u32 labels or f32 scalars");
    return VoxelKind::Scalar32;
  }
}

/// Dense 3D grid stored x-fastest: index = x + nx * (y + ny * z).
template <typename T>
class Volume {
 public:
  using value_type = T;

  Volume() : Volume(Vec3{1, 1, 1}) {}

  explicit Volume(Vec3 dims, T fill = T{}, Vec3 origin = {}) {
    if (dims.x < 1 || dims.y < 1 || dims.z < 1) {
      throw InvalidArgument("volume dims must all be >= 1");
    }
    meta_ = VolumeMeta{dims, origin, voxel_kind_of<T>()};
    voxels_.assign(static_cast<std::size_t>(dims.product()), fill);
  }

  Volume(const VolumeMeta& meta, std::vector<T> voxels) : Volume(meta.dims, T{}, meta.origin) {
    if (static_cast<std::int64_t>(voxels.size()) != meta.voxel_count()) {
      throw InvalidArgument("voxel payload does not match dims product");
    }
    voxels_ = std::move(voxels);
  }

  const VolumeMeta& meta() const noexcept { return meta_; }
  Vec3 dims() const noexcept { return meta_.dims; }
  std::int64_t size() const noexcept { return static_cast<std::int64_t>(voxels_.size()); }
  void set_origin(Vec3 origin) noexcept { meta_.origin = origin; }

  std::int64_t index(std::int64_t x, std::int64_t y, std::int64_t z) const noexcept {
    return x + meta_.dims.x * (y + meta_.dims.y * z);
  }
  std::int64_t index(Vec3 p) const noexcept { return index(p.x, p.y, p.z); }
  Vec3 coord(std::int64_t i) const noexcept {
    const std::int64_t nx = meta_.dims.x, ny = meta_.dims.y;
    return {i % nx, (i / nx) % ny, i / (nx * ny)};
  }
  bool in_bounds(Vec3 p) const noexcept {
    return p.x >= 0 && p.y >= 0 && p.z >= 0 && p.x < meta_.dims.x && p.y < meta_.dims.y &&
           p.z < meta_.dims.z;
  }

  T& operator()(std::int64_t x, std::int64_t y, std::int64_t z) noexcept { return voxels_[index(x, y, z)]; }
  T operator()(std::int64_t x, std::int64_t y, std::int64_t z) const noexcept { return voxels_[index(x, y, z)]; }
  T& operator[](Vec3 p) noexcept { return voxels_[index(p)]; }
  T operator[](Vec3 p) const noexcept { return voxels_[index(p)]; }
  T& operator[](std::int64_t i) noexcept { return voxels_[i]; }
  T operator[](std::int64_t i) const noexcept { return voxels_[i]; }

  std::span<T> voxels() noexcept { return voxels_; }
  std::span<const T> voxels() const noexcept { return voxels_; }
  const std::vector<T>& data() const noexcept { return voxels_; }

  Box bounds() const noexcept { return Box{{0, 0, 0}, meta_.dims}; }

  friend bool operator==(const Volume& a, const Volume& b) {
    return a.meta_ == b.meta_ && a.voxels_ == b.voxels_;
  }

 private:
  VolumeMeta meta_;
  std::vector<T> voxels_;
};

using LabelVolume = Volume<Label>;
using ScalarVolume = Volume<float>;

/// A 2D label map is a label volume of dims (w, h, 1).
using LabelMap = LabelVolume;

/// Plane coordinates of a slice perpendicular to `axis`: X -> (y, z),
/// Y -> (x, z), Z -> (x, y).
std::pair<Axis, Axis> plane_axes(Axis axis) noexcept;

/// Voxel of a volume addressed by (axis, slice index, u, v).
Vec3 plane_to_volume(Axis axis, std::int64_t index, std::int64_t u, std::int64_t v) noexcept;

/// Dims (w, h, 1) of the maps obtained by slicing `dims` along `axis`.
Vec3 slice_dims(Vec3 dims, Axis axis) noexcept;

LabelMap extract_slice(const LabelVolume& volume, Axis axis, std::int64_t index);
void insert_slice(LabelVolume& volume, Axis axis, std::int64_t index, const LabelMap& map);

template <typename T>
Volume<T> crop(const Volume<T>& volume, const Box& box) {
  if (box.volume() == 0 || !volume.bounds().contains(box.lo) ||
      !volume.bounds().contains(box.hi - Vec3{1, 1, 1})) {
    throw InvalidArgument("crop box outside volume");
  }
  Volume<T> out(box.extent(), T{}, volume.meta().origin + box.lo);
  for (std::int64_t z = box.lo.z; z < box.hi.z; ++z)
    for (std::int64_t y = box.lo.y; y < box.hi.y; ++y)
      for (std::int64_t x = box.lo.x; x < box.hi.x; ++x)
        out(x - box.lo.x, y - box.lo.y, z - box.lo.z) = volume(x, y, z);
  return out;
}

/// Copies `region` (given in `dst` coordinates) from `src`, whose voxel
/// (0,0,0) sits at `src_offset` in `dst`.
template <typename T>
void paste(Volume<T>& dst, const Volume<T>& src, Vec3 src_offset, const Box& region) {
  for (std::int64_t z = region.lo.z; z < region.hi.z; ++z)
    for (std::int64_t y = region.lo.y; y < region.hi.y; ++y)
      for (std::int64_t x = region.lo.x; x < region.hi.x; ++x)
        dst(x, y, z) = src(x - src_offset.x, y - src_offset.y, z - src_offset.z);
}

std::int64_t count_foreground(const LabelVolume& volume) noexcept;

}  // namespace xxlseg
