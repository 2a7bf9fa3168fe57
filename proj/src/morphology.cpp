#include "xxlseg/morphology.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "xxlseg/parallel.hpp"
#include "xxlseg/segments.hpp"

namespace xxlseg {
namespace {

using CountMap = std::unordered_map<Label, std::int64_t>;

CountMap label_counts(const LabelVolume& v) {
  CountMap counts;
  for (Label l : v.voxels())
    if (l != 0) ++counts[l];
  return counts;
}

// True when candidate `a` outranks `b` under the (count desc, id asc) rule.
bool outranks(Label a, Label b, const CountMap& counts) {
  if (b == 0) return true;
  const std::int64_t ca = counts.at(a), cb = counts.at(b);
  return ca != cb ? ca > cb : a < b;
}

void check_iterations(int iterations) {
  if (iterations < 1) throw InvalidArgument("morphology iterations must be >= 1");
}

LabelVolume dilate_once(const LabelVolume& src, StructuringElement se, const CountMap& counts) {
  LabelVolume dst = src;
  const Vec3 d = src.dims();
  const auto offsets = neighbour_offsets(se);
  parallel_for(0, d.z, [&](std::int64_t z0, std::int64_t z1, int) {
    for (std::int64_t z = z0; z < z1; ++z)
      for (std::int64_t y = 0; y < d.y; ++y)
        for (std::int64_t x = 0; x < d.x; ++x) {
          if (src(x, y, z) != 0) continue;
          Label best = 0;
          for (const Vec3& o : offsets) {
            const Vec3 n{x + o.x, y + o.y, z + o.z};
            if (!src.in_bounds(n)) continue;
            const Label l = src[n];
            if (l != 0 && l != best && outranks(l, best, counts)) best = l;
          }
          dst(x, y, z) = best;
        }
  });
  return dst;
}

LabelVolume erode_once(const LabelVolume& src, StructuringElement se) {
  LabelVolume dst = src;
  const Vec3 d = src.dims();
  const auto offsets = neighbour_offsets(se);
  parallel_for(0, d.z, [&](std::int64_t z0, std::int64_t z1, int) {
    for (std::int64_t z = z0; z < z1; ++z)
      for (std::int64_t y = 0; y < d.y; ++y)
        for (std::int64_t x = 0; x < d.x; ++x) {
          const Label l = src(x, y, z);
          if (l == 0) continue;
          for (const Vec3& o : offsets) {
            const Vec3 n{x + o.x, y + o.y, z + o.z};
            if (src.in_bounds(n) && src[n] != l) {
              dst(x, y, z) = 0;
              break;
            }
          }
        }
  });
  return dst;
}

// Binary mask over a box that may reach past the volume; anything outside
// the box reads as unset.
class RegionMask {
 public:
  explicit RegionMask(Box region)
      : region_(region), ext_(region.extent()), bits_(static_cast<std::size_t>(region.volume()), 0) {}

  bool get(Vec3 p) const {
    if (!region_.contains(p)) return false;
    return bits_[idx(p)] != 0;
  }
  void set(Vec3 p, bool v) { bits_[idx(p)] = v ? 1 : 0; }

  RegionMask step(std::span<const Vec3> offsets, bool dilation) const {
    RegionMask out = *this;
    for (std::int64_t z = region_.lo.z; z < region_.hi.z; ++z)
      for (std::int64_t y = region_.lo.y; y < region_.hi.y; ++y)
        for (std::int64_t x = region_.lo.x; x < region_.hi.x; ++x) {
          const Vec3 p{x, y, z};
          const bool here = get(p);
          if (dilation == here) continue;
          for (const Vec3& o : offsets) {
            if (get(p + o) == dilation) {
              out.set(p, dilation);
              break;
            }
          }
        }
    return out;
  }

 private:
  std::size_t idx(Vec3 p) const {
    return static_cast<std::size_t>((p.x - region_.lo.x) +
                                    ext_.x * ((p.y - region_.lo.y) + ext_.y * (p.z - region_.lo.z)));
  }

  Box region_;
  Vec3 ext_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace

LabelVolume dilate(const LabelVolume& volume, StructuringElement se, int iterations) {
  check_iterations(iterations);
  LabelVolume cur = volume;
  for (int it = 0; it < iterations; ++it) cur = dilate_once(cur, se, label_counts(cur));
  return cur;
}

LabelVolume erode(const LabelVolume& volume, StructuringElement se, int iterations) {
  check_iterations(iterations);
  LabelVolume cur = volume;
  for (int it = 0; it < iterations; ++it) cur = erode_once(cur, se);
  return cur;
}

LabelVolume close(const LabelVolume& volume, StructuringElement se, int iterations) {
  check_iterations(iterations);
  const SegmentTable table(volume);
  const Vec3 d = volume.dims();
  const auto offsets = neighbour_offsets(se);
  CountMap counts;
  for (const auto& [label, info] : table.entries()) counts[label] = info.voxel_count;

  LabelVolume claims(d, 0);
  for (const auto& [label, info] : table.entries()) {
    // The dilation may grow past the volume; the mask follows it there so
    // the erosion sees background outside rather than a wall.
    const Vec3 k{iterations, iterations, iterations};
    const Box region{info.bbox_min - k, info.bbox_max + Vec3{1, 1, 1} + k};
    RegionMask mask(region);
    for (std::int64_t z = info.bbox_min.z; z <= info.bbox_max.z; ++z)
      for (std::int64_t y = info.bbox_min.y; y <= info.bbox_max.y; ++y)
        for (std::int64_t x = info.bbox_min.x; x <= info.bbox_max.x; ++x)
          if (volume(x, y, z) == label) mask.set({x, y, z}, true);
    for (int it = 0; it < iterations; ++it) mask = mask.step(offsets, true);
    for (int it = 0; it < iterations; ++it) mask = mask.step(offsets, false);

    for (std::int64_t z = info.bbox_min.z; z <= info.bbox_max.z; ++z)
      for (std::int64_t y = info.bbox_min.y; y <= info.bbox_max.y; ++y)
        for (std::int64_t x = info.bbox_min.x; x <= info.bbox_max.x; ++x) {
          if (volume(x, y, z) != 0 || !mask.get({x, y, z})) continue;
          Label& c = claims(x, y, z);
          if (outranks(label, c, counts)) c = label;
        }
  }

  LabelVolume out = volume;
  for (std::int64_t i = 0; i < out.size(); ++i)
    if (out[i] == 0) out[i] = claims[i];
  return out;
}

LabelVolume morphology(const LabelVolume& volume, MorphOp op, StructuringElement se, int iterations) {
  switch (op) {
    case MorphOp::Dilate: return dilate(volume, se, iterations);
    case MorphOp::Erode: return erode(volume, se, iterations);
    default: return close(volume, se, iterations);
  }
}

}  // namespace xxlseg
