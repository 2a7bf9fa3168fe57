#include "xxlseg/instancer.hpp"

#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "xxlseg/components.hpp"
#include "xxlseg/segments.hpp"

namespace xxlseg {

LabelVolume extract_markers(const ThreeClassVolume& classes, std::int64_t min_marker_size,
                            Connectivity connectivity) {
  if (min_marker_size < 0) throw InvalidArgument("min_marker_size must be >= 0");
  LabelVolume mask(classes.dims(), 0, classes.meta().origin);
  for (std::int64_t i = 0; i < mask.size(); ++i) mask[i] = classes[i] == VoxelClass::Object ? 1 : 0;
  LabelVolume cc = connected_components(mask, connectivity);
  if (min_marker_size <= 1) return cc;

  const SegmentTable table(cc);
  std::vector<Label> remap(table.size() + 1, 0);
  Label next = 0;
  // Component labels are already in scan order, so keeping their relative
  // order keeps the scan-order numbering.
  for (const auto& [label, info] : table.entries())
    if (info.voxel_count >= min_marker_size) remap[label] = ++next;
  for (Label& l : cc.voxels()) l = remap[l];
  return cc;
}

LabelVolume watershed_instances(const ThreeClassVolume& classes, const LabelVolume& markers,
                                Connectivity connectivity) {
  if (markers.dims() != classes.dims()) throw InvalidArgument("markers and classes differ in dims");
  const Vec3 d = classes.dims();
  const auto offsets = neighbour_offsets(connectivity);

  using Entry = std::tuple<std::int64_t, Label, std::int64_t>;  // (distance, marker, voxel)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<std::int64_t> dist(static_cast<std::size_t>(markers.size()), std::numeric_limits<std::int64_t>::max());
  LabelVolume out(d, 0, classes.meta().origin);

  for (std::int64_t i = 0; i < markers.size(); ++i) {
    const Label m = markers[i];
    if (m == 0) continue;
    if (classes[i] != VoxelClass::Object) {
      const Vec3 p = markers.coord(i);
      throw InvalidArgument("marker " + std::to_string(m) + " placed on " +
                            (classes[i] == VoxelClass::Background ? "background" : "border") + " voxel (" +
                            std::to_string(p.x) + "," + std::to_string(p.y) + "," + std::to_string(p.z) + ")");
    }
    dist[i] = 0;
    out[i] = m;
    queue.emplace(0, m, i);
  }

  std::vector<std::uint8_t> done(static_cast<std::size_t>(markers.size()), 0);
  while (!queue.empty()) {
    const auto [dv, m, i] = queue.top();
    queue.pop();
    if (done[i]) continue;
    done[i] = 1;
    const Vec3 p = out.coord(i);
    for (const Vec3& o : offsets) {
      const Vec3 q = p + o;
      if (!out.in_bounds(q)) continue;
      const std::int64_t j = out.index(q);
      const VoxelClass c = classes[j];
      if (c == VoxelClass::Background || done[j] || markers[j] != 0) continue;
      const std::int64_t nd = dv + (c == VoxelClass::Border ? 1 : 0);
      if (nd < dist[j] || (nd == dist[j] && m < out[j])) {
        dist[j] = nd;
        out[j] = m;
        queue.emplace(nd, m, j);
      }
    }
  }
  return out;
}

LabelVolume run_watershed_pipeline(const ThreeClassVolume& classes, const WatershedConfig& config) {
  const LabelVolume markers = extract_markers(classes, config.min_marker_size, config.connectivity);
  return watershed_instances(classes, markers, config.connectivity);
}

}  // namespace xxlseg
