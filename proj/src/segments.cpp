#include "xxlseg/segments.hpp"

#include <algorithm>
#include <vector>

namespace xxlseg {

SegmentTable::SegmentTable(const LabelVolume& volume) : total_voxels_(volume.size()) {
  const Vec3 d = volume.dims();
  Label last = 0;
  SegmentInfo* info = nullptr;
  for (std::int64_t z = 0; z < d.z; ++z)
    for (std::int64_t y = 0; y < d.y; ++y)
      for (std::int64_t x = 0; x < d.x; ++x) {
        const Label l = volume(x, y, z);
        if (l == 0) continue;
        if (l != last || info == nullptr) {
          auto [it, fresh] = entries_.try_emplace(l);
          info = &it->second;
          if (fresh) info->bbox_min = info->bbox_max = Vec3{x, y, z};
          last = l;
        }
        ++info->voxel_count;
        info->bbox_min = {std::min(info->bbox_min.x, x), std::min(info->bbox_min.y, y),
                          std::min(info->bbox_min.z, z)};
        info->bbox_max = {std::max(info->bbox_max.x, x), std::max(info->bbox_max.y, y),
                          std::max(info->bbox_max.z, z)};
      }
}

std::int64_t SegmentTable::foreground_voxels() const noexcept {
  std::int64_t n = 0;
  for (const auto& [label, info] : entries_) n += info.voxel_count;
  return n;
}

SegmentReport segment_report(const SegmentTable& table, const VolumeMeta& meta) {
  SegmentReport r;
  r.origin = meta.origin;
  r.dims = meta.dims;
  r.segment_count = table.size();
  if (table.total_voxels() > 0) {
    r.foreground_percent =
        100.0 * static_cast<double>(table.foreground_voxels()) / static_cast<double>(table.total_voxels());
  }
  if (table.empty()) return r;

  std::vector<std::int64_t> sizes;
  sizes.reserve(table.size());
  for (const auto& [label, info] : table.entries()) sizes.push_back(info.voxel_count);
  std::sort(sizes.begin(), sizes.end());
  r.min_segment_size = sizes.front();
  r.max_segment_size = sizes.back();
  r.median_segment_size = sizes[(sizes.size() - 1) / 2];
  return r;
}

}  // namespace xxlseg
