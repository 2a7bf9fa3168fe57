#pragma once

#include <cstdint>
#include <map>

#include "xxlseg/volume.hpp"

namespace xxlseg {

struct SegmentInfo {
  std::int64_t voxel_count = 0;
  Vec3 bbox_min;  // inclusive
  Vec3 bbox_max;  // inclusive
};

/// Per-label voxel counts and tight bounding boxes, ordered by label.
class SegmentTable {
 public:
  SegmentTable() = default;
  explicit SegmentTable(const LabelVolume& volume);

  const std::map<Label, SegmentInfo>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool contains(Label l) const { return entries_.count(l) != 0; }
  const SegmentInfo& at(Label l) const { return entries_.at(l); }
  std::int64_t voxel_count(Label l) const {
    const auto it = entries_.find(l);
    return it == entries_.end() ? 0 : it->second.voxel_count;
  }

  std::int64_t foreground_voxels() const noexcept;
  std::int64_t total_voxels() const noexcept { return total_voxels_; }

 private:
  std::map<Label, SegmentInfo> entries_;
  std::int64_t total_voxels_ = 0;
};

/// Summary metrics of an annotated sub-volume.
struct SegmentReport {
  Vec3 origin;
  Vec3 dims;
  std::size_t segment_count = 0;
  std::int64_t min_segment_size = 0;
  std::int64_t max_segment_size = 0;
  std::int64_t median_segment_size = 0;  // lower median
  double foreground_percent = 0.0;
};

SegmentReport segment_report(const SegmentTable& table, const VolumeMeta& meta);
inline SegmentReport segment_report(const LabelVolume& volume) {
  return segment_report(SegmentTable(volume), volume.meta());
}

}  // namespace xxlseg
