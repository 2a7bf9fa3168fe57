#pragma once

#include <compare>
#include <map>
#include <optional>

#include "xxlseg/slice_stack.hpp"

namespace xxlseg {

struct MatchConfig {
  /// A line-segment pair matches when |intersection| / |shorter segment|
  /// exceeds this value.
  double line_overlap_threshold = 0.5;
  /// A 2D instance is merged into its dominant 3D label when that label
  /// covers more than this fraction of the instance.
  double reinsert_overlap_threshold = 0.5;
  Axis start_axis = Axis::Z;
  /// Empty selects the middle slice of `start_axis`.
  std::optional<std::int64_t> start_index;
  int closing_iterations = 1;
  Connectivity closing_element = Connectivity::Six;

  /// Throws InvalidArgument unless both thresholds lie in (0, 1].
  void validate() const;
};

/// One 2D instance: a local id within the map (axis, slice).
struct InstanceKey {
  Axis axis = Axis::X;
  std::int64_t slice = 0;
  Label local_id = 0;

  friend auto operator<=>(const InstanceKey&, const InstanceKey&) = default;
};

struct GlobalIndexMap {
  Label next_global_id = 1;
  std::map<InstanceKey, Label> assignments;
};

struct MatchResult {
  LabelVolume volume;
  GlobalIndexMap index;
};

/// Propagates global ids breadth-first from the start slice through the
/// line segments that 2D instances share with orthogonal slices. A match
/// in either orthogonal plane is sufficient. Instances the propagation
/// never reaches seed new ids in (axis, slice, local id) order. The volume
/// is painted from the start axis's maps.
MatchResult match_slices_detailed(const SliceStack& stack, const MatchConfig& config = {});

inline LabelVolume match_slices(const SliceStack& stack, const MatchConfig& config = {}) {
  return match_slices_detailed(stack, config).volume;
}

/// Absorbs slice-thin regions (labels whose extent along the start axis is
/// a single slice) into the label of the overlapping region in an adjacent
/// start-axis slice.
LabelVolume close_line_artefacts(const LabelVolume& volume, const SliceStack& stack,
                                 const MatchConfig& config = {});

/// Sets every 2D instance whose dominant 3D label covers more than
/// `reinsert_overlap_threshold` of it entirely to that label.
LabelVolume reinsert_2d_segments(const LabelVolume& volume, const SliceStack& stack,
                                 const MatchConfig& config = {});

/// match_slices -> close_line_artefacts -> close -> reinsert_2d_segments.
/// Closing only fills voxels that some 2D map marks as foreground.
LabelVolume run_fusion_pipeline(const SliceStack& stack, const MatchConfig& config = {});

/// Maximal runs of length one along `axis` of one foreground label.
std::int64_t count_line_artefacts(const LabelVolume& volume, Axis axis);

}  // namespace xxlseg
