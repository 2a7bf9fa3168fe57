#pragma once

#include "xxlseg/preprocess.hpp"

namespace xxlseg {

struct WatershedConfig {
  std::int64_t min_marker_size = 0;
  Connectivity connectivity = Connectivity::Six;
};

/// Connected components of the object class with at least
/// `min_marker_size` voxels, relabelled 1..K in scan order.
LabelVolume extract_markers(const ThreeClassVolume& classes, std::int64_t min_marker_size = 0,
                            Connectivity connectivity = Connectivity::Six);

/// Floods object and border voxels from the markers. Each reachable voxel
/// takes the marker with the smallest geodesic distance, where entering an
/// object voxel costs 0 and a border voxel costs 1; equal distances go to
/// the smaller marker label. Marker voxels keep their label and are not
/// traversed by other markers. Background and unreachable voxels stay 0.
/// Throws InvalidArgument if a marker sits on a non-object voxel.
LabelVolume watershed_instances(const ThreeClassVolume& classes, const LabelVolume& markers,
                                Connectivity connectivity = Connectivity::Six);

LabelVolume run_watershed_pipeline(const ThreeClassVolume& classes, const WatershedConfig& config = {});

}  // namespace xxlseg
