#pragma once

#include <cstddef>

#include "xxlseg/volume.hpp"

namespace xxlseg {

/// Splits every label into its maximal connected pieces. Output labels are
/// 1..K in the scan order of each piece's first voxel; background stays 0.
LabelVolume connected_components(const LabelVolume& volume,
                                 Connectivity connectivity = Connectivity::TwentySix);

/// Number of distinct nonzero labels.
std::size_t count_labels(const LabelVolume& volume);

}  // namespace xxlseg
