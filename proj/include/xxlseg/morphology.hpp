#pragma once

#include "xxlseg/volume.hpp"

namespace xxlseg {

enum class MorphOp { Dilate, Erode, Close };

/// Structuring elements are the 6- and 26-neighbourhoods.
using StructuringElement = Connectivity;

/// Label-aware binary morphology. Each label is treated as its own binary
/// mask against everything else. Dilate and erode ignore voxels outside the
/// volume; close treats them as background.
///
///  - dilate: background voxels touching one or more labels take one of
///    them; existing labels are never overwritten. Competing labels are
///    ranked by voxel count at the start of the iteration (larger first),
///    then by id (smaller first).
///  - erode: a voxel is cleared when any neighbour carries a different value.
///  - close: per-label dilate-then-erode with the same element and
///    iteration count, computed as if the volume were padded with
///    background, so solids touching the border are not grown there. Only
///    background voxels are filled, ranked as in dilate.
LabelVolume morphology(const LabelVolume& volume, MorphOp op, StructuringElement se, int iterations);

LabelVolume dilate(const LabelVolume& volume, StructuringElement se, int iterations);
LabelVolume erode(const LabelVolume& volume, StructuringElement se, int iterations);
LabelVolume close(const LabelVolume& volume, StructuringElement se, int iterations);

}  // namespace xxlseg
