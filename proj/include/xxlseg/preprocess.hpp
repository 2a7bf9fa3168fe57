#pragma once

#include <vector>

#include "xxlseg/volume.hpp"

namespace xxlseg {

enum class VoxelClass : Label { Background = 0, Object = 1, Border = 2 };

/// Label volume restricted to the values {0 background, 1 object, 2 border}.
class ThreeClassVolume {
 public:
  /// Throws InvalidArgument if any voxel is outside {0, 1, 2}.
  explicit ThreeClassVolume(LabelVolume classes);

  const LabelVolume& volume() const noexcept { return classes_; }
  const VolumeMeta& meta() const noexcept { return classes_.meta(); }
  Vec3 dims() const noexcept { return classes_.dims(); }
  VoxelClass operator[](std::int64_t i) const noexcept { return static_cast<VoxelClass>(classes_[i]); }
  VoxelClass operator[](Vec3 p) const noexcept { return static_cast<VoxelClass>(classes_[p]); }

 private:
  LabelVolume classes_;
};

struct TvDenoiseParams {
  double weight = 0.1;
  int max_iterations = 100;
  double tolerance = 1e-4;
};

struct TvDenoiseResult {
  ScalarVolume volume;
  /// Objective at the input (index 0) and after every iteration.
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
};

/// Total-variation (ROF) denoising in 3D by dual projection:
/// minimises 0.5 * ||u - f||^2 + weight * TV(u) with the isotropic
/// forward-difference gradient and Neumann boundaries. Iterates until the
/// largest voxel update falls below `tolerance` or `max_iterations` is hit.
TvDenoiseResult tv_denoise_traced(const ScalarVolume& input, const TvDenoiseParams& params = {});

inline ScalarVolume tv_denoise(const ScalarVolume& input, const TvDenoiseParams& params = {}) {
  return tv_denoise_traced(input, params).volume;
}

/// 0.5 * ||u - f||^2 + weight * sum |grad u|, evaluated in double precision.
double rof_objective(const ScalarVolume& u, const ScalarVolume& f, double weight);

/// Foreground voxels within `border_thickness` (6-neighbour steps) of a
/// voxel with another value become border; the rest of the foreground is
/// object. Voxels outside the volume never count as "another value".
ThreeClassVolume labels_to_three_class(const LabelVolume& reference, int border_thickness = 1);

}  // namespace xxlseg
