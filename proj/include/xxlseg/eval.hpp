#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xxlseg/volume.hpp"

namespace xxlseg {

/// IoU of two voxel sets given as sorted, duplicate-free linear indices.
/// Throws InvalidArgument if either set is empty.
double compute_iou(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

/// Reference x detected IoU matrix.
///
/// Rows are reference segments by voxel count (descending, ties by smaller
/// label). Walking the rows in that order, each row claims the unclaimed
/// detected segment with the highest positive IoU; these claimed segments
/// form the leading columns in row order. Unclaimed detected segments
/// follow, by voxel count descending.
struct CorrelationMatrix {
  std::vector<Label> reference_labels;
  std::vector<Label> detected_labels;
  std::vector<std::int64_t> ref_voxel_counts;
  std::vector<std::int64_t> det_voxel_counts;
  std::vector<double> iou;  // row-major, rows() x cols()
  std::vector<std::optional<std::size_t>> diagonal_assignment;

  std::size_t rows() const noexcept { return reference_labels.size(); }
  std::size_t cols() const noexcept { return detected_labels.size(); }
  double at(std::size_t r, std::size_t c) const { return iou[r * cols() + c]; }

  /// IoU of every row with its assigned column, 0 where unmatched.
  std::vector<double> diagonal() const;
};

CorrelationMatrix build_correlation_matrix(const LabelVolume& reference, const LabelVolume& proposal,
                                           std::int64_t min_segment_voxels = 100);

LabelVolume cc_postprocess_proposal(const LabelVolume& proposal,
                                    Connectivity connectivity = Connectivity::TwentySix);

struct GroupStats {
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

/// Large = the first ceil(n/2) rows, Small = the rest. An empty group
/// reports zeros with count 0.
struct DiagonalStats {
  GroupStats all;
  GroupStats large;
  GroupStats small;
};

DiagonalStats diagonal_stats(std::span<const double> diagonal);
DiagonalStats diagonal_stats(const CorrelationMatrix& matrix);

/// {"all": {"max","mean","std","count"}, "large": {...}, "small": {...}}
std::string stats_to_json(const DiagonalStats& stats);

enum class MatrixFormat { Csv, Heatmap };

/// Header `reference\detected,<det labels...>`, then one row per reference
/// label with IoU values printed with 6 decimals.
std::string matrix_to_csv(const CorrelationMatrix& matrix);

/// Binary PGM (P5): one pixel per cell, value round(iou * 255), row 0 on top.
std::string matrix_to_pgm(const CorrelationMatrix& matrix);

void export_matrix(const CorrelationMatrix& matrix, MatrixFormat format, const std::filesystem::path& path);

}  // namespace xxlseg
