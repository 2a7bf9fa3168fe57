#include "xxlseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "xxlseg/components.hpp"
#include "xxlseg/parallel.hpp"
#include "xxlseg/segments.hpp"

namespace xxlseg {

double compute_iou(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("compute_iou: segments must be nonempty");
  std::size_t i = 0, j = 0, inter = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const double uni = static_cast<double>(a.size() + b.size() - inter);
  return static_cast<double>(inter) / uni;
}

std::vector<double> CorrelationMatrix::diagonal() const {
  std::vector<double> d(rows(), 0.0);
  for (std::size_t r = 0; r < rows(); ++r)
    if (diagonal_assignment[r]) d[r] = at(r, *diagonal_assignment[r]);
  return d;
}

namespace {

struct Segment {
  Label label;
  std::int64_t count;
};

// Kept segments by count descending, then label ascending.
std::vector<Segment> sorted_segments(const SegmentTable& table, std::int64_t min_voxels) {
  std::vector<Segment> out;
  for (const auto& [label, info] : table.entries())
    if (info.voxel_count >= min_voxels) out.push_back({label, info.voxel_count});
  std::sort(out.begin(), out.end(), [](const Segment& a, const Segment& b) {
    return a.count != b.count ? a.count > b.count : a.label < b.label;
  });
  return out;
}

std::uint64_t pair_key(std::size_t r, std::size_t d) {
  return (static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint64_t>(d);
}

}  // namespace

CorrelationMatrix build_correlation_matrix(const LabelVolume& reference, const LabelVolume& proposal,
                                           std::int64_t min_segment_voxels) {
  if (reference.dims() != proposal.dims()) throw InvalidArgument("reference and proposal dims differ");
  if (min_segment_voxels < 0) throw InvalidArgument("min_segment_voxels must be >= 0");

  const std::vector<Segment> refs = sorted_segments(SegmentTable(reference), min_segment_voxels);
  const std::vector<Segment> dets = sorted_segments(SegmentTable(proposal), min_segment_voxels);

  std::unordered_map<Label, std::size_t> ref_row, det_idx;
  for (std::size_t r = 0; r < refs.size(); ++r) ref_row[refs[r].label] = r;
  for (std::size_t d = 0; d < dets.size(); ++d) det_idx[dets[d].label] = d;

  // Intersection counts per (row, detected) pair.
  const int workers = thread_count();
  std::vector<std::unordered_map<std::uint64_t, std::int64_t>> partial(static_cast<std::size_t>(workers));
  parallel_for(0, reference.size(), [&](std::int64_t i0, std::int64_t i1, int w) {
    auto& local = partial[static_cast<std::size_t>(w)];
    Label last_r = 0, last_d = 0;
    std::size_t r_idx = 0, d_idx = 0;
    bool r_ok = false, d_ok = false;
    for (std::int64_t i = i0; i < i1; ++i) {
      const Label rl = reference[i], dl = proposal[i];
      if (rl == 0 || dl == 0) continue;
      if (rl != last_r) {
        const auto it = ref_row.find(rl);
        r_ok = it != ref_row.end();
        if (r_ok) r_idx = it->second;
        last_r = rl;
      }
      if (dl != last_d) {
        const auto it = det_idx.find(dl);
        d_ok = it != det_idx.end();
        if (d_ok) d_idx = it->second;
        last_d = dl;
      }
      if (r_ok && d_ok) ++local[pair_key(r_idx, d_idx)];
    }
  });
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> row_hits(refs.size());
  {
    std::unordered_map<std::uint64_t, std::int64_t> merged;
    for (const auto& m : partial)
      for (const auto& [k, n] : m) merged[k] += n;
    for (const auto& [k, n] : merged) row_hits[k >> 32].emplace_back(k & 0xffffffffu, n);
    for (auto& hits : row_hits) std::sort(hits.begin(), hits.end());
  }
  auto iou_of = [&](std::size_t r, std::size_t d, std::int64_t inter) {
    return static_cast<double>(inter) / static_cast<double>(refs[r].count + dets[d].count - inter);
  };

  // Greedy single assignment, largest reference first.
  std::vector<std::uint8_t> claimed(dets.size(), 0);
  std::vector<std::optional<std::size_t>> row_det(refs.size());
  for (std::size_t r = 0; r < refs.size(); ++r) {
    std::optional<std::size_t> best;
    double best_iou = 0.0;
    for (const auto& [d, inter] : row_hits[r]) {
      if (claimed[d]) continue;
      const double v = iou_of(r, d, inter);
      // dets is sorted by (count desc, label asc), so a smaller index wins ties.
      if (v > best_iou || (best && v == best_iou && d < *best)) {
        best = d;
        best_iou = v;
      }
    }
    if (best) {
      claimed[*best] = 1;
      row_det[r] = best;
    }
  }

  CorrelationMatrix m;
  std::vector<std::size_t> column_of(dets.size());
  for (std::size_t r = 0; r < refs.size(); ++r) {
    if (!row_det[r]) continue;
    column_of[*row_det[r]] = m.detected_labels.size();
    m.detected_labels.push_back(dets[*row_det[r]].label);
    m.det_voxel_counts.push_back(dets[*row_det[r]].count);
  }
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (claimed[d]) continue;
    column_of[d] = m.detected_labels.size();
    m.detected_labels.push_back(dets[d].label);
    m.det_voxel_counts.push_back(dets[d].count);
  }
  for (const Segment& s : refs) {
    m.reference_labels.push_back(s.label);
    m.ref_voxel_counts.push_back(s.count);
  }
  m.iou.assign(m.rows() * m.cols(), 0.0);
  m.diagonal_assignment.resize(m.rows());
  for (std::size_t r = 0; r < refs.size(); ++r) {
    for (const auto& [d, inter] : row_hits[r]) m.iou[r * m.cols() + column_of[d]] = iou_of(r, d, inter);
    if (row_det[r]) m.diagonal_assignment[r] = column_of[*row_det[r]];
  }
  return m;
}

LabelVolume cc_postprocess_proposal(const LabelVolume& proposal, Connectivity connectivity) {
  return connected_components(proposal, connectivity);
}

namespace {

GroupStats group_stats(std::span<const double> values) {
  GroupStats g;
  g.count = values.size();
  if (values.empty()) return g;
  double sum = 0.0;
  g.max = values.front();
  for (double v : values) {
    sum += v;
    g.max = std::max(g.max, v);
  }
  g.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - g.mean) * (v - g.mean);
  g.std = std::sqrt(sq / static_cast<double>(values.size()));
  return g;
}

}  // namespace

DiagonalStats diagonal_stats(std::span<const double> diagonal) {
  if (diagonal.empty()) throw InvalidArgument("diagonal_stats: matrix has no rows");
  const std::size_t half = (diagonal.size() + 1) / 2;
  return {group_stats(diagonal), group_stats(diagonal.first(half)), group_stats(diagonal.subspan(half))};
}

DiagonalStats diagonal_stats(const CorrelationMatrix& matrix) {
  const std::vector<double> d = matrix.diagonal();
  return diagonal_stats(std::span<const double>(d));
}

std::string stats_to_json(const DiagonalStats& stats) {
  auto group = [](const GroupStats& g) {
    return nlohmann::json{{"max", g.max}, {"mean", g.mean}, {"std", g.std}, {"count", g.count}};
  };
  const nlohmann::json j{{"all", group(stats.all)}, {"large", group(stats.large)}, {"small", group(stats.small)}};
  return j.dump(2);
}

std::string matrix_to_csv(const CorrelationMatrix& matrix) {
  std::string out = "reference\\detected";
  for (Label d : matrix.detected_labels) out += "," + std::to_string(d);
  out += '\n';
  char buf[32];
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out += std::to_string(matrix.reference_labels[r]);
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.6f", matrix.at(r, c));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string matrix_to_pgm(const CorrelationMatrix& matrix) {
  std::string out = "P5\n" + std::to_string(matrix.cols()) + " " + std::to_string(matrix.rows()) + "\n255\n";
  out.reserve(out.size() + matrix.iou.size());
  for (double v : matrix.iou) out.push_back(static_cast<char>(static_cast<std::uint8_t>(std::lround(v * 255.0))));
  return out;
}

void export_matrix(const CorrelationMatrix& matrix, MatrixFormat format, const std::filesystem::path& path) {
  const std::string bytes = format == MatrixFormat::Csv ? matrix_to_csv(matrix) : matrix_to_pgm(matrix);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoErrorKind::IoFailure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(IoErrorKind::IoFailure, "failed writing " + path.string());
}

}  // namespace xxlseg
