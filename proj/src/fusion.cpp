#include "xxlseg/fusion.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "xxlseg/morphology.hpp"
#include "xxlseg/parallel.hpp"
#include "xxlseg/segments.hpp"

namespace xxlseg {

void MatchConfig::validate() const {
  auto in_unit = [](double t) { return t > 0.0 && t <= 1.0; };
  if (!in_unit(line_overlap_threshold)) throw InvalidArgument("line_overlap_threshold must lie in (0, 1]");
  if (!in_unit(reinsert_overlap_threshold)) {
    throw InvalidArgument("reinsert_overlap_threshold must lie in (0, 1]");
  }
  if (closing_iterations < 0) throw InvalidArgument("closing_iterations must be >= 0");
}

namespace {

struct MapInstances {
  std::vector<Label> ids;            // ascending
  std::vector<SegmentInfo> infos;    // parallel to ids; bbox in (u, v, 0)
  std::size_t first_node = 0;
};

// Every 2D instance of the stack, numbered in (axis, slice, local id) order.
class InstanceCatalog {
 public:
  explicit InstanceCatalog(const SliceStack& stack) {
    std::size_t node = 0;
    for (Axis a : kAxes) {
      auto& per_axis = maps_[axis_index(a)];
      per_axis.resize(static_cast<std::size_t>(stack.slice_count(a)));
      for (std::int64_t i = 0; i < stack.slice_count(a); ++i) {
        MapInstances& mi = per_axis[static_cast<std::size_t>(i)];
        mi.first_node = node;
        const SegmentTable table(stack.map(a, i));
        for (const auto& [id, info] : table.entries()) {
          mi.ids.push_back(id);
          mi.infos.push_back(info);
          keys_.push_back({a, i, id});
        }
        node += mi.ids.size();
      }
    }
  }

  std::size_t size() const noexcept { return keys_.size(); }
  const InstanceKey& key(std::size_t node) const { return keys_[node]; }
  const MapInstances& map(Axis a, std::int64_t i) const {
    return maps_[axis_index(a)][static_cast<std::size_t>(i)];
  }
  std::size_t node_of(Axis a, std::int64_t i, Label id) const {
    const MapInstances& mi = map(a, i);
    const auto it = std::lower_bound(mi.ids.begin(), mi.ids.end(), id);
    return mi.first_node + static_cast<std::size_t>(it - mi.ids.begin());
  }
  const SegmentInfo& info(std::size_t node) const {
    const InstanceKey& k = keys_[node];
    const MapInstances& mi = map(k.axis, k.slice);
    return mi.infos[node - mi.first_node];
  }

 private:
  std::array<std::vector<MapInstances>, 3> maps_;
  std::vector<InstanceKey> keys_;
};

Axis remaining_axis(Axis a, Axis b) {
  return static_cast<Axis>(3 - axis_index(a) - axis_index(b));
}

// 2D coordinate of volume voxel p inside the map perpendicular to `axis`.
inline Label map_at(const LabelMap& map, Axis axis, const Vec3& p) {
  const auto [ua, va] = plane_axes(axis);
  return map(p[ua], p[va], 0);
}

// Instances in orthogonal maps that share a sufficiently overlapping line
// segment with `node`. Sorted ascending, unique.
std::vector<std::size_t> line_matches(const SliceStack& stack, const InstanceCatalog& cat, std::size_t node,
                                      double threshold) {
  const InstanceKey& k = cat.key(node);
  const SegmentInfo& info = cat.info(node);
  const LabelMap& src = stack.map(k.axis, k.slice);
  const auto [ua, va] = plane_axes(k.axis);
  std::vector<std::size_t> out;

  for (Axis b : kAxes) {
    if (b == k.axis) continue;
    const Axis c = remaining_axis(k.axis, b);
    // Extent of the instance along b and c, read off its (u, v) bbox.
    auto range = [&](Axis ax) -> std::pair<std::int64_t, std::int64_t> {
      return ax == ua ? std::pair{info.bbox_min.x, info.bbox_max.x} : std::pair{info.bbox_min.y, info.bbox_max.y};
    };
    const auto [b_lo, b_hi] = range(b);
    const auto [c_lo, c_hi] = range(c);
    const std::int64_t c_size = stack.dims()[c];

    for (std::int64_t j = b_lo; j <= b_hi; ++j) {
      const LabelMap& dst = stack.map(b, j);
      Vec3 p;
      p[k.axis] = k.slice;
      p[b] = j;
      auto src_at = [&](std::int64_t pos) {
        p[c] = pos;
        return map_at(src, k.axis, p);
      };
      auto dst_at = [&](std::int64_t pos) {
        p[c] = pos;
        return map_at(dst, b, p);
      };

      std::int64_t pos = c_lo;
      while (pos <= c_hi) {
        if (src_at(pos) != k.local_id) {
          ++pos;
          continue;
        }
        const std::int64_t s = pos;
        while (pos + 1 <= c_hi && src_at(pos + 1) == k.local_id) ++pos;
        const std::int64_t e = pos;
        ++pos;

        // Every target run intersecting [s, e].
        std::int64_t q = s;
        while (q <= e) {
          const Label t = dst_at(q);
          if (t == 0) {
            ++q;
            continue;
          }
          std::int64_t ts = q, te = q;
          while (ts - 1 >= 0 && dst_at(ts - 1) == t) --ts;
          while (te + 1 < c_size && dst_at(te + 1) == t) ++te;
          const double inter = static_cast<double>(std::min(e, te) - std::max(s, ts) + 1);
          const double shorter = static_cast<double>(std::min(e - s + 1, te - ts + 1));
          if (inter / shorter > threshold) out.push_back(cat.node_of(b, j, t));
          q = te + 1;
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::int64_t resolve_start_index(const SliceStack& stack, const MatchConfig& config) {
  const std::int64_t n = stack.slice_count(config.start_axis);
  const std::int64_t idx = config.start_index.value_or(n / 2);
  if (idx < 0 || idx >= n) {
    throw InvalidArgument("start index " + std::to_string(idx) + " out of range along " +
                          std::string(axis_name(config.start_axis)));
  }
  return idx;
}

using CountMap = std::unordered_map<Label, std::int64_t>;

CountMap label_counts(const LabelVolume& v) {
  CountMap counts;
  for (Label l : v.voxels())
    if (l != 0) ++counts[l];
  return counts;
}

// Conflict rule: more voxels first, then the smaller id.
bool outranks(Label a, Label b, const CountMap& counts) {
  if (b == 0) return true;
  const auto ca = counts.count(a) ? counts.at(a) : 0;
  const auto cb = counts.count(b) ? counts.at(b) : 0;
  return ca != cb ? ca > cb : a < b;
}

void check_stack(const SliceStack& stack, const LabelVolume* volume) {
  stack.validate();
  if (volume && volume->dims() != stack.dims()) throw InvalidArgument("volume dims differ from slice stack dims");
}

template <typename Fn>
void for_each_instance_voxel(const LabelMap& map, const SegmentInfo& info, Label id, Fn&& fn) {
  for (std::int64_t v = info.bbox_min.y; v <= info.bbox_max.y; ++v)
    for (std::int64_t u = info.bbox_min.x; u <= info.bbox_max.x; ++u)
      if (map(u, v, 0) == id) fn(u, v);
}

}  // namespace

MatchResult match_slices_detailed(const SliceStack& stack, const MatchConfig& config) {
  config.validate();
  check_stack(stack, nullptr);
  const InstanceCatalog cat(stack);
  const std::int64_t start = resolve_start_index(stack, config);

  std::vector<Label> global(cat.size(), 0);
  Label next_id = 1;

  std::vector<std::size_t> seeds;
  const MapInstances& start_map = cat.map(config.start_axis, start);
  for (std::size_t n = 0; n < start_map.ids.size(); ++n) seeds.push_back(start_map.first_node + n);
  for (std::size_t n = 0; n < cat.size(); ++n) seeds.push_back(n);

  for (std::size_t seed : seeds) {
    if (global[seed] != 0) continue;
    global[seed] = next_id++;
    std::vector<std::size_t> frontier{seed};
    while (!frontier.empty()) {
      std::vector<std::vector<std::size_t>> found(frontier.size());
      parallel_for(0, static_cast<std::int64_t>(frontier.size()), [&](std::int64_t f0, std::int64_t f1, int) {
        for (std::int64_t f = f0; f < f1; ++f)
          found[f] = line_matches(stack, cat, frontier[f], config.line_overlap_threshold);
      });
      std::vector<std::size_t> next;
      for (std::size_t f = 0; f < frontier.size(); ++f)
        for (std::size_t t : found[f])
          if (global[t] == 0) {
            global[t] = global[frontier[f]];
            next.push_back(t);
          }
      std::sort(next.begin(), next.end());
      frontier = std::move(next);
    }
  }

  MatchResult result{LabelVolume(stack.dims(), 0, stack.meta().origin), {}};
  result.index.next_global_id = next_id;
  for (std::size_t n = 0; n < cat.size(); ++n) result.index.assignments.emplace(cat.key(n), global[n]);

  const Axis s = config.start_axis;
  for (std::int64_t i = 0; i < stack.slice_count(s); ++i) {
    const LabelMap& map = stack.map(s, i);
    const MapInstances& mi = cat.map(s, i);
    for (std::size_t n = 0; n < mi.ids.size(); ++n) {
      const Label g = global[mi.first_node + n];
      for_each_instance_voxel(map, mi.infos[n], mi.ids[n], [&](std::int64_t u, std::int64_t v) {
        result.volume[plane_to_volume(s, i, u, v)] = g;
      });
    }
  }
  return result;
}

LabelVolume close_line_artefacts(const LabelVolume& volume, const SliceStack& stack, const MatchConfig& config) {
  config.validate();
  check_stack(stack, &volume);
  const Axis s = config.start_axis;
  const SegmentTable table(volume);
  const CountMap counts = label_counts(volume);
  auto is_artefact = [&](Label l) {
    if (l == 0) return false;
    const SegmentInfo& info = table.at(l);
    return info.bbox_min[s] == info.bbox_max[s];
  };

  // Per start-axis slice: voxel count of every label in that slice.
  std::vector<std::unordered_map<Label, std::int64_t>> slice_area(static_cast<std::size_t>(volume.dims()[s]));
  const Vec3 sd = slice_dims(volume.dims(), s);
  for (std::int64_t k = 0; k < volume.dims()[s]; ++k)
    for (std::int64_t v = 0; v < sd.y; ++v)
      for (std::int64_t u = 0; u < sd.x; ++u) {
        const Label l = volume[plane_to_volume(s, k, u, v)];
        if (l != 0) ++slice_area[static_cast<std::size_t>(k)][l];
      }

  LabelVolume out = volume;
  for (std::int64_t k = 0; k < stack.slice_count(s); ++k) {
    const LabelMap& map = stack.map(s, k);
    const SegmentTable instances(map);
    for (const auto& [id, info] : instances.entries()) {
      // The instance's current label, if it is an artefact.
      Label current = 0;
      for_each_instance_voxel(map, info, id, [&](std::int64_t u, std::int64_t v) {
        const Label l = volume[plane_to_volume(s, k, u, v)];
        if (current == 0 && is_artefact(l)) current = l;
      });
      if (current == 0) continue;

      Label best = 0;
      double best_ratio = 0.0;
      for (const std::int64_t nk : {k - 1, k + 1}) {
        if (nk < 0 || nk >= stack.slice_count(s)) continue;
        // Overlap of the instance with each label occupying the neighbour slice.
        std::unordered_map<Label, std::int64_t> inter;
        for_each_instance_voxel(map, info, id, [&](std::int64_t u, std::int64_t v) {
          const Label l = volume[plane_to_volume(s, nk, u, v)];
          if (l != 0 && l != current && !is_artefact(l)) ++inter[l];
        });
        if (inter.empty()) continue;
        const auto& area = slice_area[static_cast<std::size_t>(nk)];
        for (const auto& [l, n] : inter) {
          const double ratio =
              static_cast<double>(n) / static_cast<double>(std::min(info.voxel_count, area.at(l)));
          if (ratio > best_ratio || (ratio == best_ratio && best != 0 && outranks(l, best, counts))) {
            best_ratio = ratio;
            best = l;
          }
        }
      }
      if (best == 0 || !(best_ratio > config.line_overlap_threshold)) continue;
      for_each_instance_voxel(map, info, id, [&](std::int64_t u, std::int64_t v) {
        const Vec3 p = plane_to_volume(s, k, u, v);
        if (volume[p] == current) out[p] = best;
      });
    }
  }
  return out;
}

LabelVolume reinsert_2d_segments(const LabelVolume& volume, const SliceStack& stack, const MatchConfig& config) {
  config.validate();
  check_stack(stack, &volume);
  const CountMap counts = label_counts(volume);
  LabelVolume claims(volume.dims(), 0);

  for (Axis a : kAxes) {
    for (std::int64_t i = 0; i < stack.slice_count(a); ++i) {
      const LabelMap& map = stack.map(a, i);
      const SegmentTable instances(map);
      for (const auto& [id, info] : instances.entries()) {
        std::unordered_map<Label, std::int64_t> overlap;
        for_each_instance_voxel(map, info, id, [&](std::int64_t u, std::int64_t v) {
          const Label l = volume[plane_to_volume(a, i, u, v)];
          if (l != 0) ++overlap[l];
        });
        Label dominant = 0;
        std::int64_t dominant_n = 0;
        for (const auto& [l, n] : overlap) {
          if (n > dominant_n || (n == dominant_n && outranks(l, dominant, counts))) {
            dominant = l;
            dominant_n = n;
          }
        }
        if (dominant == 0) continue;
        const double ratio = static_cast<double>(dominant_n) / static_cast<double>(info.voxel_count);
        if (!(ratio > config.reinsert_overlap_threshold)) continue;
        for_each_instance_voxel(map, info, id, [&](std::int64_t u, std::int64_t v) {
          Label& c = claims[plane_to_volume(a, i, u, v)];
          if (c != dominant && outranks(dominant, c, counts)) c = dominant;
        });
      }
    }
  }

  LabelVolume out = volume;
  for (std::int64_t i = 0; i < out.size(); ++i)
    if (claims[i] != 0) out[i] = claims[i];
  return out;
}

LabelVolume run_fusion_pipeline(const SliceStack& stack, const MatchConfig& config) {
  LabelVolume volume = match_slices(stack, config);
  volume = close_line_artefacts(volume, stack, config);

  if (config.closing_iterations > 0) {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(volume.size()), 0);
    for (Axis a : kAxes)
      for (std::int64_t i = 0; i < stack.slice_count(a); ++i) {
        const LabelMap& map = stack.map(a, i);
        const Vec3 sd = map.dims();
        for (std::int64_t v = 0; v < sd.y; ++v)
          for (std::int64_t u = 0; u < sd.x; ++u)
            if (map(u, v, 0) != 0) seen[volume.index(plane_to_volume(a, i, u, v))] = 1;
      }
    const LabelVolume closed = close(volume, config.closing_element, config.closing_iterations);
    for (std::int64_t i = 0; i < volume.size(); ++i)
      if (volume[i] == 0 && seen[i]) volume[i] = closed[i];
  }
  return reinsert_2d_segments(volume, stack, config);
}

std::int64_t count_line_artefacts(const LabelVolume& volume, Axis axis) {
  const Vec3 d = volume.dims();
  const auto [ua, va] = plane_axes(axis);
  std::int64_t count = 0;
  for (std::int64_t v = 0; v < d[va]; ++v)
    for (std::int64_t u = 0; u < d[ua]; ++u) {
      std::int64_t k = 0;
      while (k < d[axis]) {
        const Label l = volume[plane_to_volume(axis, k, u, v)];
        std::int64_t e = k;
        while (e + 1 < d[axis] && volume[plane_to_volume(axis, e + 1, u, v)] == l) ++e;
        if (l != 0 && e == k) ++count;
        k = e + 1;
      }
    }
  return count;
}

}  // namespace xxlseg
