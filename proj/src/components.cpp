#include "xxlseg/components.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>
#include <vector>

namespace xxlseg {
namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
  }

  std::uint32_t find(std::uint32_t i) noexcept {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  // The smaller index becomes the root.
  void unite(std::uint32_t a, std::uint32_t b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

LabelVolume connected_components(const LabelVolume& volume, Connectivity connectivity) {
  const Vec3 d = volume.dims();
  if (volume.size() >= static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max())) {
    throw InvalidArgument("connected_components: volume exceeds 2^32 voxels");
  }
  const auto back = backward_offsets(connectivity);
  DisjointSet sets(static_cast<std::size_t>(volume.size()));

  for (std::int64_t z = 0; z < d.z; ++z)
    for (std::int64_t y = 0; y < d.y; ++y)
      for (std::int64_t x = 0; x < d.x; ++x) {
        const std::int64_t i = volume.index(x, y, z);
        const Label l = volume[i];
        if (l == 0) continue;
        for (const Vec3& o : back) {
          const Vec3 n{x + o.x, y + o.y, z + o.z};
          if (!volume.in_bounds(n)) continue;
          const std::int64_t j = volume.index(n);
          if (volume[j] == l) sets.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
      }

  LabelVolume out(d, 0, volume.meta().origin);
  std::vector<Label> root_label(static_cast<std::size_t>(volume.size()), 0);
  Label next = 0;
  for (std::int64_t i = 0; i < volume.size(); ++i) {
    if (volume[i] == 0) continue;
    const std::uint32_t r = sets.find(static_cast<std::uint32_t>(i));
    if (root_label[r] == 0) root_label[r] = ++next;
    out[i] = root_label[r];
  }
  return out;
}

std::size_t count_labels(const LabelVolume& volume) {
  std::unordered_set<Label> labels;
  Label last = 0;
  for (Label l : volume.voxels()) {
    if (l != 0 && l != last) labels.insert(l);
    last = l;
  }
  return labels.size();
}

}  // namespace xxlseg
