#include "xxlseg/geometry.hpp"

#include <string>
#include <vector>

#include "xxlseg/error.hpp"

namespace xxlseg {
namespace {

struct OffsetTables {
  std::vector<Vec3> six, twenty_six, six_back, twenty_six_back;

  OffsetTables() {
    for (std::int64_t dz = -1; dz <= 1; ++dz)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const Vec3 d{dx, dy, dz};
          const bool face = (dx != 0) + (dy != 0) + (dz != 0) == 1;
          // Scan order is x-fastest, so "before" compares z, then y, then x.
          const bool back = dz < 0 || (dz == 0 && (dy < 0 || (dy == 0 && dx < 0)));
          twenty_six.push_back(d);
          if (back) twenty_six_back.push_back(d);
          if (face) {
            six.push_back(d);
            if (back) six_back.push_back(d);
          }
        }
  }
};

const OffsetTables& tables() {
  static const OffsetTables t;
  return t;
}

}  // namespace

Connectivity connectivity_from_int(int n) {
  switch (n) {
    case 4:
    case 6: return Connectivity::Six;
    case 8:
    case 26: return Connectivity::TwentySix;
    default: throw InvalidArgument("connectivity must be 6 or 26, got " + std::to_string(n));
  }
}

std::span<const Vec3> neighbour_offsets(Connectivity c) noexcept {
  return c == Connectivity::Six ? std::span<const Vec3>(tables().six)
                                : std::span<const Vec3>(tables().twenty_six);
}

std::span<const Vec3> backward_offsets(Connectivity c) noexcept {
  return c == Connectivity::Six ? std::span<const Vec3>(tables().six_back)
                                : std::span<const Vec3>(tables().twenty_six_back);
}

}  // namespace xxlseg
