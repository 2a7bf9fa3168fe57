#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace xxlseg {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

constexpr int axis_index(Axis a) noexcept { return static_cast<int>(a); }
constexpr std::string_view axis_name(Axis a) noexcept {
  switch (a) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    default: return "Z";
  }
}

/// Integer voxel coordinate or extent.
struct Vec3 {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  constexpr std::int64_t& operator[](int a) noexcept { return a == 0 ? x : (a == 1 ? y : z); }
  constexpr std::int64_t operator[](int a) const noexcept { return a == 0 ? x : (a == 1 ? y : z); }
  constexpr std::int64_t& operator[](Axis a) noexcept { return (*this)[axis_index(a)]; }
  constexpr std::int64_t operator[](Axis a) const noexcept { return (*this)[axis_index(a)]; }

  constexpr std::int64_t product() const noexcept { return x * y * z; }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
};

/// Half-open axis-aligned box [lo, hi).
struct Box {
  Vec3 lo;
  Vec3 hi;

  constexpr Vec3 extent() const noexcept { return hi - lo; }
  constexpr std::int64_t volume() const noexcept {
    const Vec3 e = extent();
    return (e.x > 0 && e.y > 0 && e.z > 0) ? e.product() : 0;
  }
  constexpr bool contains(Vec3 p) const noexcept {
    return p.x >= lo.x && p.x < hi.x && p.y >= lo.y && p.y < hi.y && p.z >= lo.z && p.z < hi.z;
  }

  friend constexpr bool operator==(const Box&, const Box&) = default;
};

/// Voxel neighbourhoods. In a (w, h, 1) plane, Six acts as 4- and
/// TwentySix as 8-connectivity.
enum class Connectivity : int { Six = 6, TwentySix = 26 };

/// Parses 6 or 26 (4 and 8 are accepted as their planar aliases).
Connectivity connectivity_from_int(int n);

/// Neighbour offsets of the given connectivity, excluding the origin.
std::span<const Vec3> neighbour_offsets(Connectivity c) noexcept;

/// The neighbours that precede a voxel in x-fastest scan order.
std::span<const Vec3> backward_offsets(Connectivity c) noexcept;

}  // namespace xxlseg
