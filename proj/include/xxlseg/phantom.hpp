#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xxlseg/slice_stack.hpp"

namespace xxlseg {

enum class ShapeKind { Sheet, Pipe, Rivet, Bracket };

std::string_view shape_kind_name(ShapeKind k) noexcept;

/// One object of a phantom. Which fields matter depends on `kind`:
///  - Sheet:   thickness along `axis`, in-plane `extent` (defaults to the
///             full volume plane).
///  - Pipe:    solid cylinder of `radius` along `axis`, `length` voxels long
///             (defaults to the full volume extent).
///  - Rivet:   short solid cylinder of `radius` and `length` along `axis`.
///  - Bracket: solid box of `size`.
/// `position` is the lower corner of the object's bounding box; when absent
/// the generator places the object at random.
struct ObjectSpec {
  ShapeKind kind = ShapeKind::Bracket;
  std::int64_t thickness = 3;
  std::optional<std::pair<std::int64_t, std::int64_t>> extent;
  double radius = 2.0;
  std::optional<std::int64_t> length;
  Axis axis = Axis::Z;
  Vec3 size{4, 4, 4};
  std::optional<Vec3> position;
  double contrast = 0.8;
};

struct PhantomSpec {
  Vec3 dims{64, 64, 64};
  Vec3 origin{};
  std::uint64_t seed = 0;
  std::vector<ObjectSpec> objects;
  double noise_sigma = 0.05;
  /// Minimum count of background voxels between two objects along any
  /// axis or diagonal (Chebyshev distance > min_gap).
  std::int64_t min_gap = 2;
  int max_placement_attempts = 200;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Parses the JSON form; errors name the offending field, e.g.
/// "objects[2].radius: expected a positive number".
PhantomSpec phantom_spec_from_json(const std::string& text);
std::string phantom_spec_to_json(const PhantomSpec& spec);

/// Bounding-box extent of an object's rasterization.
Vec3 object_extent(const ObjectSpec& object, Vec3 dims);

struct Phantom {
  ScalarVolume intensity;
  LabelVolume labels;
  /// Final lower corner of every object, in spec order.
  std::vector<Vec3> positions;
};

/// Object k (spec order) gets label k + 1. Throws Error when an object cannot
/// be placed without violating `min_gap` within the attempt budget.
Phantom generate_phantom(const PhantomSpec& spec);

struct RandomPhantomOptions {
  int sheets = 2;
  int pipes = 2;
  int rivets = 3;
  int brackets = 2;
  std::int64_t min_thickness = 3;
  double noise_sigma = 0.05;
};

/// A spec with randomly sized objects scaled to `dims`; positions are left
/// to the generator.
PhantomSpec random_phantom_spec(std::uint64_t seed, Vec3 dims, const RandomPhantomOptions& options = {});

/// Slices `reference` along every axis and renumbers each map by its 2D
/// 8-connected components, so ids carry no cross-slice information.
SliceStack perfect_slice_stack(const LabelVolume& reference);

struct CorruptionReport {
  std::int64_t instances_before = 0;
  std::int64_t splits = 0;
  std::int64_t drops = 0;
};

/// Drops each 2D instance with probability `drop_rate`; otherwise splits it
/// with probability `split_rate` by a random axis-aligned cut through its
/// bounding box. The second part gets a fresh local id.
SliceStack corrupt_stack(const SliceStack& stack, std::uint64_t seed, double split_rate, double drop_rate,
                         CorruptionReport* report = nullptr);

}  // namespace xxlseg
