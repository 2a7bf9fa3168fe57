#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "xxlseg/phantom.hpp"
#include "xxlseg/segments.hpp"

using namespace xxlseg;

namespace {

// Cells of a disc of radius r on the integer grid, counted column by column.
std::int64_t disc_cells(double r) {
  const auto R = static_cast<std::int64_t>(std::floor(r));
  std::int64_t n = 0;
  for (std::int64_t du = -R; du <= R; ++du) {
    const double rest = r * r - static_cast<double>(du * du);
    n += 2 * static_cast<std::int64_t>(std::floor(std::sqrt(rest) + 1e-12)) + 1;
  }
  return n;
}

std::int64_t local_instances(const LabelMap& m) {
  std::int64_t n = 0;
  for (const auto& [l, c] : oracle::histogram(m)) n += l != 0;
  return n;
}

std::int64_t stack_instances(const SliceStack& s) {
  std::int64_t n = 0;
  for (Axis a : kAxes)
    for (const LabelMap& m : s.maps(a)) n += local_instances(m);
  return n;
}

}  // namespace

TEST_CASE("an empty spec renders an all-background phantom") {
  PhantomSpec spec;
  spec.dims = {10, 9, 8};
  spec.noise_sigma = 0.0;
  const Phantom ph = generate_phantom(spec);
  CHECK(count_foreground(ph.labels) == 0);
  for (float v : ph.intensity.voxels()) CHECK(v == 0.0f);
}

TEST_CASE("rasterized shapes match analytic voxel counts") {
  PhantomSpec spec;
  spec.dims = {64, 64, 64};
  spec.seed = 11;
  ObjectSpec sheet;
  sheet.kind = ShapeKind::Sheet;
  sheet.axis = Axis::Y;
  sheet.thickness = 3;
  sheet.extent = std::pair{40, 30};
  spec.objects.push_back(sheet);
  ObjectSpec pipe;
  pipe.kind = ShapeKind::Pipe;
  pipe.axis = Axis::X;
  pipe.radius = 3.5;
  pipe.length = 30;
  spec.objects.push_back(pipe);
  for (double r : {1.5, 2.0, 2.9}) {
    ObjectSpec rivet;
    rivet.kind = ShapeKind::Rivet;
    rivet.radius = r;
    rivet.length = 5;
    spec.objects.push_back(rivet);
  }
  const Phantom ph = generate_phantom(spec);
  const SegmentTable table(ph.labels);
  REQUIRE(table.size() == 5);
  CHECK(table.voxel_count(1) == 3 * 40 * 30);
  CHECK(table.voxel_count(2) == 30 * disc_cells(3.5));
  CHECK(table.voxel_count(3) == 5 * disc_cells(1.5));
  CHECK(table.voxel_count(4) == 5 * disc_cells(2.0));
  CHECK(table.voxel_count(5) == 5 * disc_cells(2.9));
  CHECK(disc_cells(2.0) == 13);
  CHECK(disc_cells(1.5) == 9);
}

TEST_CASE("phantoms are deterministic in the seed") {
  const PhantomSpec spec = random_phantom_spec(9, {30, 30, 30});
  const Phantom a = generate_phantom(spec), b = generate_phantom(spec);
  CHECK(a.labels == b.labels);
  CHECK(a.intensity == b.intensity);
  PhantomSpec other = spec;
  other.seed = 10;
  CHECK(!(generate_phantom(other).intensity == a.intensity));
}

TEST_CASE("objects are disjoint and separated by the minimum gap") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PhantomSpec spec = random_phantom_spec(seed, {48, 40, 44});
    const Phantom ph = generate_phantom(spec);
    REQUIRE(ph.positions.size() == spec.objects.size());
    // Every rendered voxel sits inside its own object's bbox, so disjoint
    // labels follow from label uniqueness; check the gap instead.
    for (std::int64_t i = 0; i < ph.labels.size(); ++i) {
      const Label l = ph.labels[i];
      if (!l) continue;
      const Vec3 p = ph.labels.coord(i);
      for (std::int64_t dz = -spec.min_gap; dz <= spec.min_gap; ++dz)
        for (std::int64_t dy = -spec.min_gap; dy <= spec.min_gap; ++dy)
          for (std::int64_t dx = -spec.min_gap; dx <= spec.min_gap; ++dx) {
            const Vec3 q = p + Vec3{dx, dy, dz};
            if (ph.labels.in_bounds(q) && ph.labels[q] != 0) CHECK(ph.labels[q] == l);
          }
    }
    CHECK(oracle::histogram(ph.labels).size() == spec.objects.size());
  }
}

TEST_CASE("explicit collisions and impossible placements are errors") {
  PhantomSpec spec;
  spec.dims = {10, 10, 10};
  ObjectSpec box;
  box.size = {4, 4, 4};
  box.position = Vec3{0, 0, 0};
  spec.objects = {box, box};
  CHECK_THROWS_AS(generate_phantom(spec), Error);
  box.position.reset();
  box.size = {6, 6, 6};
  spec.objects = {box, box};
  CHECK_THROWS_AS(generate_phantom(spec), Error);
  box.size = {11, 1, 1};
  spec.objects = {box};
  CHECK_THROWS_AS(generate_phantom(spec), InvalidArgument);
}

TEST_CASE("perfect_slice_stack") {
  SUBCASE("single cube") {
    LabelVolume v(Vec3{6, 6, 6});
    for (int z = 1; z < 5; ++z)
      for (int y = 1; y < 5; ++y)
        for (int x = 1; x < 5; ++x) v(x, y, z) = 8;
    const SliceStack s = perfect_slice_stack(v);
    for (Axis a : kAxes)
      for (std::int64_t i = 1; i < 5; ++i) {
        CHECK(local_instances(s.map(a, i)) == 1);
        CHECK(s.map(a, i)(2, 2, 0) == 1);
      }
  }
  SUBCASE("two cubes along Z") {
    LabelVolume v(Vec3{4, 4, 10});
    for (int z = 0; z < 10; ++z)
      if (z != 4 && z != 5)
        for (int y = 1; y < 3; ++y)
          for (int x = 1; x < 3; ++x) v(x, y, z) = z < 4 ? 1 : 2;
    const SliceStack s = perfect_slice_stack(v);
    CHECK(local_instances(s.map(Axis::Z, 2)) == 1);
    CHECK(local_instances(s.map(Axis::X, 1)) == 2);
    CHECK(local_instances(s.map(Axis::Y, 2)) == 2);
  }
  SUBCASE("random phantoms match a 2D union-find oracle") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const Phantom ph = generate_phantom(random_phantom_spec(seed, {24, 20, 22}));
      const SliceStack s = perfect_slice_stack(ph.labels);
      LabelVolume mask(ph.labels.dims());
      for (Axis a : kAxes)
        for (std::int64_t i = 0; i < ph.labels.dims()[a]; ++i) {
          const LabelMap raw = extract_slice(ph.labels, a, i);
          const auto comp = oracle::components(raw, 26);
          const auto got = s.map(a, i);
          const std::vector<Label> gv(got.voxels().begin(), got.voxels().end());
          CHECK(oracle::same_partition(comp, gv, std::int64_t{-1}, Label{0}));
          const auto [ua, va] = plane_axes(a);
          for (std::int64_t v = 0; v < raw.dims().y; ++v)
            for (std::int64_t u = 0; u < raw.dims().x; ++u)
              if (got(u, v, 0)) mask[plane_to_volume(a, i, u, v)] = 1;
        }
      for (std::int64_t i = 0; i < mask.size(); ++i) CHECK((mask[i] != 0) == (ph.labels[i] != 0));
    }
  }
}

TEST_CASE("corrupt_stack") {
  const Phantom ph = generate_phantom(random_phantom_spec(2, {32, 32, 32}));
  const SliceStack stack = perfect_slice_stack(ph.labels);
  const std::int64_t before = stack_instances(stack);

  CHECK(corrupt_stack(stack, 1, 0.0, 0.0) == stack);

  CorruptionReport rep;
  const SliceStack dropped = corrupt_stack(stack, 1, 0.0, 1.0, &rep);
  CHECK(stack_instances(dropped) == 0);
  CHECK(rep.drops == before);

  const SliceStack split = corrupt_stack(stack, 1, 0.1, 0.0, &rep);
  CHECK(rep.instances_before == before);
  CHECK(rep.splits > 0);
  CHECK(stack_instances(split) == before + rep.splits);
  CHECK(corrupt_stack(stack, 1, 0.1, 0.0) == split);

  CHECK_THROWS_AS(corrupt_stack(stack, 1, 1.5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(corrupt_stack(stack, 1, 0.0, -0.1), InvalidArgument);
}

TEST_CASE("phantom spec JSON") {
  SUBCASE("round trip") {
    const PhantomSpec spec = random_phantom_spec(4, {40, 30, 20});
    const PhantomSpec back = phantom_spec_from_json(phantom_spec_to_json(spec));
    CHECK(generate_phantom(back).labels == generate_phantom(spec).labels);
  }
  SUBCASE("errors name the field") {
    auto message = [](const std::string& text) {
      try {
        phantom_spec_from_json(text);
      } catch (const InvalidArgument& e) {
        return std::string(e.what());
      }
      return std::string("no error");
    };
    CHECK(message(R"({"objects": []})").rfind("dims", 0) == 0);
    CHECK(message(R"({"dims": [8, 8]})").rfind("dims", 0) == 0);
    CHECK(message(R"({"dims": [8, 8, 8], "objects": [{"type": "pipe"}]})").rfind("objects[0].radius", 0) == 0);
    CHECK(message(R"({"dims": [8, 8, 8], "objects": [{"type": "bracket", "size": [1, 1, 1]}, {"type": "rivet", "radius": -2}]})")
              .rfind("objects[1].radius", 0) == 0);
    CHECK(message(R"({"dims": [8, 8, 8], "objects": [{"type": "cone"}]})").rfind("objects[0].type", 0) == 0);
    CHECK(message(R"({"dims": [8, 8, 8], "noise_sigma": -1})").rfind("noise_sigma", 0) == 0);
    CHECK(message("{").find("malformed") != std::string::npos);
  }
}
