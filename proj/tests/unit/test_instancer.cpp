#include <doctest.h>

#include "support/oracles.hpp"
#include "xxlseg/eval.hpp"
#include "xxlseg/instancer.hpp"
#include "xxlseg/phantom.hpp"

using namespace xxlseg;

namespace {

ThreeClassVolume random_classes(Rng& rng, Vec3 dims) {
  LabelVolume v(dims);
  for (Label& l : v.voxels()) {
    const double u = rng.uniform();
    l = u < 0.2 ? 0 : u < 0.75 ? 1 : 2;
  }
  return ThreeClassVolume(v);
}

}  // namespace

TEST_CASE("extract_markers labels object components in scan order") {
  LabelVolume v(Vec3{7, 1, 1});
  const Label row[] = {1, 1, 2, 0, 1, 2, 1};
  for (int x = 0; x < 7; ++x) v(x, 0, 0) = row[x];
  const LabelVolume m = extract_markers(ThreeClassVolume(v));
  const Label want[] = {1, 1, 0, 0, 2, 0, 3};
  for (int x = 0; x < 7; ++x) CHECK(m(x, 0, 0) == want[x]);

  const LabelVolume big = extract_markers(ThreeClassVolume(v), 2);
  const Label want_big[] = {1, 1, 0, 0, 0, 0, 0};
  for (int x = 0; x < 7; ++x) CHECK(big(x, 0, 0) == want_big[x]);
  CHECK_THROWS_AS(extract_markers(ThreeClassVolume(v), -1), InvalidArgument);
}

TEST_CASE("a border wall is split between the two nearer markers") {
  // 7x3x3: objects at x=0 and x=6, border in between.
  LabelVolume v(Vec3{7, 3, 3}, 2);
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y) {
      v(0, y, z) = 1;
      v(6, y, z) = 1;
    }
  const ThreeClassVolume classes(v);
  const LabelVolume markers = extract_markers(classes);
  const LabelVolume got = watershed_instances(classes, markers);
  CHECK(got == oracle::geodesic_labels(v, markers, 6));
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x <= 3; ++x) CHECK(got(x, y, z) == 1);
      for (int x = 4; x < 7; ++x) CHECK(got(x, y, z) == 2);
    }
}

TEST_CASE("watershed matches the shortest-path oracle on random volumes") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec3 dims{rng.uniform_int(1, 10), rng.uniform_int(1, 10), rng.uniform_int(1, 10)};
    const ThreeClassVolume classes = random_classes(rng, dims);
    for (Connectivity c : {Connectivity::Six, Connectivity::TwentySix}) {
      const LabelVolume markers = extract_markers(classes, 0, c);
      const LabelVolume got = watershed_instances(classes, markers, c);
      CHECK(got == oracle::geodesic_labels(classes.volume(), markers, static_cast<int>(c)));
    }
  }
}

TEST_CASE("watershed leaves unreachable and background voxels unlabelled") {
  LabelVolume v(Vec3{5, 1, 1});
  const Label row[] = {1, 0, 2, 2, 0};
  for (int x = 0; x < 5; ++x) v(x, 0, 0) = row[x];
  const LabelVolume got = run_watershed_pipeline(ThreeClassVolume(v));
  const Label want[] = {1, 0, 0, 0, 0};
  for (int x = 0; x < 5; ++x) CHECK(got(x, 0, 0) == want[x]);
}

TEST_CASE("markers on non-object voxels are rejected") {
  LabelVolume v(Vec3{3, 1, 1});
  v(0, 0, 0) = 1;
  v(1, 0, 0) = 2;
  LabelVolume markers(Vec3{3, 1, 1});
  markers(2, 0, 0) = 1;
  CHECK_THROWS_AS(watershed_instances(ThreeClassVolume(v), markers), InvalidArgument);
  markers(2, 0, 0) = 0;
  markers(1, 0, 0) = 1;
  CHECK_THROWS_AS(watershed_instances(ThreeClassVolume(v), markers), InvalidArgument);
  CHECK_THROWS_AS(watershed_instances(ThreeClassVolume(v), LabelVolume(Vec3{3, 1, 2})), InvalidArgument);
}

TEST_CASE("watershed recovers phantom instances from the three-class volume") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Phantom ph = generate_phantom(random_phantom_spec(seed, {40, 40, 40}));
    const LabelVolume got = run_watershed_pipeline(labels_to_three_class(ph.labels, 1));
    const auto ref_hist = oracle::histogram(ph.labels);
    const auto got_hist = oracle::histogram(got);
    CHECK(got_hist.size() == ref_hist.size());
    const auto m = build_correlation_matrix(ph.labels, got, 1);
    for (double d : m.diagonal()) CHECK(d >= 0.9);
  }
}

TEST_CASE("watershed labels are a fixed point of the pipeline") {
  const Phantom ph = generate_phantom(random_phantom_spec(7, {32, 32, 32}));
  const LabelVolume once = run_watershed_pipeline(labels_to_three_class(ph.labels, 1));
  const LabelVolume twice = run_watershed_pipeline(labels_to_three_class(once, 1));
  CHECK(oracle::same_partition(once, twice));
}
