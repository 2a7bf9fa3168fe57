#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support/oracles.hpp"
#include "support/temp_dir.hpp"
#include "xxlseg/eval.hpp"
#include "xxlseg/phantom.hpp"

using namespace xxlseg;

namespace {

void check_against_oracle(const CorrelationMatrix& m, const oracle::MatrixOracle& o) {
  REQUIRE(m.reference_labels == o.rows);
  REQUIRE(m.detected_labels == o.cols);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) CHECK(m.at(r, c) == doctest::Approx(o.iou[r][c]).epsilon(1e-15));
    CHECK(m.diagonal_assignment[r] == o.assign[r]);
  }
}

void fill(LabelVolume& v, Box b, Label l) {
  for (std::int64_t z = b.lo.z; z < b.hi.z; ++z)
    for (std::int64_t y = b.lo.y; y < b.hi.y; ++y)
      for (std::int64_t x = b.lo.x; x < b.hi.x; ++x) v(x, y, z) = l;
}

}  // namespace

TEST_CASE("compute_iou") {
  const std::vector<std::int64_t> a{1, 2, 3, 4}, b{3, 4, 5}, c{7, 8};
  CHECK(compute_iou(a, a) == 1.0);
  CHECK(compute_iou(a, b) == doctest::Approx(2.0 / 5.0));
  CHECK(compute_iou(b, a) == compute_iou(a, b));
  CHECK(compute_iou(a, c) == 0.0);
  CHECK_THROWS_AS(compute_iou({}, a), InvalidArgument);
}

TEST_CASE("perfect segmentation yields an identity matrix") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Phantom ph = generate_phantom(random_phantom_spec(seed, {32, 32, 32}));
    const auto m = build_correlation_matrix(ph.labels, ph.labels);
    REQUIRE(m.rows() == m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) CHECK(m.at(r, c) == (r == c ? 1.0 : 0.0));
    CHECK(diagonal_stats(m).all.mean == 1.0);
  }
}

TEST_CASE("an all-background proposal yields zero columns") {
  LabelVolume ref(Vec3{8, 8, 8});
  fill(ref, Box{{0, 0, 0}, {5, 5, 5}}, 3);
  const auto m = build_correlation_matrix(ref, LabelVolume(Vec3{8, 8, 8}), 1);
  CHECK(m.rows() == 1);
  CHECK(m.cols() == 0);
  CHECK(m.diagonal() == std::vector<double>{0.0});
  CHECK_THROWS_AS(build_correlation_matrix(ref, LabelVolume(Vec3{8, 8, 7})), InvalidArgument);
}

TEST_CASE("correlation matrix matches the exhaustive oracle") {
  SUBCASE("three references, four detections") {
    LabelVolume ref(Vec3{8, 8, 8}), det(Vec3{8, 8, 8});
    fill(ref, Box{{0, 0, 0}, {4, 8, 8}}, 1);
    fill(ref, Box{{4, 0, 0}, {8, 4, 8}}, 2);
    fill(ref, Box{{4, 4, 0}, {8, 8, 4}}, 3);
    fill(det, Box{{0, 0, 0}, {3, 8, 8}}, 10);
    fill(det, Box{{3, 0, 0}, {6, 4, 8}}, 11);
    fill(det, Box{{6, 0, 0}, {8, 8, 8}}, 12);
    fill(det, Box{{3, 5, 0}, {6, 8, 8}}, 13);
    check_against_oracle(build_correlation_matrix(ref, det, 1), oracle::correlation(ref, det, 1));
  }
  SUBCASE("random label volumes") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const Vec3 d{rng.uniform_int(2, 9), rng.uniform_int(2, 9), rng.uniform_int(2, 9)};
      const LabelVolume ref = oracle::random_blobs(rng, d, 6, 6);
      const LabelVolume det = oracle::random_labels(rng, d, 5, 0.3);
      const std::int64_t min = rng.uniform_int(1, 20);
      check_against_oracle(build_correlation_matrix(ref, det, min), oracle::correlation(ref, det, min));
    }
  }
}

TEST_CASE("segments below the voxel minimum are dropped on both sides") {
  LabelVolume v(Vec3{20, 20, 20});
  fill(v, Box{{0, 0, 0}, {9, 11, 1}}, 1);    // 99 voxels
  fill(v, Box{{10, 10, 10}, {18, 17, 12}}, 2);  // 112
  fill(v, Box{{0, 12, 5}, {17, 20, 6}}, 3);  // 136
  const auto hist = oracle::histogram(v);
  REQUIRE(hist.at(1) == 99);
  REQUIRE(hist.at(3) == 136);
  const auto m = build_correlation_matrix(v, v);
  CHECK(m.reference_labels == std::vector<Label>{3, 2});
  CHECK(m.detected_labels == std::vector<Label>{3, 2});
}

TEST_CASE("cc_postprocess separates disconnected parts of one label") {
  LabelVolume v(Vec3{6, 1, 1});
  v(0, 0, 0) = 4;
  v(1, 0, 0) = 4;
  v(4, 0, 0) = 4;
  v(5, 0, 0) = 7;
  const LabelVolume cc = cc_postprocess_proposal(v);
  CHECK(cc(0, 0, 0) == cc(1, 0, 0));
  CHECK(cc(4, 0, 0) != cc(0, 0, 0));
  CHECK(cc(5, 0, 0) != cc(4, 0, 0));
  CHECK(oracle::histogram(cc).size() == 3);
}

TEST_CASE("diagonal_stats") {
  SUBCASE("two values") {
    const std::vector<double> d{1.0, 0.0};
    const DiagonalStats s = diagonal_stats(d);
    CHECK(s.all.mean == 0.5);
    CHECK(s.all.std == 0.5);
    CHECK(s.all.max == 1.0);
    CHECK(s.large.count == 1);
    CHECK(s.large.mean == 1.0);
    CHECK(s.small.mean == 0.0);
  }
  SUBCASE("single value leaves the small group empty") {
    const DiagonalStats s = diagonal_stats(std::vector<double>{0.25});
    CHECK(s.large.count == 1);
    CHECK(s.small.count == 0);
    CHECK(s.small.mean == 0.0);
  }
  SUBCASE("random diagonals against long double recomputation") {
    Rng rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> d(static_cast<std::size_t>(rng.uniform_int(1, 300)));
      for (double& x : d) x = rng.uniform();
      const DiagonalStats s = diagonal_stats(d);
      const std::size_t half = (d.size() + 1) / 2;
      const auto all = oracle::stats(d);
      const auto large = oracle::stats({d.begin(), d.begin() + static_cast<std::ptrdiff_t>(half)});
      const auto small = oracle::stats({d.begin() + static_cast<std::ptrdiff_t>(half), d.end()});
      for (auto [g, o] : {std::pair{s.all, all}, std::pair{s.large, large}, std::pair{s.small, small}}) {
        CHECK(std::abs(g.mean - o.mean) <= 1e-12);
        CHECK(std::abs(g.std - o.std) <= 1e-12);
        CHECK(g.max == o.max);
      }
      CHECK(s.large.count == half);
    }
  }
  CHECK_THROWS_AS(diagonal_stats(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("stats JSON carries every group") {
  const auto j = nlohmann::json::parse(stats_to_json(diagonal_stats(std::vector<double>{0.5, 0.25, 1.0})));
  CHECK(j["all"]["count"] == 3);
  CHECK(j["large"]["count"] == 2);
  CHECK(j["small"]["mean"] == 1.0);
}

TEST_CASE("matrix exports") {
  Rng rng(12);
  const LabelVolume ref = oracle::random_blobs(rng, {10, 10, 10}, 5, 7);
  const LabelVolume det = oracle::random_blobs(rng, {10, 10, 10}, 6, 7);
  const auto m = build_correlation_matrix(ref, det, 1);
  testing::TempDir dir;

  export_matrix(m, MatrixFormat::Csv, dir / "m.csv");
  std::ifstream csv(dir / "m.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("reference\\detected", 0) == 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    REQUIRE(std::getline(csv, line));
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    CHECK(std::stoul(cell) == m.reference_labels[r]);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      REQUIRE(std::getline(ss, cell, ','));
      CHECK(std::abs(std::stod(cell) - m.at(r, c)) <= 1e-6);
    }
  }

  const auto perfect = build_correlation_matrix(ref, ref, 1);
  const std::string pgm = matrix_to_pgm(perfect);
  const std::string header = "P5\n" + std::to_string(perfect.cols()) + " " + std::to_string(perfect.rows()) + "\n255\n";
  REQUIRE(pgm.rfind(header, 0) == 0);
  for (std::size_t r = 0; r < perfect.rows(); ++r)
    for (std::size_t c = 0; c < perfect.cols(); ++c)
      CHECK(static_cast<unsigned char>(pgm[header.size() + r * perfect.cols() + c]) == (r == c ? 255 : 0));
}

TEST_CASE("matrix is invariant to relabelling the proposal") {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const LabelVolume ref = oracle::random_blobs(rng, {9, 9, 9}, 6, 6);
    const LabelVolume det = oracle::random_blobs(rng, {9, 9, 9}, 6, 6);
    LabelVolume renamed = det;
    for (Label& l : renamed.voxels())
      if (l) l = 1000 - l;
    const auto a = build_correlation_matrix(ref, det, 1);
    const auto b = build_correlation_matrix(ref, renamed, 1);
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    // Equal-size detections may swap places, so compare rows as multisets.
    for (std::size_t r = 0; r < a.rows(); ++r) {
      std::vector<double> ra(a.iou.begin() + r * a.cols(), a.iou.begin() + (r + 1) * a.cols());
      std::vector<double> rb(b.iou.begin() + r * b.cols(), b.iou.begin() + (r + 1) * b.cols());
      std::sort(ra.begin(), ra.end());
      std::sort(rb.begin(), rb.end());
      CHECK(ra == rb);
    }
  }
}

TEST_CASE("rows without any overlap have a zero diagonal entry") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const LabelVolume ref = oracle::random_blobs(rng, {8, 8, 8}, 7, 6);
    const LabelVolume det = oracle::random_blobs(rng, {8, 8, 8}, 3, 6);
    const auto m = build_correlation_matrix(ref, det, 1);
    const auto d = m.diagonal();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      double row_max = 0;
      for (std::size_t c = 0; c < m.cols(); ++c) row_max = std::max(row_max, m.at(r, c));
      if (row_max == 0) CHECK(d[r] == 0.0);
      if (d[r] > 0) CHECK(m.diagonal_assignment[r].has_value());
    }
  }
}
