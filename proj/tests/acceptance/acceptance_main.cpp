// Acceptance gate: runs every criterion, prints one PASS/FAIL line each and
// exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "../../tools/manifest.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"
#include "xxlseg/xxlseg.hpp"

using namespace xxlseg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0: none
  std::function<Outcome()> run;
};

constexpr int kPhantoms = 20;

Vec3 phantom_dims(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {77}));
  return {rng.uniform_int(32, 64), rng.uniform_int(32, 64), rng.uniform_int(32, 64)};
}

const std::vector<Phantom>& phantoms() {
  static const std::vector<Phantom> all = [] {
    std::vector<Phantom> v;
    for (std::uint64_t s = 0; s < kPhantoms; ++s) v.push_back(generate_phantom(random_phantom_spec(1000 + s, phantom_dims(s))));
    return v;
  }();
  return all;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::size_t segment_count(const LabelVolume& v) { return SegmentTable(v).size(); }

Outcome perfect_identity() {
  int bad = 0;
  for (const Phantom& ph : phantoms()) {
    const auto m = build_correlation_matrix(ph.labels, ph.labels);
    bool ok = m.rows() == m.cols();
    for (std::size_t r = 0; ok && r < m.rows(); ++r) {
      ok = m.diagonal_assignment[r] == r;
      for (std::size_t c = 0; ok && c < m.cols(); ++c) ok = m.at(r, c) == (r == c ? 1.0 : 0.0);
    }
    bad += !ok;
  }
  return {bad == 0, std::to_string(kPhantoms - bad) + "/" + std::to_string(kPhantoms) + " identity matrices"};
}

Outcome fusion_oracle() {
  int bad = 0;
  double worst = 1.0;
  for (const Phantom& ph : phantoms()) {
    const LabelVolume fused = run_fusion_pipeline(perfect_slice_stack(ph.labels));
    const double mean = diagonal_stats(build_correlation_matrix(ph.labels, fused, 1)).all.mean;
    worst = std::min(worst, mean);
    bad += !(mean == 1.0 && oracle::same_partition(ph.labels, fused));
  }
  return {bad == 0, "exact recoveries " + std::to_string(kPhantoms - bad) + "/" + std::to_string(kPhantoms) +
                        ", min diagonal mean " + fmt(worst)};
}

Outcome fusion_robustness() {
  double worst = 1.0;
  for (std::size_t k = 0; k < phantoms().size(); ++k) {
    const Phantom& ph = phantoms()[k];
    const SliceStack stack = corrupt_stack(perfect_slice_stack(ph.labels), 500 + k, 0.1, 0.02);
    const LabelVolume fused = run_fusion_pipeline(stack);
    worst = std::min(worst, diagonal_stats(build_correlation_matrix(ph.labels, fused, 1)).all.mean);
  }
  return {worst >= 0.85, "min diagonal mean " + fmt(worst) + " (>= 0.85)"};
}

Outcome watershed_pipeline() {
  int count_bad = 0;
  double worst = 1.0;
  for (const Phantom& ph : phantoms()) {
    const LabelVolume got = run_watershed_pipeline(labels_to_three_class(ph.labels, 1));
    count_bad += segment_count(got) != segment_count(ph.labels);
    for (double d : build_correlation_matrix(ph.labels, got, 1).diagonal()) worst = std::min(worst, d);
  }
  return {count_bad == 0 && worst >= 0.9,
          "count mismatches " + std::to_string(count_bad) + ", min instance IoU " + fmt(worst) + " (>= 0.9)"};
}

Outcome watershed_oracle() {
  Rng rng(2024);
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    const Vec3 d{rng.uniform_int(1, 10), rng.uniform_int(1, 10), rng.uniform_int(1, 10)};
    LabelVolume classes(d);
    for (Label& l : classes.voxels()) {
      const double u = rng.uniform();
      l = u < 0.2 ? 0 : u < 0.7 ? 1 : 2;
    }
    const ThreeClassVolume c(classes);
    for (Connectivity conn : {Connectivity::Six, Connectivity::TwentySix}) {
      const LabelVolume markers = extract_markers(c, 0, conn);
      bad += !(watershed_instances(c, markers, conn) == oracle::geodesic_labels(classes, markers, static_cast<int>(conn)));
    }
  }
  return {bad == 0, std::to_string(200 - bad) + "/200 exact (100 volumes x connectivity 6, 26)"};
}

// Merges random pairs of distinct phantom objects under a single label.
LabelVolume merge_corrupt(const LabelVolume& ref, std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<Label>(segment_count(ref));
  std::vector<Label> to(n + 1);
  for (Label l = 0; l <= n; ++l) to[l] = l;
  for (int k = 0; k < 3; ++k) {
    const auto a = static_cast<Label>(rng.uniform_int(1, n));
    const auto b = static_cast<Label>(rng.uniform_int(1, n));
    if (to[a] != to[b]) {
      const Label from = to[b];
      for (Label& t : to)
        if (t == from) t = to[a];
    }
  }
  LabelVolume out = ref;
  for (Label& l : out.voxels()) l = to[l];
  return out;
}

Outcome cc_direction() {
  int good = 0;
  for (std::size_t k = 0; k < phantoms().size(); ++k) {
    const Phantom& ph = phantoms()[k];
    const LabelVolume merged = merge_corrupt(ph.labels, 900 + k);
    const LabelVolume split = cc_postprocess_proposal(merged);
    const auto before = build_correlation_matrix(ph.labels, merged, 1);
    const auto after = build_correlation_matrix(ph.labels, split, 1);
    good += after.cols() > before.cols() && diagonal_stats(after).all.mean >= diagonal_stats(before).all.mean;
  }
  return {good >= 19, std::to_string(good) + "/20 trials increase segments without lowering the diagonal mean"};
}

Outcome tv_denoising() {
  int non_monotone = 0;
  for (int k = 0; k < 10; ++k) {
    const Phantom& ph = phantoms()[static_cast<std::size_t>(k)];
    const TvDenoiseResult r = tv_denoise_traced(ph.intensity, {});
    for (std::size_t i = 1; i < r.objective.size(); ++i) non_monotone += r.objective[i] > r.objective[i - 1];
  }
  double worst = 0.0;
  Rng rng(31);
  for (int k = 0; k < 5; ++k) {
    const Phantom& ph = phantoms()[static_cast<std::size_t>(k)];
    Vec3 lo;
    for (int a = 0; a < 3; ++a) lo[a] = rng.uniform_int(0, ph.intensity.dims()[a] - 8);
    const ScalarVolume f = crop(ph.intensity, Box{lo, lo + Vec3{8, 8, 8}});
    const std::vector<double> fd(f.voxels().begin(), f.voxels().end());
    const double target = oracle::rof(oracle::rof_coordinate_descent(fd, {8, 8, 8}, 0.1, 60), fd, {8, 8, 8}, 0.1);
    const ScalarVolume u = tv_denoise(f, {0.1, 3000, 1e-8});
    const std::vector<double> ud(u.voxels().begin(), u.voxels().end());
    worst = std::max(worst, std::abs(oracle::rof(ud, fd, {8, 8, 8}, 0.1) - target) / target);
  }
  return {non_monotone == 0 && worst <= 0.01, "objective increases " + std::to_string(non_monotone) +
                                                 ", max relative gap to oracle " + fmt(100 * worst) + "% (<= 1%)"};
}

Outcome voxel_filter() {
  LabelVolume v(Vec3{20, 20, 20});
  for (int y = 0; y < 11; ++y)
    for (int x = 0; x < 9; ++x) v(x, y, 0) = 1;  // 99 voxels
  for (int y = 12; y < 20; ++y)
    for (int x = 0; x < 17; ++x) v(x, y, 5) = 2;  // 136 voxels
  const auto m = build_correlation_matrix(v, v);
  const bool ok = m.reference_labels == std::vector<Label>{2} && m.detected_labels == std::vector<Label>{2};
  return {ok, "rows " + std::to_string(m.rows()) + ", columns " + std::to_string(m.cols()) + " (99-voxel segment dropped)"};
}

Outcome tiling_geometry() {
  Rng rng(64);
  int bad = 0;
  for (int t = 0; t < 200; ++t) {
    const Vec3 d{rng.uniform_int(1, 150), rng.uniform_int(1, 150), rng.uniform_int(1, 150)};
    const BlockTiling tiling = make_tiling(VolumeMeta{d, {}, VoxelKind::Label32});
    std::vector<std::uint8_t> visits(static_cast<std::size_t>(d.product()), 0);
    bool ok = true;
    for (const Block& b : tiling.blocks) {
      for (int a = 0; a < 3; ++a) {
        ok = ok && b.padded.lo[a] == std::max<std::int64_t>(0, b.core.lo[a] - 8) &&
             b.padded.hi[a] == std::min<std::int64_t>(d[a], b.core.hi[a] + 8) && b.core.extent()[a] <= 64;
      }
      for (std::int64_t z = b.core.lo.z; z < b.core.hi.z; ++z)
        for (std::int64_t y = b.core.lo.y; y < b.core.hi.y; ++y)
          for (std::int64_t x = b.core.lo.x; x < b.core.hi.x; ++x) ++visits[static_cast<std::size_t>(x + d.x * (y + d.y * z))];
    }
    ok = ok && std::all_of(visits.begin(), visits.end(), [](std::uint8_t c) { return c == 1; });
    bad += !ok;
  }
  return {bad == 0, std::to_string(200 - bad) + "/200 tilings partition exactly with clamped padding"};
}

Outcome stats_oracle() {
  Rng rng(10);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    CorrelationMatrix m;
    const auto rows = static_cast<std::size_t>(rng.uniform_int(1, 60));
    const auto cols = static_cast<std::size_t>(rng.uniform_int(0, 60));
    for (std::size_t r = 0; r < rows; ++r) m.reference_labels.push_back(static_cast<Label>(r + 1));
    for (std::size_t c = 0; c < cols; ++c) m.detected_labels.push_back(static_cast<Label>(c + 1));
    m.iou.resize(rows * cols);
    for (double& x : m.iou) x = rng.uniform();
    m.diagonal_assignment.resize(rows);
    for (std::size_t r = 0; r < rows && r < cols; ++r)
      if (rng.uniform() < 0.9) m.diagonal_assignment[r] = r;

    std::vector<double> diag(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
      if (m.diagonal_assignment[r]) diag[r] = m.iou[r * cols + *m.diagonal_assignment[r]];
    const std::size_t half = (rows + 1) / 2;
    const auto all = oracle::stats(diag);
    const auto large = oracle::stats({diag.begin(), diag.begin() + static_cast<std::ptrdiff_t>(half)});
    const auto small = oracle::stats({diag.begin() + static_cast<std::ptrdiff_t>(half), diag.end()});
    const DiagonalStats s = diagonal_stats(m);
    bool ok = s.large.count == half && s.small.count == rows - half;
    for (auto [g, o] : {std::pair{s.all, all}, std::pair{s.large, large}, std::pair{s.small, small}}) {
      ok = ok && std::abs(g.mean - o.mean) <= 1e-12 && std::abs(g.std - o.std) <= 1e-12 && std::abs(g.max - o.max) <= 1e-12;
    }
    bad += !ok;
  }
  return {bad == 0, std::to_string(1000 - bad) + "/1000 within 1e-12"};
}

std::string cli_path;

bool run(const std::string& args) {
  const std::string cmd = "\"" + cli_path + "\" " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

// Every CLI command, chained from a phantom spec; returns the hash of every
// output file by path relative to `dir`.
std::map<std::string, std::string> cli_chain(const fs::path& dir, const fs::path& spec, int threads, bool& ok) {
  const std::string t = " --threads " + std::to_string(threads);
  const std::string d = "\"" + dir.string() + "\"";
  ok = run("phantom \"" + spec.string() + "\" " + d + "/ph" + t) &&
       run("slice " + d + "/ph/labels " + d + "/stack --split-rate 0.1 --drop-rate 0.02 --seed 4" + t) &&
       run("fuse " + d + "/stack " + d + "/fused" + t) &&
       run("three-class " + d + "/ph/labels " + d + "/classes" + t) &&
       run("watershed " + d + "/classes " + d + "/ws" + t) &&
       run("evaluate " + d + "/ph/labels " + d + "/fused " + d + "/eval --min-voxels 10" + t) &&
       run("evaluate " + d + "/ph/labels " + d + "/fused " + d + "/eval_cc --cc-postprocess" + t) &&
       run("denoise " + d + "/ph/intensity " + d + "/den --max-iterations 30" + t) &&
       run("cc " + d + "/ws " + d + "/cc" + t) && run("stats " + d + "/ws -o " + d + "/stats.json" + t);
  std::map<std::string, std::string> hashes;
  for (const fs::path& f : cli::directory_files(dir)) {
    const std::string name = f.filename().string();
    if (name.size() >= 13 && name.compare(name.size() - 13, 13, "manifest.json") == 0) continue;
    hashes[fs::relative(f, dir).generic_string()] = cli::sha256_file(f).value_or("?");
  }
  return hashes;
}

Outcome cli_determinism() {
  if (cli_path.empty() || !fs::exists(cli_path)) return {false, "CLI binary not found: " + cli_path};
  testing::TempDir tmp;
  PhantomSpec spec = random_phantom_spec(77, {48, 44, 40});
  spec.noise_sigma = 0.08;
  {
    std::ofstream(tmp / "spec.json") << phantom_spec_to_json(spec);
  }
  std::optional<std::map<std::string, std::string>> first;
  int runs = 0, mismatched = 0;
  for (int threads : {1, 1, 2, 8, 8}) {
    bool ok = false;
    const auto h = cli_chain(tmp / ("run" + std::to_string(runs++)), tmp / "spec.json", threads, ok);
    if (!ok) return {false, "a CLI command failed at " + std::to_string(threads) + " threads"};
    if (!first) first = h;
    else mismatched += h != *first;
  }
  return {mismatched == 0 && first->size() >= 20, std::to_string(runs) + " runs (threads 1,1,2,8,8) x " +
                                                      std::to_string(first->size()) + " output files, " +
                                                      std::to_string(mismatched) + " runs differ"};
}

}  // namespace

int main(int argc, char** argv) {
#ifdef XXLSEG_CLI_PATH
  cli_path = XXLSEG_CLI_PATH;
#endif
  if (argc > 1) cli_path = argv[1];

  const std::vector<Criterion> criteria{
      {1, "perfect-segmentation identity", 10, perfect_identity},
      {2, "fusion recovers perfect stacks exactly", 60, fusion_oracle},
      {3, "fusion robustness to split/drop corruption", 0, fusion_robustness},
      {4, "watershed pipeline recovers phantom instances", 30, watershed_pipeline},
      {5, "watershed equals shortest-path oracle", 0, watershed_oracle},
      {6, "cc-postprocess direction on merged proposals", 0, cc_direction},
      {7, "TV denoising monotone and near optimal", 30, tv_denoising},
      {8, "100-voxel segment filter", 0, voxel_filter},
      {9, "tiling geometry", 0, tiling_geometry},
      {10, "diagonal statistics vs brute force", 0, stats_oracle},
      {11, "CLI determinism across runs and thread counts", 0, cli_determinism},
  };

  phantoms();  // shared fixture, generated outside the timed sections
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail += ", over the " + fmt(c.time_limit_s) + " s budget";
    }
    failed += !o.pass;
    std::printf("%s  criterion %2d  %-48s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
