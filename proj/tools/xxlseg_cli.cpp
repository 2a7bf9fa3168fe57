#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "manifest.hpp"
#include "xxlseg/xxlseg.hpp"

using namespace xxlseg;
using xxlseg::cli::RunManifest;
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::MissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw IoError(IoErrorKind::IoFailure, "cannot write " + path.string());
}

void add_volume_inputs(RunManifest& m, const fs::path& path) {
  for (const fs::path& f : cli::volume_files(path)) m.add_input(f);
}

void add_stack_inputs(RunManifest& m, const fs::path& dir) {
  for (const fs::path& f : cli::directory_files(dir))
    if (f.filename() != "manifest.json") m.add_input(f);
}

void add_volume_outputs(RunManifest& m, const fs::path& path) {
  for (const fs::path& f : cli::volume_files(path)) m.add_output(f);
}

Connectivity to_connectivity(int n) { return n == 26 ? Connectivity::TwentySix : Connectivity::Six; }

const std::map<std::string, Axis> kAxisNames{{"X", Axis::X}, {"Y", Axis::Y}, {"Z", Axis::Z},
                                              {"x", Axis::X}, {"y", Axis::Y}, {"z", Axis::Z}};

// One subcommand: registers its options and knows how to run.
struct Command {
  CLI::App* app = nullptr;
  std::function<void(RunManifest&)> run;
};

Command phantom_command(CLI::App& root) {
  auto spec = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  Command c;
  c.app = root.add_subcommand("phantom", "Render a synthetic phantom from a JSON spec");
  c.app->add_option("spec", *spec, "Phantom spec JSON")->required();
  c.app->add_option("out_dir", *out, "Output directory")->required();
  c.run = [=](RunManifest& m) {
    const fs::path dir(*out);
    m.set_location(dir / "manifest.json");
    m.add_input(*spec);
    const PhantomSpec ps = phantom_spec_from_json(read_text(*spec));
    m.parameters() = nlohmann::json::parse(phantom_spec_to_json(ps));
    const Phantom ph = generate_phantom(ps);
    save_volume(ph.intensity, dir / "intensity");
    save_volume(ph.labels, dir / "labels");
    add_volume_outputs(m, dir / "intensity");
    add_volume_outputs(m, dir / "labels");
    m.results()["segments"] = ps.objects.size();
  };
  return c;
}

Command slice_command(CLI::App& root) {
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto split = std::make_shared<double>(0.0);
  auto drop = std::make_shared<double>(0.0);
  auto seed = std::make_shared<std::uint64_t>(0);
  Command c;
  c.app = root.add_subcommand("slice", "Cut a label volume into a stack of 2D instance maps");
  c.app->add_option("labels", *in, "Reference label volume")->required();
  c.app->add_option("out_dir", *out, "Output stack directory")->required();
  c.app->add_option("--split-rate", *split, "Fraction of 2D instances split in two")->capture_default_str();
  c.app->add_option("--drop-rate", *drop, "Fraction of 2D instances deleted")->capture_default_str();
  c.app->add_option("--seed", *seed, "Corruption seed")->capture_default_str();
  c.run = [=](RunManifest& m) {
    const fs::path dir(*out);
    m.set_location(dir / "manifest.json");
    m.parameters() = {{"split_rate", *split}, {"drop_rate", *drop}, {"seed", *seed}};
    add_volume_inputs(m, *in);
    SliceStack stack = perfect_slice_stack(load_label_volume(*in));
    CorruptionReport rep;
    if (*split > 0.0 || *drop > 0.0) stack = corrupt_stack(stack, *seed, *split, *drop, &rep);
    save_slice_stack(stack, dir);
    for (const fs::path& f : cli::directory_files(dir))
      if (f.filename() != "manifest.json") m.add_output(f);
    m.results() = {{"splits", rep.splits}, {"drops", rep.drops}};
  };
  return c;
}

Command fuse_command(CLI::App& root) {
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto cfg = std::make_shared<MatchConfig>();
  auto axis = std::make_shared<std::string>("Z");
  auto start = std::make_shared<std::int64_t>(-1);
  auto element = std::make_shared<int>(6);
  Command c;
  c.app = root.add_subcommand("fuse", "Fuse a stack of orthogonal 2D instance maps into a 3D label volume");
  c.app->add_option("stack_dir", *in, "Slice stack directory")->required();
  c.app->add_option("out", *out, "Output label volume")->required();
  c.app->add_option("--line-overlap-threshold", cfg->line_overlap_threshold)->capture_default_str();
  c.app->add_option("--reinsert-overlap-threshold", cfg->reinsert_overlap_threshold)->capture_default_str();
  c.app->add_option("--start-axis", *axis)->check(CLI::IsMember({"X", "Y", "Z", "x", "y", "z"}))->capture_default_str();
  c.app->add_option("--start-index", *start, "Start slice (default: middle)");
  c.app->add_option("--closing-iterations", cfg->closing_iterations)->capture_default_str();
  c.app->add_option("--closing-element", *element)->check(CLI::IsMember({6, 26}))->capture_default_str();
  c.run = [=](RunManifest& m) {
    m.set_location(cli::manifest_for_volume(*out));
    MatchConfig config = *cfg;
    config.start_axis = kAxisNames.at(*axis);
    if (*start >= 0) config.start_index = *start;
    config.closing_element = to_connectivity(*element);
    m.parameters() = {{"line_overlap_threshold", config.line_overlap_threshold},
                      {"reinsert_overlap_threshold", config.reinsert_overlap_threshold},
                      {"start_axis", std::string(axis_name(config.start_axis))},
                      {"start_index", config.start_index ? nlohmann::json(*config.start_index) : nlohmann::json()},
                      {"closing_iterations", config.closing_iterations},
                      {"closing_element", *element}};
    add_stack_inputs(m, *in);
    config.validate();
    const LabelVolume fused = run_fusion_pipeline(load_slice_stack(*in), config);
    save_volume(fused, *out);
    add_volume_outputs(m, *out);
    m.results()["segments"] = SegmentTable(fused).size();
  };
  return c;
}

Command three_class_command(CLI::App& root) {
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto thickness = std::make_shared<int>(1);
  Command c;
  c.app = root.add_subcommand("three-class", "Convert a label volume to background/object/border classes");
  c.app->add_option("labels", *in, "Label volume")->required();
  c.app->add_option("out", *out, "Output class volume")->required();
  c.app->add_option("--border-thickness", *thickness)->capture_default_str();
  c.run = [=](RunManifest& m) {
    m.set_location(cli::manifest_for_volume(*out));
    m.parameters() = {{"border_thickness", *thickness}};
    add_volume_inputs(m, *in);
    save_volume(labels_to_three_class(load_label_volume(*in), *thickness).volume(), *out);
    add_volume_outputs(m, *out);
  };
  return c;
}

Command watershed_command(CLI::App& root) {
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto min_marker = std::make_shared<std::int64_t>(0);
  auto conn = std::make_shared<int>(6);
  Command c;
  c.app = root.add_subcommand("watershed", "Instance labels from a three-class volume by marker flooding");
  c.app->add_option("classes", *in, "Three-class volume (0 background, 1 object, 2 border)")->required();
  c.app->add_option("out", *out, "Output label volume")->required();
  c.app->add_option("--min-marker-size", *min_marker)->capture_default_str();
  c.app->add_option("--connectivity", *conn)->check(CLI::IsMember({6, 26}))->capture_default_str();
  c.run = [=](RunManifest& m) {
    m.set_location(cli::manifest_for_volume(*out));
    m.parameters() = {{"min_marker_size", *min_marker}, {"connectivity", *conn}};
    add_volume_inputs(m, *in);
    const ThreeClassVolume classes(load_label_volume(*in));
    const LabelVolume labels = run_watershed_pipeline(classes, {*min_marker, to_connectivity(*conn)});
    save_volume(labels, *out);
    add_volume_outputs(m, *out);
    m.results()["segments"] = SegmentTable(labels).size();
  };
  return c;
}

Command evaluate_command(CLI::App& root) {
  auto ref = std::make_shared<std::string>();
  auto prop = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto min_voxels = std::make_shared<std::int64_t>(100);
  auto cc = std::make_shared<bool>(false);
  auto conn = std::make_shared<int>(26);
  Command c;
  c.app = root.add_subcommand("evaluate", "Correlation matrix and diagonal statistics of a proposal");
  c.app->add_option("reference", *ref, "Reference label volume")->required();
  c.app->add_option("proposal", *prop, "Proposed label volume")->required();
  c.app->add_option("out_dir", *out, "Output directory")->required();
  c.app->add_option("--min-voxels", *min_voxels)->capture_default_str();
  c.app->add_flag("--cc-postprocess", *cc, "Split proposal labels into connected components first");
  c.app->add_option("--connectivity", *conn, "Connectivity for --cc-postprocess")
      ->check(CLI::IsMember({6, 26}))
      ->capture_default_str();
  c.run = [=](RunManifest& m) {
    const fs::path dir(*out);
    m.set_location(dir / "manifest.json");
    m.parameters() = {{"min_voxels", *min_voxels}, {"cc_postprocess", *cc}, {"connectivity", *conn}};
    add_volume_inputs(m, *ref);
    add_volume_inputs(m, *prop);
    const LabelVolume reference = load_label_volume(*ref);
    LabelVolume proposal = load_label_volume(*prop);
    if (*cc) proposal = cc_postprocess_proposal(proposal, to_connectivity(*conn));
    const CorrelationMatrix matrix = build_correlation_matrix(reference, proposal, *min_voxels);
    fs::create_directories(dir);
    export_matrix(matrix, MatrixFormat::Csv, dir / "matrix.csv");
    export_matrix(matrix, MatrixFormat::Heatmap, dir / "matrix.pgm");
    write_text(dir / "stats.json", stats_to_json(diagonal_stats(matrix)) + "\n");
    for (const char* f : {"matrix.csv", "matrix.pgm", "stats.json"}) m.add_output(dir / f);
    m.results() = {{"rows", matrix.rows()}, {"columns", matrix.cols()}};
  };
  return c;
}

Command denoise_command(CLI::App& root) {
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto params = std::make_shared<TvDenoiseParams>();
  Command c;
  c.app = root.add_subcommand("denoise", "Total-variation denoising of a scalar volume");
  c.app->add_option("in", *in, "Scalar volume")->required();
  c.app->add_option("out", *out, "Output scalar volume")->required();
  c.app->add_option("--weight", params->weight)->capture_default_str();
  c.app->add_option("--max-iterations", params->max_iterations)->capture_default_str();
  c.app->add_option("--tolerance", params->tolerance)->capture_default_str();
  c.run = [=](RunManifest& m) {
    m.set_location(cli::manifest_for_volume(*out));
    m.parameters() = {
        {"weight", params->weight}, {"max_iterations", params->max_iterations}, {"tolerance", params->tolerance}};
    add_volume_inputs(m, *in);
    const TvDenoiseResult r = tv_denoise_traced(load_scalar_volume(*in), *params);
    save_volume(r.volume, *out);
    add_volume_outputs(m, *out);
    m.results() = {{"iterations", r.iterations}, {"converged", r.converged}, {"objective", r.objective.back()}};
  };
  return c;
}

Command cc_command(CLI::App& root) {
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto conn = std::make_shared<int>(26);
  Command c;
  c.app = root.add_subcommand("cc", "Relabel a label volume into connected components");
  c.app->add_option("in", *in, "Label volume")->required();
  c.app->add_option("out", *out, "Output label volume")->required();
  c.app->add_option("--connectivity", *conn)->check(CLI::IsMember({6, 26}))->capture_default_str();
  c.run = [=](RunManifest& m) {
    m.set_location(cli::manifest_for_volume(*out));
    m.parameters() = {{"connectivity", *conn}};
    add_volume_inputs(m, *in);
    save_volume(cc_postprocess_proposal(load_label_volume(*in), to_connectivity(*conn)), *out);
    add_volume_outputs(m, *out);
  };
  return c;
}

Command stats_command(CLI::App& root) {
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  Command c;
  c.app = root.add_subcommand("stats", "Segment statistics of a label volume");
  c.app->add_option("labels", *in, "Label volume")->required();
  c.app->add_option("-o,--out", *out, "Write the report here instead of stdout");
  c.run = [=](RunManifest& m) {
    if (!out->empty()) {
      const fs::path o(*out);
      m.set_location(o.parent_path() / (o.stem().string() + ".manifest.json"));
    }
    add_volume_inputs(m, *in);
    const SegmentReport r = segment_report(load_label_volume(*in));
    const nlohmann::json j{{"origin", {r.origin.x, r.origin.y, r.origin.z}},
                           {"dims", {r.dims.x, r.dims.y, r.dims.z}},
                           {"segments", r.segment_count},
                           {"min_segment_voxels", r.min_segment_size},
                           {"max_segment_voxels", r.max_segment_size},
                           {"median_segment_voxels", r.median_segment_size},
                           {"foreground_percent", r.foreground_percent}};
    if (out->empty()) {
      std::cout << j.dump(2) << '\n';
    } else {
      write_text(*out, j.dump(2) + "\n");
      m.add_output(*out);
    }
  };
  return c;
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instance segmentation toolkit for large CT volumes"};
  app.set_version_flag("--version", XXLSEG_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  int threads = thread_count();
  app.add_option("--threads", threads, "Worker threads (default: $XXLSEG_THREADS or 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  const std::vector<Command> commands{phantom_command(app),   slice_command(app),    fuse_command(app),
                                      three_class_command(app), watershed_command(app), evaluate_command(app),
                                      denoise_command(app),    cc_command(app),       stats_command(app)};
  CLI11_PARSE(app, argc, argv);
  set_thread_count(threads);

  for (const Command& c : commands) {
    if (!c.app->parsed()) continue;
    RunManifest manifest(c.app->get_name());
    try {
      c.run(manifest);
      manifest.parameters()["threads"] = threads;
      manifest.write();
      return 0;
    } catch (const std::exception& e) {
      const std::string msg = one_line(e.what());
      manifest.parameters()["threads"] = threads;
      manifest.write(msg);
      std::cerr << "xxlseg " << c.app->get_name() << ": error: " << msg << '\n';
      return 1;
    }
  }
  return 1;
}
