#include "xxlseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "xxlseg/components.hpp"
#include "xxlseg/parallel.hpp"
#include "xxlseg/random.hpp"
#include "xxlseg/segments.hpp"

namespace xxlseg {
using nlohmann::json;

std::string_view shape_kind_name(ShapeKind k) noexcept {
  switch (k) {
    case ShapeKind::Sheet: return "sheet";
    case ShapeKind::Pipe: return "pipe";
    case ShapeKind::Rivet: return "rivet";
    default: return "bracket";
  }
}

namespace {

constexpr std::int64_t kDefaultRivetLength = 4;

std::int64_t radius_cells(double radius) { return static_cast<std::int64_t>(std::floor(radius)); }

std::int64_t length_of(const ObjectSpec& o, Vec3 dims) {
  if (o.length) return *o.length;
  return o.kind == ShapeKind::Rivet ? kDefaultRivetLength : dims[o.axis];
}

// Calls fn(p) for every voxel of the object placed with its bbox corner at `at`.
template <typename Fn>
void rasterize(const ObjectSpec& o, Vec3 dims, Vec3 at, Fn&& fn) {
  const Vec3 ext = object_extent(o, dims);
  if (o.kind == ShapeKind::Pipe || o.kind == ShapeKind::Rivet) {
    const auto [ua, va] = plane_axes(o.axis);
    const std::int64_t r = radius_cells(o.radius);
    const double r2 = o.radius * o.radius;
    for (std::int64_t k = 0; k < ext[o.axis]; ++k)
      for (std::int64_t dv = -r; dv <= r; ++dv)
        for (std::int64_t du = -r; du <= r; ++du) {
          if (static_cast<double>(du * du + dv * dv) > r2) continue;
          Vec3 p = at;
          p[o.axis] += k;
          p[ua] += r + du;
          p[va] += r + dv;
          fn(p);
        }
    return;
  }
  for (std::int64_t z = 0; z < ext.z; ++z)
    for (std::int64_t y = 0; y < ext.y; ++y)
      for (std::int64_t x = 0; x < ext.x; ++x) fn(at + Vec3{x, y, z});
}

Box grown(const Box& b, std::int64_t by) { return {b.lo - Vec3{by, by, by}, b.hi + Vec3{by, by, by}}; }

bool boxes_intersect(const Box& a, const Box& b) {
  for (int i = 0; i < 3; ++i)
    if (a.hi[i] <= b.lo[i] || b.hi[i] <= a.lo[i]) return false;
  return true;
}

// --- JSON helpers: every error names the offending field -----------------

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw InvalidArgument(field + ": " + what);
}

double positive_number(const json& j, const std::string& field) {
  if (!j.is_number() || !(j.get<double>() > 0.0)) field_error(field, "expected a positive number");
  return j.get<double>();
}

std::int64_t int_at_least(const json& j, const std::string& field, std::int64_t min) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < min) {
    field_error(field, "expected an integer >= " + std::to_string(min));
  }
  return j.get<std::int64_t>();
}

Vec3 triple(const json& j, const std::string& field, std::int64_t min) {
  if (!j.is_array() || j.size() != 3) field_error(field, "expected an array of 3 integers");
  Vec3 v;
  for (int a = 0; a < 3; ++a) v[a] = int_at_least(j[a], field + "[" + std::to_string(a) + "]", min);
  return v;
}

Axis axis_from_json(const json& j, const std::string& field) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "X" || s == "x") return Axis::X;
    if (s == "Y" || s == "y") return Axis::Y;
    if (s == "Z" || s == "z") return Axis::Z;
  }
  field_error(field, "expected one of \"X\", \"Y\", \"Z\"");
}

ObjectSpec object_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected an object");
  ObjectSpec o;
  if (!j.contains("type") || !j["type"].is_string()) field_error(field + ".type", "expected a string");
  const std::string type = j["type"].get<std::string>();
  if (type == "sheet") o.kind = ShapeKind::Sheet;
  else if (type == "pipe") o.kind = ShapeKind::Pipe;
  else if (type == "rivet") o.kind = ShapeKind::Rivet;
  else if (type == "bracket") o.kind = ShapeKind::Bracket;
  else field_error(field + ".type", "unknown object type '" + type + "'");

  auto has = [&](const char* k) { return j.contains(k); };
  switch (o.kind) {
    case ShapeKind::Sheet:
      if (!has("thickness")) field_error(field + ".thickness", "required for sheets");
      o.thickness = int_at_least(j["thickness"], field + ".thickness", 1);
      if (has("normal")) o.axis = axis_from_json(j["normal"], field + ".normal");
      else if (has("axis")) o.axis = axis_from_json(j["axis"], field + ".axis");
      if (has("extent")) {
        const json& e = j["extent"];
        if (!e.is_array() || e.size() != 2) field_error(field + ".extent", "expected an array of 2 integers");
        o.extent = std::pair{int_at_least(e[0], field + ".extent[0]", 1), int_at_least(e[1], field + ".extent[1]", 1)};
      }
      break;
    case ShapeKind::Pipe:
    case ShapeKind::Rivet:
      if (!has("radius")) field_error(field + ".radius", "required");
      o.radius = positive_number(j["radius"], field + ".radius");
      if (has("axis")) o.axis = axis_from_json(j["axis"], field + ".axis");
      if (has("length")) o.length = int_at_least(j["length"], field + ".length", 1);
      break;
    case ShapeKind::Bracket:
      if (!has("size")) field_error(field + ".size", "required for brackets");
      o.size = triple(j["size"], field + ".size", 1);
      break;
  }
  if (has("position")) o.position = triple(j["position"], field + ".position", 0);
  if (has("contrast")) {
    o.contrast = positive_number(j["contrast"], field + ".contrast");
    if (o.contrast > 1.0) field_error(field + ".contrast", "expected a value in (0, 1]");
  }
  return o;
}

}  // namespace

Vec3 object_extent(const ObjectSpec& o, Vec3 dims) {
  Vec3 e;
  switch (o.kind) {
    case ShapeKind::Sheet: {
      const auto [ua, va] = plane_axes(o.axis);
      e[o.axis] = o.thickness;
      e[ua] = o.extent ? o.extent->first : dims[ua];
      e[va] = o.extent ? o.extent->second : dims[va];
      return e;
    }
    case ShapeKind::Pipe:
    case ShapeKind::Rivet: {
      const auto [ua, va] = plane_axes(o.axis);
      e[o.axis] = length_of(o, dims);
      e[ua] = e[va] = 2 * radius_cells(o.radius) + 1;
      return e;
    }
    default: return o.size;
  }
}

void PhantomSpec::validate() const {
  if (dims.x < 1 || dims.y < 1 || dims.z < 1) throw InvalidArgument("dims: all entries must be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidArgument("noise_sigma: expected >= 0");
  if (min_gap < 0) throw InvalidArgument("min_gap: expected >= 0");
  if (max_placement_attempts < 1) throw InvalidArgument("max_placement_attempts: expected >= 1");
  for (std::size_t k = 0; k < objects.size(); ++k) {
    const ObjectSpec& o = objects[k];
    const std::string f = "objects[" + std::to_string(k) + "]";
    if (!(o.contrast > 0.0 && o.contrast <= 1.0)) throw InvalidArgument(f + ".contrast: expected a value in (0, 1]");
    if (!(o.radius > 0.0)) throw InvalidArgument(f + ".radius: expected a positive number");
    if (o.thickness < 1) throw InvalidArgument(f + ".thickness: expected an integer >= 1");
    const Vec3 e = object_extent(o, dims);
    for (int a = 0; a < 3; ++a) {
      if (e[a] < 1) throw InvalidArgument(f + ": extent must be positive");
      if (e[a] > dims[a]) throw InvalidArgument(f + ": does not fit in the volume dims");
    }
  }
}

PhantomSpec phantom_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("phantom spec: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("phantom spec: expected a JSON object");
  PhantomSpec spec;
  if (!j.contains("dims")) field_error("dims", "required");
  spec.dims = triple(j["dims"], "dims", 1);
  if (j.contains("origin")) spec.origin = triple(j["origin"], "origin", std::numeric_limits<std::int64_t>::min());
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) field_error("seed", "expected an integer");
    spec.seed = j["seed"].is_number_unsigned() ? j["seed"].get<std::uint64_t>()
                                               : static_cast<std::uint64_t>(j["seed"].get<std::int64_t>());
  }
  if (j.contains("noise_sigma")) {
    if (!j["noise_sigma"].is_number() || j["noise_sigma"].get<double>() < 0.0) {
      field_error("noise_sigma", "expected a non-negative number");
    }
    spec.noise_sigma = j["noise_sigma"].get<double>();
  }
  if (j.contains("min_gap")) spec.min_gap = int_at_least(j["min_gap"], "min_gap", 0);
  if (j.contains("max_placement_attempts")) {
    spec.max_placement_attempts = static_cast<int>(int_at_least(j["max_placement_attempts"], "max_placement_attempts", 1));
  }
  if (j.contains("objects")) {
    if (!j["objects"].is_array()) field_error("objects", "expected an array");
    for (std::size_t k = 0; k < j["objects"].size(); ++k) {
      spec.objects.push_back(object_from_json(j["objects"][k], "objects[" + std::to_string(k) + "]"));
    }
  }
  spec.validate();
  return spec;
}

std::string phantom_spec_to_json(const PhantomSpec& spec) {
  auto arr = [](Vec3 v) { return json::array({v.x, v.y, v.z}); };
  json objects = json::array();
  for (const ObjectSpec& o : spec.objects) {
    json jo{{"type", std::string(shape_kind_name(o.kind))}, {"contrast", o.contrast}};
    switch (o.kind) {
      case ShapeKind::Sheet:
        jo["thickness"] = o.thickness;
        jo["normal"] = std::string(axis_name(o.axis));
        if (o.extent) jo["extent"] = {o.extent->first, o.extent->second};
        break;
      case ShapeKind::Pipe:
      case ShapeKind::Rivet:
        jo["radius"] = o.radius;
        jo["axis"] = std::string(axis_name(o.axis));
        if (o.length) jo["length"] = *o.length;
        break;
      case ShapeKind::Bracket: jo["size"] = arr(o.size); break;
    }
    if (o.position) jo["position"] = arr(*o.position);
    objects.push_back(jo);
  }
  const json j{{"dims", arr(spec.dims)},
               {"origin", arr(spec.origin)},
               {"seed", spec.seed},
               {"noise_sigma", spec.noise_sigma},
               {"min_gap", spec.min_gap},
               {"max_placement_attempts", spec.max_placement_attempts},
               {"objects", objects}};
  return j.dump(2);
}

Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  Phantom ph{ScalarVolume(spec.dims, 0.0f, spec.origin), LabelVolume(spec.dims, 0, spec.origin), {}};
  std::vector<Box> keep_out;  // placed bboxes grown by min_gap

  for (std::size_t k = 0; k < spec.objects.size(); ++k) {
    const ObjectSpec& o = spec.objects[k];
    const Vec3 ext = object_extent(o, spec.dims);
    auto fits = [&](Vec3 at) {
      const Box b{at, at + ext};
      for (int a = 0; a < 3; ++a)
        if (b.lo[a] < 0 || b.hi[a] > spec.dims[a]) return false;
      return std::none_of(keep_out.begin(), keep_out.end(), [&](const Box& other) { return boxes_intersect(b, other); });
    };

    std::optional<Vec3> at;
    if (o.position) {
      if (!fits(*o.position)) {
        throw Error("objects[" + std::to_string(k) + "]: position collides with another object or the volume bounds");
      }
      at = o.position;
    } else {
      Rng rng(derive_seed(spec.seed, {1, k}));
      for (int attempt = 0; attempt < spec.max_placement_attempts && !at; ++attempt) {
        Vec3 cand;
        for (int a = 0; a < 3; ++a) cand[a] = rng.uniform_int(0, spec.dims[a] - ext[a]);
        if (fits(cand)) at = cand;
      }
      if (!at) {
        throw Error("objects[" + std::to_string(k) + "]: could not be placed after " +
                    std::to_string(spec.max_placement_attempts) + " attempts");
      }
    }
    keep_out.push_back(grown(Box{*at, *at + ext}, spec.min_gap));
    ph.positions.push_back(*at);
    const auto label = static_cast<Label>(k + 1);
    rasterize(o, spec.dims, *at, [&](Vec3 p) { ph.labels[p] = label; });
  }

  std::vector<float> contrast(spec.objects.size() + 1, 0.0f);
  for (std::size_t k = 0; k < spec.objects.size(); ++k) contrast[k + 1] = static_cast<float>(spec.objects[k].contrast);
  const Vec3 d = spec.dims;
  parallel_for(0, d.z, [&](std::int64_t z0, std::int64_t z1, int) {
    for (std::int64_t z = z0; z < z1; ++z) {
      Rng rng(derive_seed(spec.seed, {2, static_cast<std::uint64_t>(z)}));
      for (std::int64_t y = 0; y < d.y; ++y)
        for (std::int64_t x = 0; x < d.x; ++x) {
          double v = contrast[ph.labels(x, y, z)];
          if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
          ph.intensity(x, y, z) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
  });
  return ph;
}

PhantomSpec random_phantom_spec(std::uint64_t seed, Vec3 dims, const RandomPhantomOptions& opt) {
  PhantomSpec spec;
  spec.dims = dims;
  spec.seed = seed;
  spec.noise_sigma = opt.noise_sigma;
  Rng rng(derive_seed(seed, {3}));
  const std::int64_t small = std::max<std::int64_t>(1, std::min({dims.x, dims.y, dims.z}));
  const std::int64_t t0 = opt.min_thickness;
  auto pick_axis = [&] { return static_cast<Axis>(rng.uniform_int(0, 2)); };
  auto contrast = [&] { return 0.4 + 0.6 * rng.uniform(); };

  for (int i = 0; i < opt.sheets; ++i) {
    ObjectSpec o;
    o.kind = ShapeKind::Sheet;
    o.axis = pick_axis();
    o.thickness = rng.uniform_int(t0, t0 + 1);
    const auto [ua, va] = plane_axes(o.axis);
    o.extent = std::pair{rng.uniform_int(std::max<std::int64_t>(t0, dims[ua] / 4), std::max<std::int64_t>(t0, dims[ua] / 2)),
                         rng.uniform_int(std::max<std::int64_t>(t0, dims[va] / 4), std::max<std::int64_t>(t0, dims[va] / 2))};
    o.contrast = contrast();
    spec.objects.push_back(o);
  }
  for (int i = 0; i < opt.pipes; ++i) {
    ObjectSpec o;
    o.kind = ShapeKind::Pipe;
    o.axis = pick_axis();
    o.radius = 1.5 + rng.uniform() * 2.0;
    o.length = rng.uniform_int(std::max<std::int64_t>(t0, dims[o.axis] / 4), std::max<std::int64_t>(t0, dims[o.axis] / 2));
    o.contrast = contrast();
    spec.objects.push_back(o);
  }
  for (int i = 0; i < opt.rivets; ++i) {
    ObjectSpec o;
    o.kind = ShapeKind::Rivet;
    o.axis = pick_axis();
    o.radius = 1.5 + rng.uniform();
    o.length = rng.uniform_int(t0, t0 + 3);
    o.contrast = contrast();
    spec.objects.push_back(o);
  }
  for (int i = 0; i < opt.brackets; ++i) {
    ObjectSpec o;
    o.kind = ShapeKind::Bracket;
    for (int a = 0; a < 3; ++a) o.size[a] = rng.uniform_int(t0, std::max<std::int64_t>(t0, small / 6));
    o.contrast = contrast();
    spec.objects.push_back(o);
  }
  return spec;
}

SliceStack perfect_slice_stack(const LabelVolume& reference) {
  std::array<std::vector<LabelMap>, 3> maps;
  for (Axis a : kAxes) {
    auto& seq = maps[axis_index(a)];
    seq.resize(static_cast<std::size_t>(reference.dims()[a]));
    parallel_for(0, reference.dims()[a], [&](std::int64_t i0, std::int64_t i1, int) {
      for (std::int64_t i = i0; i < i1; ++i)
        seq[static_cast<std::size_t>(i)] = connected_components(extract_slice(reference, a, i), Connectivity::TwentySix);
    });
  }
  return SliceStack(reference.meta(), std::move(maps));
}

SliceStack corrupt_stack(const SliceStack& stack, std::uint64_t seed, double split_rate, double drop_rate,
                         CorruptionReport* report) {
  if (!(split_rate >= 0.0 && split_rate <= 1.0)) throw InvalidArgument("split_rate must lie in [0, 1]");
  if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) throw InvalidArgument("drop_rate must lie in [0, 1]");
  SliceStack out = stack;
  CorruptionReport rep;

  for (Axis a : kAxes) {
    for (std::int64_t i = 0; i < stack.slice_count(a); ++i) {
      const LabelMap& src = stack.map(a, i);
      LabelMap& dst = out.map(a, i);
      const SegmentTable table(src);
      if (table.empty()) continue;
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(axis_index(a)), static_cast<std::uint64_t>(i)}));
      Label fresh = table.entries().rbegin()->first;

      for (const auto& [id, info] : table.entries()) {
        ++rep.instances_before;
        const double u_drop = rng.uniform();
        const double u_split = rng.uniform();
        auto for_each_voxel = [&](auto&& fn) {
          for (std::int64_t v = info.bbox_min.y; v <= info.bbox_max.y; ++v)
            for (std::int64_t u = info.bbox_min.x; u <= info.bbox_max.x; ++u)
              if (src(u, v, 0) == id) fn(u, v);
        };
        if (u_drop < drop_rate) {
          for_each_voxel([&](std::int64_t u, std::int64_t v) { dst(u, v, 0) = 0; });
          ++rep.drops;
          continue;
        }
        if (!(u_split < split_rate)) continue;
        const bool can_u = info.bbox_max.x > info.bbox_min.x;
        const bool can_v = info.bbox_max.y > info.bbox_min.y;
        if (!can_u && !can_v) continue;
        const bool along_u = can_u && (!can_v || rng.uniform() < 0.5);
        const std::int64_t lo = along_u ? info.bbox_min.x : info.bbox_min.y;
        const std::int64_t hi = along_u ? info.bbox_max.x : info.bbox_max.y;
        const std::int64_t cut = rng.uniform_int(lo + 1, hi);
        const Label part = ++fresh;
        for_each_voxel([&](std::int64_t u, std::int64_t v) {
          if ((along_u ? u : v) >= cut) dst(u, v, 0) = part;
        });
        ++rep.splits;
      }
    }
  }
  if (report) *report = rep;
  return out;
}

}  // namespace xxlseg
