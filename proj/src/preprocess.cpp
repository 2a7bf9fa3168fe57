#include "xxlseg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xxlseg/parallel.hpp"

namespace xxlseg {

ThreeClassVolume::ThreeClassVolume(LabelVolume classes) : classes_(std::move(classes)) {
  for (Label c : classes_.voxels()) {
    if (c > 2) throw InvalidArgument("three-class volume holds value " + std::to_string(c) + " outside {0,1,2}");
  }
}

namespace {

// Chambolle's bound for 3D is 1/12 (||div||^2 <= 12).
constexpr double kStep = 1.0 / 12.0;

struct Grid {
  Vec3 d;
  std::int64_t sx = 1, sy, sz;
  explicit Grid(Vec3 dims) : d(dims), sy(dims.x), sz(dims.x * dims.y) {}
};

// Forward difference along every axis, zero on the last layer.
inline void gradient(const std::vector<double>& w, const Grid& g, std::int64_t x, std::int64_t y,
                     std::int64_t z, std::int64_t i, double out[3]) {
  out[0] = x + 1 < g.d.x ? w[i + g.sx] - w[i] : 0.0;
  out[1] = y + 1 < g.d.y ? w[i + g.sy] - w[i] : 0.0;
  out[2] = z + 1 < g.d.z ? w[i + g.sz] - w[i] : 0.0;
}

// Negative adjoint of `gradient`.
void divergence(const std::vector<double> p[3], const Grid& g, std::vector<double>& div) {
  parallel_for(0, g.d.z, [&](std::int64_t z0, std::int64_t z1, int) {
    for (std::int64_t z = z0; z < z1; ++z)
      for (std::int64_t y = 0; y < g.d.y; ++y)
        for (std::int64_t x = 0; x < g.d.x; ++x) {
          const std::int64_t i = x + g.sy * y + g.sz * z;
          double v = p[0][i] + p[1][i] + p[2][i];
          if (x > 0) v -= p[0][i - g.sx];
          if (y > 0) v -= p[1][i - g.sy];
          if (z > 0) v -= p[2][i - g.sz];
          div[i] = v;
        }
  });
}

double objective_of(const std::vector<double>& u, const std::vector<double>& f, const Grid& g,
                    double weight) {
  std::vector<double> per_plane(static_cast<std::size_t>(g.d.z), 0.0);
  parallel_for(0, g.d.z, [&](std::int64_t z0, std::int64_t z1, int) {
    double grad[3];
    for (std::int64_t z = z0; z < z1; ++z) {
      double fid = 0.0, tv = 0.0;
      for (std::int64_t y = 0; y < g.d.y; ++y)
        for (std::int64_t x = 0; x < g.d.x; ++x) {
          const std::int64_t i = x + g.sy * y + g.sz * z;
          const double r = u[i] - f[i];
          fid += r * r;
          gradient(u, g, x, y, z, i, grad);
          tv += std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]);
        }
      per_plane[z] = 0.5 * fid + weight * tv;
    }
  });
  double total = 0.0;
  for (double v : per_plane) total += v;
  return total;
}

std::vector<double> to_double(const ScalarVolume& v) {
  return std::vector<double>(v.voxels().begin(), v.voxels().end());
}

}  // namespace

double rof_objective(const ScalarVolume& u, const ScalarVolume& f, double weight) {
  if (u.dims() != f.dims()) throw InvalidArgument("rof_objective: dims mismatch");
  return objective_of(to_double(u), to_double(f), Grid(u.dims()), weight);
}

TvDenoiseResult tv_denoise_traced(const ScalarVolume& input, const TvDenoiseParams& params) {
  if (!(params.weight > 0.0) || !std::isfinite(params.weight)) {
    throw InvalidArgument("tv_denoise: weight must be a positive finite number");
  }
  if (params.max_iterations < 1) throw InvalidArgument("tv_denoise: max_iterations must be >= 1");
  if (!(params.tolerance > 0.0)) throw InvalidArgument("tv_denoise: tolerance must be positive");
  for (float v : input.voxels()) {
    if (!std::isfinite(v)) throw InvalidArgument("tv_denoise: input contains non-finite values");
  }

  const Grid g(input.dims());
  const auto n = static_cast<std::size_t>(input.size());
  const double lambda = params.weight;
  const std::vector<double> f = to_double(input);
  std::vector<double> p[3] = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                              std::vector<double>(n, 0.0)};
  std::vector<double> div(n, 0.0), w(n), u = f, u_next(n);

  TvDenoiseResult result;
  result.objective.push_back(objective_of(u, f, g, lambda));

  for (int it = 0; it < params.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) w[i] = div[i] - f[i] / lambda;
    parallel_for(0, g.d.z, [&](std::int64_t z0, std::int64_t z1, int) {
      double grad[3];
      for (std::int64_t z = z0; z < z1; ++z)
        for (std::int64_t y = 0; y < g.d.y; ++y)
          for (std::int64_t x = 0; x < g.d.x; ++x) {
            const std::int64_t i = x + g.sy * y + g.sz * z;
            gradient(w, g, x, y, z, i, grad);
            const double norm = std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]);
            const double denom = 1.0 + kStep * norm;
            for (int a = 0; a < 3; ++a) p[a][i] = (p[a][i] + kStep * grad[a]) / denom;
          }
    });
    divergence(p, g, div);

    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u_next[i] = f[i] - lambda * div[i];
      max_change = std::max(max_change, std::abs(u_next[i] - u[i]));
    }
    u.swap(u_next);
    result.objective.push_back(objective_of(u, f, g, lambda));
    result.iterations = it + 1;
    if (max_change < params.tolerance) {
      result.converged = true;
      break;
    }
  }

  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(u[i]);
  result.volume = ScalarVolume(input.meta(), std::move(out));
  return result;
}

ThreeClassVolume labels_to_three_class(const LabelVolume& reference, int border_thickness) {
  if (border_thickness < 1) throw InvalidArgument("border_thickness must be >= 1");
  const Vec3 d = reference.dims();
  const auto offsets = neighbour_offsets(Connectivity::Six);

  // core[i] holds the label while the voxel survives erosion of its segment.
  LabelVolume core = reference;
  for (int step = 0; step < border_thickness; ++step) {
    LabelVolume next = core;
    parallel_for(0, d.z, [&](std::int64_t z0, std::int64_t z1, int) {
      for (std::int64_t z = z0; z < z1; ++z)
        for (std::int64_t y = 0; y < d.y; ++y)
          for (std::int64_t x = 0; x < d.x; ++x) {
            const Label l = core(x, y, z);
            if (l == 0) continue;
            for (const Vec3& o : offsets) {
              const Vec3 q{x + o.x, y + o.y, z + o.z};
              if (core.in_bounds(q) && core[q] != l) {
                next(x, y, z) = 0;
                break;
              }
            }
          }
    });
    core = std::move(next);
  }

  LabelVolume classes(d, 0, reference.meta().origin);
  for (std::int64_t i = 0; i < reference.size(); ++i) {
    if (reference[i] == 0) continue;
    classes[i] = core[i] != 0 ? static_cast<Label>(VoxelClass::Object) : static_cast<Label>(VoxelClass::Border);
  }
  return ThreeClassVolume(std::move(classes));
}

}  // namespace xxlseg
