/*=========================================================================
 *
 *  Copyright The segeval Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *         http://www.apache.org/licenses/LICENSE-2.0.txt
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 *
 *=========================================================================*/
#include "segeval/surface.hpp"

#include "segeval/error.hpp"
#include "segeval/volume_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace segeval {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineScratch {
  std::vector<double> f;
  std::vector<std::int64_t> v;
  std::vector<double> z;

  explicit LineScratch(std::size_t n) : f(n), v(n), z(n + 1) {}
};

/// In-place d[q] = min_p f[p] + w (q - p)^2 on one strided line. Entries
/// equal to +inf carry no site; an all-infinite line is left untouched.
void envelope_1d(double *line, std::int64_t n, std::int64_t stride, double w, LineScratch &s) {
  auto &f = s.f;
  auto &v = s.v;
  auto &z = s.z;
  std::int64_t k = -1;
  for (std::int64_t q = 0; q < n; ++q) {
    f[q] = line[q * stride];
    if (f[q] == kInf) {
      continue;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    const double fq = f[q] + w * double(q) * double(q);
    double cross;
    for (;;) {
      const auto p = v[k];
      cross = (fq - (f[p] + w * double(p) * double(p))) / (2.0 * w * double(q - p));
      if (cross > z[k]) {
        break;
      }
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = cross;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    return;
  }
  k = 0;
  for (std::int64_t q = 0; q < n; ++q) {
    while (z[k + 1] < double(q)) {
      ++k;
    }
    const double dq = double(q - v[k]);
    line[q * stride] = w * dq * dq + f[v[k]];
  }
}

template <typename Fn> void run_partitioned(std::int64_t count, unsigned threads, Fn &&fn) {
  const auto workers = static_cast<std::int64_t>(std::max(1u, threads));
  if (workers == 1 || count < 2) {
    fn(std::int64_t{0}, count);
    return;
  }
  std::vector<std::jthread> pool;
  const auto chunk = (count + workers - 1) / workers;
  for (std::int64_t begin = 0; begin < count; begin += chunk) {
    pool.emplace_back([&fn, begin, end = std::min(count, begin + chunk)] { fn(begin, end); });
  }
}

/// Squared distance to the nearest site over grid `g`; `site_linear` holds
/// linear indices into `g`.
std::vector<double> squared_field(std::span<const std::size_t> site_linear, const Geometry &g,
                                  unsigned threads) {
  const auto nx = g.dims.nx;
  const auto ny = g.dims.ny;
  const auto nz = g.dims.nz;
  std::vector<double> d(static_cast<std::size_t>(g.dims.count()), kInf);
  for (auto n : site_linear) {
    d[n] = 0.0;
  }
  double *base = d.data();

  const double wx = g.spacing.sx * g.spacing.sx;
  run_partitioned(ny * nz, threads, [&](std::int64_t b, std::int64_t e) {
    LineScratch s(static_cast<std::size_t>(nx));
    for (auto line = b; line < e; ++line) {
      envelope_1d(base + line * nx, nx, 1, wx, s);
    }
  });

  const double wy = g.spacing.sy * g.spacing.sy;
  run_partitioned(nx * nz, threads, [&](std::int64_t b, std::int64_t e) {
    LineScratch s(static_cast<std::size_t>(ny));
    for (auto line = b; line < e; ++line) {
      const auto i = line % nx;
      const auto k = line / nx;
      envelope_1d(base + k * nx * ny + i, ny, nx, wy, s);
    }
  });

  const double wz = g.spacing.sz * g.spacing.sz;
  run_partitioned(nx * ny, threads, [&](std::int64_t b, std::int64_t e) {
    LineScratch s(static_cast<std::size_t>(nz));
    for (auto line = b; line < e; ++line) {
      envelope_1d(base + line, nz, nx * ny, wz, s);
    }
  });
  return d;
}

std::vector<std::size_t> linear_sites(const SurfaceSet &sites, const Geometry &g) {
  if (sites.voxels.empty()) {
    throw Error(ErrorKind::EmptySurface, "distance transform needs at least one site");
  }
  std::vector<std::size_t> out;
  out.reserve(sites.voxels.size());
  for (const auto &p : sites.voxels) {
    if (!g.contains(p)) {
      throw Error(ErrorKind::OutOfBounds, "surface voxel lies outside the grid");
    }
    out.push_back(g.linear(p));
  }
  return out;
}

void require_nonempty(const Mask &m, const char *role) {
  if (m.empty()) {
    throw Error(ErrorKind::EmptyMask, std::string(role) + " mask is empty");
  }
}

} // namespace

SurfaceSet boundary(const Mask &m) {
  require_nonempty(m, "input");
  const auto &g = m.geometry();
  const auto nx = g.dims.nx;
  const auto ny = g.dims.ny;
  const auto nz = g.dims.nz;
  SurfaceSet out{g, {}};
  for (std::int64_t k = 0; k < nz; ++k) {
    for (std::int64_t j = 0; j < ny; ++j) {
      for (std::int64_t i = 0; i < nx; ++i) {
        const Index3 p{i, j, k};
        if (!m.at(p)) {
          continue;
        }
        const bool edge = i == 0 || j == 0 || k == 0 || i == nx - 1 || j == ny - 1 || k == nz - 1;
        if (edge || !m.at({i - 1, j, k}) || !m.at({i + 1, j, k}) || !m.at({i, j - 1, k}) ||
            !m.at({i, j + 1, k}) || !m.at({i, j, k - 1}) || !m.at({i, j, k + 1})) {
          out.voxels.push_back(p);
        }
      }
    }
  }
  return out;
}

std::vector<double> edt_squared(const SurfaceSet &sites, const Geometry &g,
                                const EdtOptions &opts) {
  validate_geometry(g);
  const auto linear = linear_sites(sites, g);
  return squared_field(linear, g, opts.threads);
}

DistanceField edt(const SurfaceSet &sites, const Geometry &g, const EdtOptions &opts) {
  auto d = edt_squared(sites, g, opts);
  for (auto &x : d) {
    x = std::sqrt(x);
  }
  return {g, std::move(d)};
}

SurfaceDistances surface_distances(const Mask &ref, const Mask &test, const EdtOptions &opts) {
  require_nonempty(ref, "reference");
  require_nonempty(test, "test");
  check_grid_compat(ref, test);
  const auto sref = boundary(ref);
  const auto stest = boundary(test);

  // Every site and every query point lies in the bounding box of the two
  // surfaces, so the transform restricted to that box is still exact.
  Index3 lo{ref.dims().nx, ref.dims().ny, ref.dims().nz};
  Index3 hi{-1, -1, -1};
  for (const auto *set : {&sref, &stest}) {
    for (const auto &p : set->voxels) {
      lo = {std::min(lo.i, p.i), std::min(lo.j, p.j), std::min(lo.k, p.k)};
      hi = {std::max(hi.i, p.i), std::max(hi.j, p.j), std::max(hi.k, p.k)};
    }
  }
  const Geometry box{{hi.i - lo.i + 1, hi.j - lo.j + 1, hi.k - lo.k + 1}, ref.spacing()};
  const auto local = [&](const Index3 &p) {
    return box.linear({p.i - lo.i, p.j - lo.j, p.k - lo.k});
  };

  const auto sample = [&](const SurfaceSet &sites, const SurfaceSet &queries) {
    std::vector<std::size_t> lin;
    lin.reserve(sites.voxels.size());
    for (const auto &p : sites.voxels) {
      lin.push_back(local(p));
    }
    const auto field = squared_field(lin, box, opts.threads);
    std::vector<double> out;
    out.reserve(queries.voxels.size());
    for (const auto &p : queries.voxels) {
      out.push_back(std::sqrt(field[local(p)]));
    }
    return out;
  };

  return {sample(stest, sref), sample(sref, stest)};
}

DistanceSummary distance_metrics(std::span<const double> ref_to_test,
                                 std::span<const double> test_to_ref) {
  if (ref_to_test.empty() || test_to_ref.empty()) {
    throw Error(ErrorKind::EmptyDistances, "both distance lists must be non-empty");
  }
  std::vector<double> pooled(ref_to_test.begin(), ref_to_test.end());
  pooled.insert(pooled.end(), test_to_ref.begin(), test_to_ref.end());
  std::sort(pooled.begin(), pooled.end());

  const std::size_t n = pooled.size();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : pooled) {
    sum += x;
    sum_sq += x * x;
  }
  // 1-based nearest rank ceil(95 n / 100), in integers.
  const std::size_t rank = (95 * n + 99) / 100;

  DistanceSummary out;
  out.hausdorff_mm = pooled.back();
  out.hd95_mm = pooled[rank - 1];
  out.mean_sd_mm = sum / double(n);
  out.rms_mm = std::sqrt(sum_sq / double(n));
  // Rounding in the two sums can put mean a hair above rms when all values
  // are equal; the power-mean ordering is exact in real arithmetic.
  out.mean_sd_mm = std::min(out.mean_sd_mm, out.rms_mm);
  out.rms_mm = std::min(out.rms_mm, out.hausdorff_mm);
  out.n_ref_surface = ref_to_test.size();
  out.n_test_surface = test_to_ref.size();
  return out;
}

} // namespace segeval
