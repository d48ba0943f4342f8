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
#include "segeval/phantom.hpp"

#include "segeval/error.hpp"
#include "segeval/surface.hpp"
#include "segeval/volume_io.hpp"

#include <cmath>
#include <string>

namespace segeval {

BallKernel::BallKernel(double radius_vox)
    : radius_(radius_vox) {
  if (!(radius_vox >= 0.0) || !std::isfinite(radius_vox)) {
    throw Error(ErrorKind::InvalidArgument, "ball radius must be finite and non-negative");
  }
  const auto reach = static_cast<std::int64_t>(std::floor(radius_vox));
  const double r2 = radius_vox * radius_vox;
  for (std::int64_t k = -reach; k <= reach; ++k) {
    for (std::int64_t j = -reach; j <= reach; ++j) {
      for (std::int64_t i = -reach; i <= reach; ++i) {
        if (static_cast<double>(i * i + j * j + k * k) <= r2) {
          offsets_.push_back({i, j, k});
        }
      }
    }
  }
}

Mask gen_box(const Geometry &g, const Index3 &lo, const Index3 &hi) {
  Mask out(g);
  if (!g.contains(lo) || !g.contains(hi) || lo.i > hi.i || lo.j > hi.j || lo.k > hi.k) {
    throw Error(ErrorKind::OutOfBounds, "box corners must satisfy 0 <= lo <= hi < dims");
  }
  for (auto k = lo.k; k <= hi.k; ++k) {
    for (auto j = lo.j; j <= hi.j; ++j) {
      for (auto i = lo.i; i <= hi.i; ++i) {
        out.set(Index3{i, j, k}, true);
      }
    }
  }
  return out;
}

Mask gen_ellipsoid(const Geometry &g, const Point3 &center, const Point3 &radii_mm) {
  Mask out(g);
  if (!(radii_mm.x > 0.0 && radii_mm.y > 0.0 && radii_mm.z > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "ellipsoid radii must be positive");
  }
  const auto inside = [](double c, std::int64_t n) { return c >= 0.0 && c <= double(n - 1); };
  if (!inside(center.x, g.dims.nx) || !inside(center.y, g.dims.ny) ||
      !inside(center.z, g.dims.nz)) {
    throw Error(ErrorKind::OutOfBounds, "ellipsoid center lies outside the grid");
  }
  const auto &s = g.spacing;
  for (std::int64_t k = 0; k < g.dims.nz; ++k) {
    const double dz = (double(k) - center.z) * s.sz / radii_mm.z;
    for (std::int64_t j = 0; j < g.dims.ny; ++j) {
      const double dy = (double(j) - center.y) * s.sy / radii_mm.y;
      for (std::int64_t i = 0; i < g.dims.nx; ++i) {
        const double dx = (double(i) - center.x) * s.sx / radii_mm.x;
        if (dx * dx + dy * dy + dz * dz <= 1.0) {
          out.set(Index3{i, j, k}, true);
        }
      }
    }
  }
  return out;
}

Mask translate(const Mask &m, const Index3 &offset) {
  const auto &g = m.geometry();
  Mask out(g);
  for (std::size_t n = 0; n < m.size(); ++n) {
    if (!m[n]) {
      continue;
    }
    const auto p = g.unravel(n);
    const Index3 q{p.i + offset.i, p.j + offset.j, p.k + offset.k};
    if (g.contains(q)) {
      out.set(q, true);
    }
  }
  return out;
}

Mask dilate_ball(const Mask &m, double r_vox) {
  const BallKernel kernel(r_vox);
  const auto &g = m.geometry();
  Mask out(g);
  for (std::size_t n = 0; n < m.size(); ++n) {
    if (!m[n]) {
      continue;
    }
    const auto p = g.unravel(n);
    for (const auto &o : kernel.offsets()) {
      const Index3 q{p.i + o.i, p.j + o.j, p.k + o.k};
      if (g.contains(q)) {
        out.set(q, true);
      }
    }
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double noise_uniform(std::uint64_t seed, std::size_t n) noexcept {
  constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  constexpr double kTwoPow53 = 9007199254740992.0;
  const auto bits = splitmix64(seed + (static_cast<std::uint64_t>(n) + 1) * kGolden);
  return static_cast<double>(bits >> 11) / kTwoPow53;
}

void check_rate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "flip rate must lie in [0, 1]");
  }
}

} // namespace

Mask flip_noise(const Mask &m, double rate, std::uint64_t seed) {
  check_rate(rate);
  Mask out = m;
  for (std::size_t n = 0; n < m.size(); ++n) {
    if (noise_uniform(seed, n) < rate) {
      out.set(n, !m[n]);
    }
  }
  return out;
}

Mask flip_noise(const Mask &m, double rate, std::uint64_t seed, const Mask &region) {
  check_rate(rate);
  check_grid_compat(m, region);
  Mask out = m;
  for (std::size_t n = 0; n < m.size(); ++n) {
    if (region[n] && noise_uniform(seed, n) < rate) {
      out.set(n, !m[n]);
    }
  }
  return out;
}

Mask boundary_band(const Mask &m, double r_vox) {
  Mask surface(m.geometry());
  if (m.empty()) {
    return surface;
  }
  for (const auto &v : boundary(m).voxels) {
    surface.set(m.geometry().linear(v), true);
  }
  return dilate_ball(surface, r_vox);
}

double volume_mm3(const Mask &m) noexcept {
  return static_cast<double>(m.popcount()) * m.spacing().voxel_volume();
}

double asymmetry_index(double vol_left_mm3, double vol_right_mm3) {
  const double total = vol_left_mm3 + vol_right_mm3;
  if (!(total > 0.0)) {
    throw Error(ErrorKind::BothEmpty, "both volumes are zero");
  }
  return 200.0 * ((vol_left_mm3 - vol_right_mm3) / total);
}

} // namespace segeval
