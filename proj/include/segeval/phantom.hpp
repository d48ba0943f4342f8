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
#ifndef SEGEVAL_PHANTOM_HPP
#define SEGEVAL_PHANTOM_HPP

#include "segeval/volume.hpp"

#include <cstdint>
#include <vector>

namespace segeval {

/// Integer offsets within an isotropic index-space ball, (0,0,0) included.
class BallKernel {
public:
  explicit BallKernel(double radius_vox);

  double radius() const noexcept { return radius_; }
  const std::vector<Index3> &offsets() const noexcept { return offsets_; }

private:
  double radius_;
  std::vector<Index3> offsets_;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Closed index box [lo, hi]. Throws OutOfBounds unless 0 <= lo <= hi < dims.
Mask gen_box(const Geometry &g, const Index3 &lo, const Index3 &hi);

/// Voxel set where sum(((idx - center) * spacing / radius)^2) <= 1.
/// `center` is in voxel-index units, `radii_mm` in millimetres.
Mask gen_ellipsoid(const Geometry &g, const Point3 &center, const Point3 &radii_mm);

/// Shift by an integer offset; voxels leaving the grid are dropped.
Mask translate(const Mask &m, const Index3 &offset);

/// Minkowski sum with BallKernel(r_vox), clipped at the grid.
Mask dilate_ball(const Mask &m, double r_vox);

/// Invert each voxel independently with probability `rate`.
///
/// Voxel n is flipped iff u(seed, n) < rate, where u takes the top 53 bits
/// of splitmix64(seed + (n + 1) * 0x9E3779B97F4A7C15) as a double in [0,1).
/// The stream is counter-based, so the result does not depend on traversal
/// order or threading.
Mask flip_noise(const Mask &m, double rate, std::uint64_t seed);

/// As above, but only voxels set in `region` are eligible. A voxel inside the
/// region flips exactly when it would flip in the unrestricted call.
Mask flip_noise(const Mask &m, double rate, std::uint64_t seed, const Mask &region);

/// Voxels within BallKernel(r_vox) of a 6-connected boundary voxel of `m`.
/// An empty mask gives an empty band.
Mask boundary_band(const Mask &m, double r_vox);

/// SplitMix64 output function (Steele, Lea & Flood), exposed for reproducibility.
std::uint64_t splitmix64(std::uint64_t state) noexcept;

double volume_mm3(const Mask &m) noexcept;

/// 200 * (left - right) / (left + right), in percent. Throws BothEmpty when
/// left + right is zero.
double asymmetry_index(double vol_left_mm3, double vol_right_mm3);

} // namespace segeval

#endif
