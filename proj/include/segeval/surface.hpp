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
#ifndef SEGEVAL_SURFACE_HPP
#define SEGEVAL_SURFACE_HPP

#include "segeval/volume.hpp"

#include <span>
#include <vector>

namespace segeval {

/// Mask voxels with at least one 6-neighbour outside the mask. Voxels past
/// the grid edge count as outside.
struct SurfaceSet {
  Geometry geometry;
  std::vector<Index3> voxels; // sorted by linear index
};

/// Euclidean distance (mm) from every voxel centre to the nearest site.
struct DistanceField {
  Geometry geometry;
  std::vector<double> mm;

  double at(const Index3 &p) const { return mm[geometry.linear(p)]; }
};

struct DistanceSummary {
  double hausdorff_mm = 0.0;
  double hd95_mm = 0.0;
  double mean_sd_mm = 0.0;
  double rms_mm = 0.0;
  std::size_t n_ref_surface = 0;
  std::size_t n_test_surface = 0;
};

struct SurfaceDistances {
  std::vector<double> ref_to_test; // one per reference boundary voxel
  std::vector<double> test_to_ref; // one per test boundary voxel
};

struct EdtOptions {
  /// Worker threads per pass. Lines are independent, so the output is
  /// bit-identical for any thread count.
  unsigned threads = 1;
};

/// Throws EmptyMask for an empty mask.
SurfaceSet boundary(const Mask &m);

/// Exact separable distance transform (lower envelope of parabolas, one
/// pass per axis weighted by that axis' squared spacing). Squared distances
/// are accumulated in double; the root is taken once at the end.
/// Throws EmptySurface when `sites` holds no voxels.
DistanceField edt(const SurfaceSet &sites, const Geometry &g, const EdtOptions &opts = {});

/// Same transform but returns squared millimetres, for callers that need
/// integer-exact values on unit grids.
std::vector<double> edt_squared(const SurfaceSet &sites, const Geometry &g,
                                const EdtOptions &opts = {});

/// Each boundary voxel of one mask sampled in the distance field of the
/// other's boundary. Throws EmptyMask or a grid-compat error.
SurfaceDistances surface_distances(const Mask &ref, const Mask &test,
                                   const EdtOptions &opts = {});

/// Hausdorff is the max over both lists. hd95 is the nearest-rank 95th
/// percentile of the pooled lists (1-based rank ceil(0.95 n)); mean and RMS
/// are taken over the pooled lists. Throws EmptyDistances.
DistanceSummary distance_metrics(std::span<const double> ref_to_test,
                                 std::span<const double> test_to_ref);

} // namespace segeval

#endif
