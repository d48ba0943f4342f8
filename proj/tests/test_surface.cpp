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
#include "segeval/error.hpp"
#include "segeval/phantom.hpp"
#include "segeval/surface.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace segeval {
namespace {

ErrorKind kind_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::InvalidArgument;
}

Mask voxels(const Geometry &g, std::initializer_list<Index3> list) {
  Mask m(g);
  for (const auto &p : list) m.set(p, true);
  return m;
}

DistanceSummary summarize(const Mask &a, const Mask &b) {
  const auto d = surface_distances(a, b);
  return distance_metrics(d.ref_to_test, d.test_to_ref);
}

TEST(Boundary, SingleVoxel) {
  const auto m = voxels({{5, 5, 5}, {}}, {{2, 3, 1}});
  const auto s = boundary(m);
  ASSERT_EQ(s.voxels.size(), 1u);
  EXPECT_EQ(s.voxels[0], (Index3{2, 3, 1}));
}

TEST(Boundary, SolidBoxKeepsShellOnly) {
  const auto box = gen_box({{5, 5, 5}, {}}, {1, 1, 1}, {3, 3, 3});
  const auto s = boundary(box);
  EXPECT_EQ(s.voxels.size(), 26u);
  EXPECT_EQ(std::count(s.voxels.begin(), s.voxels.end(), Index3{2, 2, 2}), 0);
}

TEST(Boundary, GridEdgeCountsAsBackground) {
  const Geometry g{{4, 4, 4}, {}};
  const auto full = gen_box(g, {0, 0, 0}, {3, 3, 3});
  EXPECT_EQ(boundary(full).voxels.size(), 56u);
}

TEST(Boundary, MatchesNaiveRule) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Geometry g{{9, 7, 11}, {}};
    auto m = trial % 2 ? oracle::random_mask(g, 0.6, rng) : oracle::random_blobs(g, 3, rng);
    if (m.empty()) continue;
    EXPECT_EQ(boundary(m).voxels, oracle::naive_boundary(m));
  }
}

TEST(Boundary, EmptyMaskIsError) {
  EXPECT_EQ(kind_of([] { boundary(Mask(Geometry{{3, 3, 3}, {}})); }), ErrorKind::EmptyMask);
}

TEST(Edt, SingleSiteUnitSpacing) {
  const Geometry g{{6, 5, 4}, {}};
  const auto f = edt({g, {{0, 0, 0}}}, g);
  for (std::int64_t k = 0; k < 4; ++k)
    for (std::int64_t j = 0; j < 5; ++j)
      for (std::int64_t i = 0; i < 6; ++i)
        EXPECT_DOUBLE_EQ(f.at({i, j, k}), std::sqrt(double(i * i + j * j + k * k)));
}

TEST(Edt, AnisotropicSpacing) {
  const Geometry g{{3, 3, 4}, {1, 1, 2.5}};
  const auto f = edt({g, {{0, 0, 0}}}, g);
  EXPECT_DOUBLE_EQ(f.at({0, 0, 2}), 5.0);
  EXPECT_DOUBLE_EQ(f.at({2, 0, 1}), std::sqrt(4.0 + 6.25));
}

TEST(Edt, MatchesBruteForceOnRandomMasks) {
  std::mt19937_64 rng(1234);
  for (const Spacing sp : {Spacing{1, 1, 1}, Spacing{1, 1, 2.5}, Spacing{0.7, 1.3, 2.2}}) {
    for (int trial = 0; trial < 4; ++trial) {
      const Geometry g{{13, 11, 9}, sp};
      const auto m = oracle::random_blobs(g, 2, rng);
      const auto s = boundary(m);
      const auto fast = edt(s, g);
      const auto slow = oracle::brute_field(s.voxels, g);
      for (std::size_t n = 0; n < slow.size(); ++n) {
        ASSERT_NEAR(fast.mm[n], slow[n], 1e-9 * std::max(1.0, slow[n])) << "voxel " << n;
      }
    }
  }
}

TEST(Edt, ZeroOnSitesAndLipschitz) {
  std::mt19937_64 rng(55);
  const Geometry g{{12, 12, 12}, {0.8, 1.0, 1.7}};
  const auto m = oracle::random_blobs(g, 3, rng);
  const auto s = boundary(m);
  const auto f = edt(s, g);
  for (const auto &p : s.voxels) EXPECT_EQ(f.at(p), 0.0);
  for (std::int64_t k = 0; k < 12; ++k)
    for (std::int64_t j = 0; j < 12; ++j)
      for (std::int64_t i = 0; i + 1 < 12; ++i) {
        EXPECT_LE(std::abs(f.at({i + 1, j, k}) - f.at({i, j, k})), g.spacing.sx + 1e-12);
        EXPECT_LE(std::abs(f.at({j, i + 1, k}) - f.at({j, i, k})), g.spacing.sy + 1e-12);
        EXPECT_LE(std::abs(f.at({j, k, i + 1}) - f.at({j, k, i})), g.spacing.sz + 1e-12);
      }
}

TEST(Edt, ThreadedResultIsBitIdentical) {
  std::mt19937_64 rng(66);
  const Geometry g{{40, 33, 27}, {1, 1, 2.5}};
  const auto s = boundary(oracle::random_blobs(g, 4, rng));
  const auto one = edt(s, g, {1});
  const auto four = edt(s, g, {4});
  EXPECT_EQ(one.mm, four.mm);
}

TEST(Edt, EmptySurfaceIsError) {
  const Geometry g{{3, 3, 3}, {}};
  EXPECT_EQ(kind_of([&] { edt({g, {}}, g); }), ErrorKind::EmptySurface);
}

TEST(SurfaceDistances, Identity) {
  const auto box = gen_box({{8, 8, 8}, {}}, {1, 2, 3}, {5, 6, 6});
  const auto d = surface_distances(box, box);
  EXPECT_EQ(d.ref_to_test.size(), boundary(box).voxels.size());
  for (double v : d.ref_to_test) EXPECT_EQ(v, 0.0);
  for (double v : d.test_to_ref) EXPECT_EQ(v, 0.0);
}

TEST(SurfaceDistances, TwoSingleVoxels) {
  const Geometry g{{5, 5, 5}, {}};
  const auto d = surface_distances(voxels(g, {{0, 0, 0}}), voxels(g, {{3, 0, 0}}));
  EXPECT_EQ(d.ref_to_test, std::vector<double>{3.0});
  EXPECT_EQ(d.test_to_ref, std::vector<double>{3.0});
}

TEST(SurfaceDistances, OneVersusTwo) {
  const Geometry g{{5, 5, 5}, {}};
  const auto d = surface_distances(voxels(g, {{0, 0, 0}}), voxels(g, {{0, 0, 0}, {2, 0, 0}}));
  EXPECT_EQ(d.ref_to_test, std::vector<double>{0.0});
  EXPECT_EQ(d.test_to_ref, (std::vector<double>{0.0, 2.0}));
}

TEST(SurfaceDistances, Errors) {
  const Geometry g{{5, 5, 5}, {}};
  const auto dot = voxels(g, {{1, 1, 1}});
  EXPECT_EQ(kind_of([&] { surface_distances(dot, Mask(g)); }), ErrorKind::EmptyMask);
  EXPECT_EQ(kind_of([&] { surface_distances(dot, voxels({{5, 5, 6}, {}}, {{1, 1, 1}})); }),
            ErrorKind::GridMismatch);
}

TEST(DistanceMetrics, Examples) {
  const std::vector<double> zero{0.0};
  const std::vector<double> three{3.0};
  const std::vector<double> two_pts{0.0, 2.0};

  const auto z = distance_metrics(zero, zero);
  EXPECT_EQ(z.hausdorff_mm, 0.0);
  EXPECT_EQ(z.hd95_mm, 0.0);
  EXPECT_EQ(z.mean_sd_mm, 0.0);
  EXPECT_EQ(z.rms_mm, 0.0);

  const auto t = distance_metrics(three, three);
  EXPECT_EQ(t.hausdorff_mm, 3.0);
  EXPECT_EQ(t.hd95_mm, 3.0);
  EXPECT_EQ(t.mean_sd_mm, 3.0);
  EXPECT_EQ(t.rms_mm, 3.0);

  const auto m = distance_metrics(zero, two_pts);
  EXPECT_EQ(m.hausdorff_mm, 2.0);
  EXPECT_NEAR(m.mean_sd_mm, 0.666667, 1e-6);
  EXPECT_NEAR(m.rms_mm, 1.154701, 1e-6);
  EXPECT_EQ(m.n_ref_surface, 1u);
  EXPECT_EQ(m.n_test_surface, 2u);
}

TEST(DistanceMetrics, NearestRankPercentile) {
  std::vector<double> a;
  std::vector<double> b;
  for (int v = 1; v <= 10; ++v) a.push_back(v);
  for (int v = 11; v <= 20; ++v) b.push_back(v);
  // n = 20: rank ceil(19.0) = 19.
  EXPECT_EQ(distance_metrics(a, b).hd95_mm, 19.0);
  const std::vector<double> c{21.0};
  // n = 21: rank ceil(19.95) = 20.
  std::vector<double> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  EXPECT_EQ(distance_metrics(ab, c).hd95_mm, 20.0);
}

TEST(DistanceMetrics, EmptyListIsError) {
  const std::vector<double> one{1.0};
  EXPECT_EQ(kind_of([&] { distance_metrics({}, one); }), ErrorKind::EmptyDistances);
}

TEST(Hausdorff, DilationOracle) {
  const Geometry g{{32, 32, 32}, {}};
  const auto sphere = gen_ellipsoid(g, {16, 16, 16}, {6, 6, 6});
  for (int k = 1; k <= 3; ++k) {
    const auto s = summarize(sphere, dilate_ball(sphere, k));
    EXPECT_DOUBLE_EQ(s.hausdorff_mm, double(k)) << "k = " << k;
  }
}

TEST(Hausdorff, MatchesPairwiseBruteForce) {
  std::mt19937_64 rng(808);
  for (const Spacing sp : {Spacing{1, 1, 1}, Spacing{0.9, 1.1, 2.5}}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Geometry g{{14, 12, 10}, sp};
      const auto a = oracle::random_blobs(g, 2, rng);
      const auto b = oracle::random_blobs(g, 2, rng);
      const auto sa = oracle::naive_boundary(a);
      const auto sb = oracle::naive_boundary(b);
      if (sa.size() > 500 || sb.size() > 500) continue;
      EXPECT_NEAR(summarize(a, b).hausdorff_mm, oracle::brute_hausdorff(sa, sb, sp), 1e-9);
    }
  }
}

TEST(DistanceSummary, SymmetricAndScaleCovariant) {
  std::mt19937_64 rng(909);
  const double lambda = 2.5;
  for (int trial = 0; trial < 10; ++trial) {
    const Geometry g{{16, 16, 16}, {1, 1, 1.5}};
    const auto a = oracle::random_blobs(g, 2, rng);
    const auto b = oracle::random_blobs(g, 2, rng);
    const auto ab = summarize(a, b);
    const auto ba = summarize(b, a);
    EXPECT_EQ(ab.hausdorff_mm, ba.hausdorff_mm);
    EXPECT_EQ(ab.hd95_mm, ba.hd95_mm);
    EXPECT_NEAR(ab.mean_sd_mm, ba.mean_sd_mm, 1e-12);
    EXPECT_NEAR(ab.rms_mm, ba.rms_mm, 1e-12);

    const Spacing big{lambda * 1, lambda * 1, lambda * 1.5};
    const auto scaled = summarize(a.with_spacing(big), b.with_spacing(big));
    EXPECT_NEAR(scaled.hausdorff_mm, lambda * ab.hausdorff_mm, 1e-9);
    EXPECT_NEAR(scaled.hd95_mm, lambda * ab.hd95_mm, 1e-9);
    EXPECT_NEAR(scaled.mean_sd_mm, lambda * ab.mean_sd_mm, 1e-9);
    EXPECT_NEAR(scaled.rms_mm, lambda * ab.rms_mm, 1e-9);
  }
}

TEST(DistanceSummary, PowerMeanOrdering) {
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 30; ++trial) {
    const Geometry g{{12, 12, 12}, {1, 1.2, 2}};
    const auto a = oracle::random_blobs(g, 3, rng);
    const auto b = oracle::random_mask(g, 0.1, rng);
    if (b.empty()) continue;
    const auto s = summarize(a, b);
    EXPECT_LE(s.mean_sd_mm, s.rms_mm);
    EXPECT_LE(s.rms_mm, s.hausdorff_mm);
    EXPECT_LE(s.hd95_mm, s.hausdorff_mm);
    EXPECT_GE(s.mean_sd_mm, 0.0);
  }
}

} // namespace
} // namespace segeval
