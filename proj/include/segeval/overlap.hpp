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
#ifndef SEGEVAL_OVERLAP_HPP
#define SEGEVAL_OVERLAP_HPP

#include "segeval/volume.hpp"

#include <cstdint>

namespace segeval {

/// Voxel tallies with the first mask as reference (manual standard) and
/// the second as the method under test.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts &, const ConfusionCounts &) = default;
};

/// Dice, Jaccard, precision = TP/(TP+FP), recall = TP/(TP+FN) and volume
/// similarity. A 0/0 precision or recall is reported as 0 and flagged.
struct OverlapMetrics {
  double dice = 0.0;
  double jaccard = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double volume_similarity = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

/// Grid mismatches propagate from check_grid_compat.
ConfusionCounts confusion_counts(const Mask &ref, const Mask &test);

/// Throws BothEmpty when tp + fp + fn == 0.
OverlapMetrics overlap_metrics(const ConfusionCounts &c);

} // namespace segeval

#endif
