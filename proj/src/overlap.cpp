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
#include "segeval/overlap.hpp"

#include "segeval/error.hpp"
#include "segeval/volume_io.hpp"

#include <cmath>

namespace segeval {

ConfusionCounts confusion_counts(const Mask &ref, const Mask &test) {
  check_grid_compat(ref, test);
  const auto &r = ref.occupancy();
  const auto &t = test.occupancy();
  // Index 2*ref + test: 0 tn, 1 fp, 2 fn, 3 tp.
  std::uint64_t tally[4] = {0, 0, 0, 0};
  for (std::size_t n = 0; n < r.size(); ++n) {
    ++tally[2 * r[n] + t[n]];
  }
  return {tally[3], tally[1], tally[2], tally[0]};
}

OverlapMetrics overlap_metrics(const ConfusionCounts &c) {
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto fn = static_cast<double>(c.fn);
  if (c.tp + c.fp + c.fn == 0) {
    throw Error(ErrorKind::BothEmpty, "reference and test masks are both empty");
  }
  OverlapMetrics m;
  m.dice = 2.0 * tp / (2.0 * tp + fp + fn);
  m.jaccard = tp / (tp + fp + fn);
  if (c.tp + c.fp == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = tp / (tp + fp);
  }
  if (c.tp + c.fn == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = tp / (tp + fn);
  }
  m.volume_similarity = 1.0 - std::abs(fp - fn) / (2.0 * tp + fp + fn);
  return m;
}

} // namespace segeval
