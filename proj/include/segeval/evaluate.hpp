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
#ifndef SEGEVAL_EVALUATE_HPP
#define SEGEVAL_EVALUATE_HPP

#include "segeval/overlap.hpp"
#include "segeval/stats.hpp"
#include "segeval/surface.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace segeval {

/// The ten per-(case, method) metrics, in report order.
inline constexpr std::array<std::string_view, 10> kMetricNames = {
    "dice",    "jaccard", "precision", "recall", "volume_similarity",
    "hausdorff", "hd95",  "mean_sd",   "rms",    "volume_mm3"};

bool is_metric_name(std::string_view name) noexcept;

struct PairEvaluation {
  ConfusionCounts counts;
  OverlapMetrics overlap;
  std::optional<DistanceSummary> distance; // empty when one mask is empty
  double ref_volume_mm3 = 0.0;
  double test_volume_mm3 = 0.0;
};

/// Full metric set for one reference/test pair. An empty test (or
/// reference) still yields overlap metrics; surface distances are then
/// omitted. Two empty masks throw BothEmpty.
PairEvaluation evaluate_pair(const Mask &ref, const Mask &test, const EdtOptions &opts = {});

/// One record per entry of kMetricNames (distance metrics only when
/// available); volume_mm3 is the test mask's.
std::vector<MetricRecord> to_records(const std::string &case_id, const std::string &method,
                                     const PairEvaluation &e);

/// Human-readable notes for 0/0 precision or recall and missing distances.
std::vector<std::string> evaluation_warnings(const std::string &case_id,
                                             const std::string &method,
                                             const PairEvaluation &e);

} // namespace segeval

#endif
