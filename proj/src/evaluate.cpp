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
#include "segeval/evaluate.hpp"

#include "segeval/phantom.hpp"

#include <algorithm>

namespace segeval {

bool is_metric_name(std::string_view name) noexcept {
  return std::find(kMetricNames.begin(), kMetricNames.end(), name) != kMetricNames.end();
}

PairEvaluation evaluate_pair(const Mask &ref, const Mask &test, const EdtOptions &opts) {
  PairEvaluation e;
  e.counts = confusion_counts(ref, test);
  e.overlap = overlap_metrics(e.counts);
  if (!ref.empty() && !test.empty()) {
    const auto d = surface_distances(ref, test, opts);
    e.distance = distance_metrics(d.ref_to_test, d.test_to_ref);
  }
  e.ref_volume_mm3 = volume_mm3(ref);
  e.test_volume_mm3 = volume_mm3(test);
  return e;
}

std::vector<MetricRecord> to_records(const std::string &case_id, const std::string &method,
                                     const PairEvaluation &e) {
  std::vector<MetricRecord> out;
  const auto add = [&](std::string_view metric, double value) {
    out.push_back({case_id, method, std::string(metric), value});
  };
  add("dice", e.overlap.dice);
  add("jaccard", e.overlap.jaccard);
  add("precision", e.overlap.precision);
  add("recall", e.overlap.recall);
  add("volume_similarity", e.overlap.volume_similarity);
  if (e.distance) {
    add("hausdorff", e.distance->hausdorff_mm);
    add("hd95", e.distance->hd95_mm);
    add("mean_sd", e.distance->mean_sd_mm);
    add("rms", e.distance->rms_mm);
  }
  add("volume_mm3", e.test_volume_mm3);
  return out;
}

std::vector<std::string> evaluation_warnings(const std::string &case_id,
                                             const std::string &method,
                                             const PairEvaluation &e) {
  std::vector<std::string> out;
  const auto where = "case " + case_id + ", method " + method + ": ";
  if (e.overlap.precision_undefined) {
    out.push_back(where + "precision undefined (no test voxels), reported as 0");
  }
  if (e.overlap.recall_undefined) {
    out.push_back(where + "recall undefined (no reference voxels), reported as 0");
  }
  if (!e.distance) {
    out.push_back(where + "one mask is empty, surface distances omitted");
  }
  return out;
}

} // namespace segeval
