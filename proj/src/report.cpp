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
#include "segeval/report.hpp"

#include "segeval/error.hpp"
#include "segeval/evaluate.hpp"
#include "segeval/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <tuple>

namespace segeval {

using ojson = nlohmann::ordered_json;

const std::vector<std::pair<std::string, std::string>> &report_conventions() {
  static const std::vector<std::pair<std::string, std::string>> conventions = {
      {"reference", "the reference mask is the manual standard; test masks are judged against it"},
      {"precision", "precision = TP/(TP+FP), recall = TP/(TP+FN); a 0/0 value is reported as 0 "
                    "with a warning"},
      {"both_empty", "a pair with both masks empty is an error, not dice = 1"},
      {"boundary_rule", "6-connectivity: a mask voxel with any face neighbour outside the mask "
                        "or outside the grid"},
      {"surface_distance", "exact Euclidean distance between boundary voxel centres, in mm, "
                           "computed on voxel index times spacing; orientation is ignored"},
      {"hausdorff", "maximum of the pooled bidirectional surface distances"},
      {"hd95", "nearest-rank 95th percentile of the pooled distances, 1-based rank ceil(0.95 n), "
               "no interpolation"},
      {"mean_sd", "mean of the pooled bidirectional surface distances"},
      {"rms_pooling", "root mean square of the pooled bidirectional surface distances"},
      {"tests", "paired_t (two-sided, df = n - 1) and wilcoxon signed-rank, both always computed"},
      {"wilcoxon", "zero differences dropped; midranks for ties; exact enumeration for "
                   "n_effective <= 20, otherwise normal approximation with tie-corrected "
                   "variance and 0.5 continuity correction"},
      {"percent_difference", "100 * (mean_a - mean_b) / mean_b, baseline is method_b"},
      {"noise_prng", "splitmix64 counter stream: voxel n flips iff "
                     "(splitmix64(seed + (n + 1) * 0x9E3779B97F4A7C15) >> 11) * 2^-53 < rate"},
  };
  return conventions;
}

void sort_records(std::vector<MetricRecord> &records) {
  std::sort(records.begin(), records.end(), [](const MetricRecord &a, const MetricRecord &b) {
    return std::tie(a.case_id, a.method, a.metric) < std::tie(b.case_id, b.method, b.metric);
  });
}

std::string format_general(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ojson test_json(const TestOutcome &t) {
  ojson j;
  if (!t.result) {
    j["flag"] = t.flag ? std::string(to_string(*t.flag)) : "NotRun";
    return j;
  }
  const auto &r = *t.result;
  j["kind"] = std::string(to_string(r.kind));
  j["statistic"] = r.statistic;
  if (r.df) {
    j["df"] = *r.df;
  }
  j["n_effective"] = r.n_effective;
  j["p_two_sided"] = r.p_two_sided;
  return j;
}

std::string test_text(const TestOutcome &t, std::string_view fallback_name) {
  if (t.result) {
    return std::string(to_string(t.result->kind)) +
           ": p = " + format_general(t.result->p_two_sided, 3);
  }
  return std::string(fallback_name) + ": " +
         (t.flag ? std::string(to_string(*t.flag)) : std::string("not run"));
}

} // namespace

ojson to_json(const Report &r) {
  ojson root;
  root["schema_version"] = std::string(kSchemaVersion);

  ojson meta;
  meta["tool"] = std::string(kToolName);
  meta["version"] = std::string(kToolVersion);
  meta["command"] = r.command;
  if (r.with_timestamp) {
    meta["generated_at"] = utc_now();
  }
  ojson params = ojson::object();
  for (const auto &[k, v] : r.parameters) {
    params[k] = v;
  }
  meta["parameters"] = params;
  ojson conv;
  for (const auto &[k, v] : report_conventions()) {
    conv[k] = v;
  }
  meta["conventions"] = conv;
  root["metadata"] = meta;

  auto records = r.records;
  sort_records(records);
  ojson recs = ojson::array();
  for (const auto &rec : records) {
    ojson j;
    j["case_id"] = rec.case_id;
    j["method"] = rec.method;
    j["metric"] = rec.metric;
    j["value"] = rec.value;
    recs.push_back(j);
  }
  root["records"] = recs;

  ojson comps = ojson::array();
  for (const auto &row : r.comparisons) {
    ojson j;
    j["metric"] = row.metric;
    j["method_a"] = r.method_a;
    j["method_b"] = r.method_b;
    j["n_cases"] = row.n_cases;
    j["mean_a"] = row.mean_a;
    j["mean_b"] = row.mean_b;
    if (row.percent) {
      j["percent_diff"] = row.percent->percent;
      j["direction"] = std::string(to_string(row.percent->direction));
    } else {
      j["percent_diff"] = nullptr;
      j["direction"] = nullptr;
    }
    j["paired_t"] = test_json(row.t_test);
    j["wilcoxon"] = test_json(row.wilcoxon);
    j["line"] = comparison_line(row);
    j["summary"] = summary_sentence(row, r.method_a, r.method_b);
    comps.push_back(j);
  }
  root["comparisons"] = comps;

  if (!r.variability.empty()) {
    ojson var = ojson::array();
    for (const auto &v : r.variability) {
      ojson j;
      j["case_id"] = v.case_id;
      j["grouping"] = std::string(to_string(v.report.grouping));
      j["mean_pairwise_dice"] = v.report.mean_pairwise_dice;
      j["volume_cv_percent"] = v.report.volume_cv_percent;
      j["n_pairs"] = v.report.n_pairs;
      j["n_delineations"] = v.report.n_delineations;
      var.push_back(j);
    }
    root["variability"] = var;
  }

  root["warnings"] = r.warnings;
  return root;
}

std::string render_json(const Report &r) {
  return to_json(r).dump(2) + "\n";
}

std::string render_records_csv(const std::vector<MetricRecord> &records) {
  auto sorted = records;
  sort_records(sorted);
  std::string out = "case_id,method,metric,value\n";
  for (const auto &rec : sorted) {
    out += rec.case_id + "," + rec.method + "," + rec.metric + "," + format_general(rec.value, 6) +
           "\n";
  }
  return out;
}

std::vector<MetricRecord> parse_records(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    throw Error(ErrorKind::InvalidArgument, "records input is empty");
  }
  std::vector<MetricRecord> out;
  if (text[first] == '{') {
    ojson root;
    try {
      root = ojson::parse(text);
      for (const auto &j : root.at("records")) {
        out.push_back({j.at("case_id").get<std::string>(), j.at("method").get<std::string>(),
                       j.at("metric").get<std::string>(), j.at("value").get<double>()});
      }
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorKind::InvalidArgument, std::string("malformed JSON report: ") + e.what());
    }
    return out;
  }
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto f = split_csv_line(line);
    if (!header) {
      if (f != std::vector<std::string>{"case_id", "method", "metric", "value"}) {
        throw Error(ErrorKind::InvalidArgument, "records CSV header must be "
                                                "case_id,method,metric,value");
      }
      header = true;
      continue;
    }
    if (f.size() != 4) {
      throw Error(ErrorKind::InvalidArgument,
                  "records CSV line " + std::to_string(lineno) + " needs 4 fields");
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(f[3], &used);
      if (used != f[3].size()) {
        throw std::invalid_argument("trailing characters");
      }
      out.push_back({f[0], f[1], f[2], v});
    } catch (const std::logic_error &) {
      throw Error(ErrorKind::InvalidArgument,
                  "records CSV line " + std::to_string(lineno) + ": bad value \"" + f[3] + "\"");
    }
  }
  return out;
}

std::string summary_sentence(const ComparisonRow &row, std::string_view method_a,
                             std::string_view method_b) {
  const TestOutcome &quoted = row.wilcoxon.result ? row.wilcoxon : row.t_test;
  std::string test = "no test";
  if (quoted.result) {
    test = std::string(to_string(quoted.result->kind)) +
           ": p = " + format_general(quoted.result->p_two_sided, 3);
  } else if (row.wilcoxon.flag) {
    test = "wilcoxon: " + std::string(to_string(*row.wilcoxon.flag));
  }
  if (!row.percent) {
    return row.metric + " for " + std::string(method_a) + " has no percent difference (" + test +
           ") because the mean for " + std::string(method_b) + " is zero";
  }
  char pct[64];
  std::snprintf(pct, sizeof pct, "%.2f", std::abs(row.percent->percent));
  return row.metric + " for " + std::string(method_a) + " is " + pct + "% (" + test + ") " +
         std::string(to_string(row.percent->direction)) + " compared to " +
         std::string(method_b);
}

std::string comparison_line(const ComparisonRow &row) {
  std::string pct = "n/a";
  if (row.percent) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.6g%%", row.percent->percent);
    pct = buf;
  }
  return row.metric + ": n = " + std::to_string(row.n_cases) +
         ", mean_a = " + format_general(row.mean_a, 6) +
         ", mean_b = " + format_general(row.mean_b, 6) + ", " + pct + ", " +
         test_text(row.t_test, "paired_t") + ", " + test_text(row.wilcoxon, "wilcoxon");
}

} // namespace segeval
