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
#ifndef SEGEVAL_REPORT_HPP
#define SEGEVAL_REPORT_HPP

#include "segeval/stats.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace segeval {

inline constexpr std::string_view kSchemaVersion = "1.0";
inline constexpr std::string_view kToolName = "segeval";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct VariabilityEntry {
  std::string case_id;
  VariabilityReport report;
};

/// Everything a command emits. Serialised with a fixed key order.
struct Report {
  std::string command;
  bool with_timestamp = true;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<MetricRecord> records;
  std::string method_a;
  std::string method_b;
  std::vector<ComparisonRow> comparisons;
  std::vector<VariabilityEntry> variability; // serialised only when non-empty
  std::vector<std::string> warnings;
};

/// (key, text) pairs describing every convention the numbers depend on.
const std::vector<std::pair<std::string, std::string>> &report_conventions();

/// Sorts by (case_id, method, metric).
void sort_records(std::vector<MetricRecord> &records);

nlohmann::ordered_json to_json(const Report &r);

/// Pretty-printed JSON followed by a newline. Doubles keep full precision.
std::string render_json(const Report &r);

/// Flat `case_id,method,metric,value` table, values to 6 significant digits.
std::string render_records_csv(const std::vector<MetricRecord> &records);

/// Reads the records of a JSON report or of a records CSV (detected from
/// the first non-blank character). Throws InvalidArgument on malformed input.
std::vector<MetricRecord> parse_records(std::string_view text);

/// printf-style "%.<digits>g".
std::string format_general(double value, int digits);

/// "<metric> for <A> is <|pct|>% (<test>: p = <p>) <higher|lower> compared to <B>".
/// The Wilcoxon result is quoted when available, the t-test otherwise.
std::string summary_sentence(const ComparisonRow &row, std::string_view method_a,
                             std::string_view method_b);

/// One-line tabular rendering: means, signed percent and both tests.
std::string comparison_line(const ComparisonRow &row);

} // namespace segeval

#endif
