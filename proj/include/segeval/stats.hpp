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
#ifndef SEGEVAL_STATS_HPP
#define SEGEVAL_STATS_HPP

#include "segeval/error.hpp"
#include "segeval/volume.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segeval {

enum class TestKind { PairedT, WilcoxonExact, WilcoxonNormal };
std::string_view to_string(TestKind kind) noexcept;

struct TestResult {
  TestKind kind = TestKind::PairedT;
  double statistic = 0.0; // t for the t-test, W+ for Wilcoxon
  std::optional<double> df;
  std::size_t n_effective = 0;
  double p_two_sided = 1.0;
};

/// Regularized incomplete beta I_x(a, b), Lentz continued fraction with the
/// usual x > (a+1)/(a+b+2) reflection. Absolute accuracy about 1e-12.
double incomplete_beta(double x, double a, double b);

/// Two-sided p of Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Paired t-test on x - y. Throws LengthMismatch, TooFewCases (n < 2) or
/// DegenerateVariance when the differences have no spread beyond rounding.
TestResult paired_t(std::span<const double> x, std::span<const double> y);

/// Largest n_effective for which the exact null distribution is used.
inline constexpr std::size_t kWilcoxonExactMaxN = 20;

/// Wilcoxon signed-rank test on x - y. Zero differences are dropped, ties
/// get midranks. Exact enumeration over the observed midranks up to
/// kWilcoxonExactMaxN, otherwise normal approximation with tie-corrected
/// variance and 0.5 continuity correction.
/// Throws LengthMismatch, TooFewCases or AllZeroDifferences.
TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

/// Exact two-sided p for a given set of doubled midranks (each 2 * rank, so
/// integral) and the doubled observed W+.
double wilcoxon_exact_p(std::span<const std::int64_t> doubled_ranks, std::int64_t doubled_w_plus);

/// 1-based midranks of |values|, ties averaged.
std::vector<double> midranks_abs(std::span<const double> values);

enum class Direction { Higher, Lower };
std::string_view to_string(Direction d) noexcept;

struct PercentDifference {
  double percent = 0.0;
  Direction direction = Direction::Higher;
};

/// 100 * (mean_a - mean_b) / mean_b; zero counts as Higher. Throws ZeroBaseline.
PercentDifference percent_difference(double mean_a, double mean_b);

/// One metric value for one (case, method).
struct MetricRecord {
  std::string case_id;
  std::string method;
  std::string metric;
  double value = 0.0;
};

/// Either a test result or the reason the test could not be run.
struct TestOutcome {
  std::optional<TestResult> result;
  std::optional<ErrorKind> flag;
};

struct ComparisonRow {
  std::string metric;
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::optional<PercentDifference> percent; // empty when mean_b == 0
  TestOutcome t_test;
  TestOutcome wilcoxon;
  std::size_t n_cases = 0;
};

struct CohortComparison {
  std::vector<ComparisonRow> rows; // sorted by metric
  std::size_t unpaired_dropped = 0;
  std::vector<std::string> warnings;
};

/// Pairs cases by case_id per metric and runs both tests. Records of
/// `reference_method` are ignored. Throws NoPairedCases when no metric has
/// a case shared by both methods, InvalidArgument on duplicate records.
CohortComparison cohort_compare(std::span<const MetricRecord> records, std::string_view method_a,
                                std::string_view method_b,
                                std::string_view reference_method = "reference");

enum class Grouping { IntraRater, InterRater };
std::string_view to_string(Grouping g) noexcept;

struct Delineation {
  std::string rater_id;
  std::string session_id;
  Mask mask;
};

struct VariabilityReport {
  Grouping grouping = Grouping::IntraRater;
  double mean_pairwise_dice = 0.0;
  double volume_cv_percent = 0.0;
  std::size_t n_pairs = 0;
  std::size_t n_delineations = 0;
};

/// Intra: same rater, different sessions. Inter: different raters. The
/// volume CV uses every delineation that takes part in a qualifying pair.
/// Throws TooFewDelineations when no pair qualifies.
VariabilityReport rater_variability(std::span<const Delineation> delineations, Grouping grouping);

} // namespace segeval

#endif
