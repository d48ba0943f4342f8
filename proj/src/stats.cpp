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
#include "segeval/stats.hpp"

#include "segeval/overlap.hpp"
#include "segeval/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace segeval {

std::string_view to_string(TestKind kind) noexcept {
  switch (kind) {
  case TestKind::PairedT: return "paired_t";
  case TestKind::WilcoxonExact: return "wilcoxon_exact";
  case TestKind::WilcoxonNormal: return "wilcoxon_normal";
  }
  return "unknown";
}

std::string_view to_string(Direction d) noexcept {
  return d == Direction::Higher ? "higher" : "lower";
}

std::string_view to_string(Grouping g) noexcept {
  return g == Grouping::IntraRater ? "intra_rater" : "inter_rater";
}

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double step = d * c;
    h *= step;
    if (std::abs(step - 1.0) < kEps) {
      break;
    }
  }
  return h;
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::LengthMismatch, "paired samples differ in length");
  }
  if (x.size() < 2) {
    throw Error(ErrorKind::TooFewCases, "paired tests need at least two cases");
  }
}

} // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || !(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "incomplete_beta needs x in [0,1] and a, b > 0");
  }
  if (x == 0.0 || x == 1.0) {
    return x;
  }
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(x, 0.5 * df, 0.5), 0.0, 1.0);
}

TestResult paired_t(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto n = x.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = x[i] - y[i];
  }
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / double(n);
  double ss = 0.0;
  double max_abs = 0.0;
  for (double v : d) {
    ss += (v - mean) * (v - mean);
    max_abs = std::max(max_abs, std::abs(v));
  }
  const double sd = std::sqrt(ss / double(n - 1));
  // Differences equal up to rounding (e.g. 0.80-0.70 vs 0.82-0.72) count as
  // zero spread.
  if (sd <= 1e-12 * max_abs || sd == 0.0) {
    throw Error(ErrorKind::DegenerateVariance, "paired differences have zero variance");
  }
  TestResult r;
  r.kind = TestKind::PairedT;
  r.statistic = mean / (sd / std::sqrt(double(n)));
  r.df = double(n - 1);
  r.n_effective = n;
  r.p_two_sided = student_t_two_sided_p(r.statistic, *r.df);
  return r;
}

std::vector<double> midranks_abs(std::span<const double> values) {
  const auto n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(values[a]) < std::abs(values[b]);
  });
  std::vector<double> ranks(n);
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo + 1;
    while (hi < n && std::abs(values[order[hi]]) == std::abs(values[order[lo]])) {
      ++hi;
    }
    // 1-based positions lo+1 .. hi share their average.
    const double mid = 0.5 * double(lo + 1 + hi);
    for (auto t = lo; t < hi; ++t) {
      ranks[order[t]] = mid;
    }
    lo = hi;
  }
  return ranks;
}

double wilcoxon_exact_p(std::span<const std::int64_t> doubled_ranks,
                        std::int64_t doubled_w_plus) {
  const auto total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), std::int64_t{0});
  // count[s]: number of sign assignments whose doubled W+ equals s.
  std::vector<std::uint64_t> count(static_cast<std::size_t>(total) + 1, 0);
  count[0] = 1;
  std::int64_t reach = 0;
  for (auto r : doubled_ranks) {
    for (auto s = reach; s >= 0; --s) {
      if (count[s] != 0) {
        count[s + r] += count[s];
      }
    }
    reach += r;
  }
  // Compare |2W - T| on the doubled scale so everything stays integral.
  const auto observed = std::abs(2 * doubled_w_plus - total);
  std::uint64_t extreme = 0;
  for (std::int64_t s = 0; s <= total; ++s) {
    if (std::abs(2 * s - total) >= observed) {
      extreme += count[s];
    }
  }
  return std::ldexp(static_cast<double>(extreme), -static_cast<int>(doubled_ranks.size()));
}

TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i] - y[i];
    if (v != 0.0) {
      d.push_back(v);
    }
  }
  if (d.empty()) {
    throw Error(ErrorKind::AllZeroDifferences, "every paired difference is zero");
  }
  const auto n = d.size();
  const auto ranks = midranks_abs(d);

  TestResult r;
  r.n_effective = n;
  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0.0) {
      w_plus += ranks[i];
    }
  }
  r.statistic = w_plus;

  if (n <= kWilcoxonExactMaxN) {
    std::vector<std::int64_t> doubled(n);
    std::int64_t w2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = std::llround(2.0 * ranks[i]);
      if (d[i] > 0.0) {
        w2 += doubled[i];
      }
    }
    r.kind = TestKind::WilcoxonExact;
    r.p_two_sided = std::min(1.0, wilcoxon_exact_p(doubled, w2));
    return r;
  }

  // Tie correction: sum over tie groups of (t^3 - t) / 48.
  std::map<double, std::size_t> groups;
  for (double rk : ranks) {
    ++groups[rk];
  }
  double tie_term = 0.0;
  for (const auto &[rank, t] : groups) {
    const auto tt = double(t);
    tie_term += tt * tt * tt - tt;
  }
  const auto nn = double(n);
  const double expected = nn * (nn + 1.0) / 4.0;
  const double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  const double z = std::max(0.0, std::abs(w_plus - expected) - 0.5) / std::sqrt(variance);
  r.kind = TestKind::WilcoxonNormal;
  r.p_two_sided = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
  return r;
}

PercentDifference percent_difference(double mean_a, double mean_b) {
  if (mean_b == 0.0) {
    throw Error(ErrorKind::ZeroBaseline, "percent difference against a zero baseline");
  }
  PercentDifference out;
  out.percent = 100.0 * (mean_a - mean_b) / mean_b;
  if (out.percent == 0.0) {
    out.percent = 0.0; // normalise -0.0
  }
  out.direction = out.percent < 0.0 ? Direction::Lower : Direction::Higher;
  return out;
}

namespace {

template <typename Fn> TestOutcome run_test(Fn &&fn) {
  TestOutcome out;
  try {
    out.result = fn();
  } catch (const Error &e) {
    out.flag = e.kind();
  }
  return out;
}

} // namespace

CohortComparison cohort_compare(std::span<const MetricRecord> records, std::string_view method_a,
                                std::string_view method_b, std::string_view reference_method) {
  if (method_a == method_b) {
    throw Error(ErrorKind::InvalidArgument, "cannot compare a method with itself");
  }
  // metric -> case_id -> value, per method; std::map keeps everything sorted.
  using Table = std::map<std::string, std::map<std::string, double>>;
  Table a;
  Table b;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto &rec : records) {
    if (rec.method == reference_method) {
      continue;
    }
    if (!seen.emplace(rec.case_id, rec.method, rec.metric).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate record for case " + rec.case_id +
                                                  ", method " + rec.method + ", metric " +
                                                  rec.metric);
    }
    if (rec.method == method_a) {
      a[rec.metric][rec.case_id] = rec.value;
    } else if (rec.method == method_b) {
      b[rec.metric][rec.case_id] = rec.value;
    }
  }

  CohortComparison out;
  for (const auto &[metric, cases_a] : a) {
    const auto it = b.find(metric);
    if (it == b.end()) {
      continue;
    }
    const auto &cases_b = it->second;
    std::vector<double> x;
    std::vector<double> y;
    for (const auto &[case_id, value] : cases_a) {
      const auto match = cases_b.find(case_id);
      if (match == cases_b.end()) {
        ++out.unpaired_dropped;
        continue;
      }
      x.push_back(value);
      y.push_back(match->second);
    }
    for (const auto &[case_id, value] : cases_b) {
      if (!cases_a.contains(case_id)) {
        ++out.unpaired_dropped;
      }
    }
    if (x.empty()) {
      out.warnings.push_back("metric " + metric + ": no case has both methods");
      continue;
    }
    ComparisonRow row;
    row.metric = metric;
    row.n_cases = x.size();
    row.mean_a = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    row.mean_b = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
    try {
      row.percent = percent_difference(row.mean_a, row.mean_b);
    } catch (const Error &) {
      out.warnings.push_back("metric " + metric + ": baseline mean is zero, percent undefined");
    }
    row.t_test = run_test([&] { return paired_t(x, y); });
    row.wilcoxon = run_test([&] { return wilcoxon_signed_rank(x, y); });
    out.rows.push_back(std::move(row));
  }
  if (out.rows.empty()) {
    throw Error(ErrorKind::NoPairedCases,
                "no case carries records for both " + std::string(method_a) + " and " +
                    std::string(method_b));
  }
  if (out.unpaired_dropped > 0) {
    out.warnings.push_back(std::to_string(out.unpaired_dropped) +
                           " unpaired record(s) dropped");
  }
  return out;
}

VariabilityReport rater_variability(std::span<const Delineation> delineations, Grouping grouping) {
  std::vector<const Delineation *> sorted;
  for (const auto &d : delineations) {
    sorted.push_back(&d);
  }
  std::sort(sorted.begin(), sorted.end(), [](const Delineation *l, const Delineation *r) {
    return std::tie(l->rater_id, l->session_id) < std::tie(r->rater_id, r->session_id);
  });

  const auto qualifies = [grouping](const Delineation &l, const Delineation &r) {
    if (grouping == Grouping::IntraRater) {
      return l.rater_id == r.rater_id && l.session_id != r.session_id;
    }
    return l.rater_id != r.rater_id;
  };

  std::vector<bool> used(sorted.size(), false);
  double dice_sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (!qualifies(*sorted[i], *sorted[j])) {
        continue;
      }
      dice_sum += overlap_metrics(confusion_counts(sorted[i]->mask, sorted[j]->mask)).dice;
      ++pairs;
      used[i] = used[j] = true;
    }
  }
  if (pairs == 0) {
    throw Error(ErrorKind::TooFewDelineations,
                "need two delineations forming an " + std::string(to_string(grouping)) + " pair");
  }

  std::vector<double> volumes;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (used[i]) {
      volumes.push_back(volume_mm3(sorted[i]->mask));
    }
  }
  const double mean = std::accumulate(volumes.begin(), volumes.end(), 0.0) / double(volumes.size());
  double ss = 0.0;
  for (double v : volumes) {
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / double(volumes.size() - 1));

  VariabilityReport out;
  out.grouping = grouping;
  out.mean_pairwise_dice = dice_sum / double(pairs);
  out.volume_cv_percent = mean > 0.0 ? 100.0 * sd / mean : 0.0;
  out.n_pairs = pairs;
  out.n_delineations = volumes.size();
  return out;
}

} // namespace segeval
