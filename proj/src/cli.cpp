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
#include "segeval/cli.hpp"

#include "segeval/evaluate.hpp"
#include "segeval/manifest.hpp"
#include "segeval/phantom.hpp"
#include "segeval/report.hpp"
#include "segeval/volume_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace segeval::cli {

int exit_code_for(ErrorKind kind) noexcept {
  return is_io_error(kind) ? kExitIo : kExitValidation;
}

namespace fs = std::filesystem;

namespace {

struct SelectorFlags {
  std::optional<std::int64_t> label;
  std::optional<double> threshold;

  void add_to(CLI::App &cmd) {
    auto *l = cmd.add_option("--label", label, "foreground is voxels equal to this integer label");
    auto *t = cmd.add_option("--threshold", threshold, "foreground is voxels >= this value");
    l->excludes(t);
  }

  /// Default applies when neither flag was given; nullopt means required.
  LabelSelector resolve(std::optional<double> default_threshold) const {
    if (label) {
      return LabelSelector::exact(*label);
    }
    if (threshold) {
      return LabelSelector::threshold(*threshold);
    }
    if (default_threshold) {
      return LabelSelector::threshold(*default_threshold);
    }
    throw Error(ErrorKind::InvalidArgument, "exactly one of --label or --threshold is required");
  }
};

std::string describe(const LabelSelector &sel) {
  return sel.is_exact() ? "label == " + std::to_string(sel.label())
                        : "value >= " + format_general(sel.min(), 17);
}

struct PairArgs {
  std::string ref;
  std::string test;
  SelectorFlags selector;
  std::string out;
  std::string format = "json";
  std::string case_id = "pair";
  std::string method = "test";
  bool no_timestamp = false;
};

struct CohortArgs {
  std::string manifest;
  std::string out;
  std::string format = "json";
  SelectorFlags selector;
  unsigned jobs = 1;
  bool no_timestamp = false;
};

struct CompareArgs {
  std::string records;
  std::string method_a;
  std::string method_b;
  std::string out;
  std::string reference = "reference";
  bool no_timestamp = false;
};

struct PhantomArgs {
  std::vector<std::int64_t> dims;
  std::vector<double> spacing{1.0, 1.0, 1.0};
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;
  std::vector<double> center;
  std::vector<double> radii;
  std::string in;
  SelectorFlags selector;
  std::vector<std::int64_t> shift;
  double dilate = 0.0;
  double noise = 0.0;
  std::optional<double> noise_band;
  std::uint64_t seed = 0;
  std::string out;
};

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  }
  f << text;
  f.close();
  if (!f) {
    throw Error(ErrorKind::IoFailure, "write failed on " + path.string());
  }
}

std::string read_text(const fs::path &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Geometry geometry_from(const PhantomArgs &a) {
  Geometry g{{a.dims[0], a.dims[1], a.dims[2]}, {a.spacing[0], a.spacing[1], a.spacing[2]}};
  validate_geometry(g);
  return g;
}

int cmd_pair(const PairArgs &a, std::ostream &out) {
  const auto sel = a.selector.resolve(std::nullopt);
  const auto ref = extract_mask(read_nifti(a.ref), sel);
  const auto test = extract_mask(read_nifti(a.test), sel);
  const auto eval = evaluate_pair(ref, test);

  Report r;
  r.command = "pair";
  r.with_timestamp = !a.no_timestamp;
  r.parameters = {{"ref", a.ref}, {"test", a.test}, {"selector", describe(sel)}};
  r.records = to_records(a.case_id, a.method, eval);
  r.records.push_back({a.case_id, "reference", "volume_mm3", eval.ref_volume_mm3});
  r.warnings = evaluation_warnings(a.case_id, a.method, eval);

  const auto text = a.format == "csv" ? render_records_csv(r.records) : render_json(r);
  if (a.out.empty()) {
    out << text;
  } else {
    write_text(a.out, text);
  }
  return kExitOk;
}

struct CaseOutcome {
  std::vector<MetricRecord> records;
  std::vector<VariabilityEntry> variability;
  std::vector<std::string> warnings;
  bool succeeded = false;
  bool io_failure_only = true;
};

CaseOutcome evaluate_case(const std::string &case_id, const std::vector<ManifestRow> &rows,
                          const LabelSelector &sel) {
  CaseOutcome oc;
  const auto warn = [&](const std::string &msg, ErrorKind kind) {
    oc.warnings.push_back("case " + case_id + ": " + msg);
    if (!is_io_error(kind)) {
      oc.io_failure_only = false;
    }
  };

  std::vector<const ManifestRow *> refs;
  std::map<std::string, const ManifestRow *> methods;
  std::vector<const ManifestRow *> raters;
  for (const auto &row : rows) {
    switch (row.role.kind) {
    case Role::Kind::Reference: refs.push_back(&row); break;
    case Role::Kind::Method:
      if (!methods.emplace(row.role.name, &row).second) {
        warn("method " + row.role.name + " listed twice, keeping the first row",
             ErrorKind::InvalidManifest);
      }
      break;
    case Role::Kind::Rater: raters.push_back(&row); break;
    }
  }

  if (!methods.empty()) {
    if (refs.size() != 1) {
      warn(refs.empty() ? "no reference row, methods skipped"
                        : "more than one reference row, methods skipped",
           ErrorKind::InvalidManifest);
    } else {
      try {
        const auto ref = extract_mask(read_nifti(refs.front()->path), sel);
        for (const auto &[name, row] : methods) {
          try {
            const auto test = extract_mask(read_nifti(row->path), sel);
            const auto eval = evaluate_pair(ref, test);
            auto recs = to_records(case_id, name, eval);
            oc.records.insert(oc.records.end(), recs.begin(), recs.end());
            for (auto &w : evaluation_warnings(case_id, name, eval)) {
              oc.warnings.push_back(std::move(w));
            }
            oc.succeeded = true;
          } catch (const Error &e) {
            warn("method " + name + ": " + e.what(), e.kind());
          }
        }
      } catch (const Error &e) {
        warn(std::string("reference: ") + e.what(), e.kind());
      }
    }
  } else if (raters.empty()) {
    warn("no method or rater rows", ErrorKind::InvalidManifest);
  }

  if (!raters.empty()) {
    std::vector<Delineation> delineations;
    try {
      for (const auto *row : raters) {
        delineations.push_back(
            {row->role.name, row->role.session, extract_mask(read_nifti(row->path), sel)});
      }
      for (const auto grouping : {Grouping::IntraRater, Grouping::InterRater}) {
        try {
          oc.variability.push_back({case_id, rater_variability(delineations, grouping)});
          oc.succeeded = true;
        } catch (const Error &e) {
          if (e.kind() != ErrorKind::TooFewDelineations) {
            warn(std::string(to_string(grouping)) + ": " + e.what(), e.kind());
          }
        }
      }
    } catch (const Error &e) {
      warn(std::string("rater delineation: ") + e.what(), e.kind());
    }
  }
  return oc;
}

int cmd_cohort(const CohortArgs &a, std::ostream &out, std::ostream &err) {
  const auto manifest = read_manifest(a.manifest);
  const auto sel = a.selector.resolve(0.5);

  std::map<std::string, std::vector<ManifestRow>> cases;
  for (const auto &row : manifest.rows) {
    cases[row.case_id].push_back(row);
  }
  std::vector<std::string> ids;
  for (const auto &[id, rows] : cases) {
    ids.push_back(id);
  }

  std::vector<CaseOutcome> outcomes(ids.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (auto i = next++; i < ids.size(); i = next++) {
      outcomes[i] = evaluate_case(ids[i], cases.at(ids[i]), sel);
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto n = std::clamp<std::size_t>(a.jobs, 1, std::max<std::size_t>(1, ids.size()));
    for (std::size_t t = 1; t < n; ++t) {
      pool.emplace_back(worker);
    }
    worker();
  }

  Report r;
  r.command = "cohort";
  r.with_timestamp = !a.no_timestamp;
  r.parameters = {{"manifest", a.manifest}, {"selector", describe(sel)}};
  std::size_t ok = 0;
  bool only_io = true;
  for (auto &oc : outcomes) {
    r.records.insert(r.records.end(), oc.records.begin(), oc.records.end());
    r.variability.insert(r.variability.end(), oc.variability.begin(), oc.variability.end());
    r.warnings.insert(r.warnings.end(), oc.warnings.begin(), oc.warnings.end());
    ok += oc.succeeded ? 1 : 0;
    only_io = only_io && oc.io_failure_only;
  }

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) {
    throw Error(ErrorKind::IoFailure, "cannot create output directory " + a.out);
  }
  const fs::path json_path = fs::path(a.out) / "report.json";
  write_text(json_path, render_json(r));
  if (a.format == "csv") {
    write_text(fs::path(a.out) / "records.csv", render_records_csv(r.records));
  }

  for (const auto &w : r.warnings) {
    err << "warning: " << w << "\n";
  }
  out << "evaluated " << ok << " of " << ids.size() << " case(s), " << r.records.size()
      << " record(s), " << r.warnings.size() << " warning(s) -> " << json_path.string() << "\n";
  if (ok == 0) {
    err << "error: no case could be evaluated\n";
    return only_io ? kExitIo : kExitValidation;
  }
  return kExitOk;
}

int cmd_compare(const CompareArgs &a, std::ostream &out) {
  std::vector<MetricRecord> records;
  try {
    records = parse_records(read_text(a.records));
  } catch (const Error &e) {
    // A records file that does not parse is a parse error, not a bad flag.
    throw Error(ErrorKind::IoFailure, a.records + ": " + e.what());
  }
  for (const auto *m : {&a.method_a, &a.method_b}) {
    const bool present = std::any_of(records.begin(), records.end(),
                                     [&](const MetricRecord &r) { return r.method == *m; });
    if (!present) {
      throw Error(ErrorKind::InvalidArgument, "method " + *m + " has no records in " + a.records);
    }
  }
  const auto cmp = cohort_compare(records, a.method_a, a.method_b, a.reference);

  Report r;
  r.command = "compare";
  r.with_timestamp = !a.no_timestamp;
  r.parameters = {{"records", a.records}, {"method_a", a.method_a}, {"method_b", a.method_b}};
  r.records = records;
  r.method_a = a.method_a;
  r.method_b = a.method_b;
  r.comparisons = cmp.rows;
  r.warnings = cmp.warnings;

  for (const auto &row : cmp.rows) {
    out << comparison_line(row) << "\n";
    out << "  " << summary_sentence(row, a.method_a, a.method_b) << "\n";
  }
  if (!a.out.empty()) {
    write_text(a.out, render_json(r));
  }
  return kExitOk;
}

int cmd_phantom(const std::string &kind, const PhantomArgs &a, std::ostream &out) {
  Mask m = [&] {
    if (kind == "box") {
      return gen_box(geometry_from(a), {a.lo[0], a.lo[1], a.lo[2]}, {a.hi[0], a.hi[1], a.hi[2]});
    }
    if (kind == "ellipsoid") {
      return gen_ellipsoid(geometry_from(a), {a.center[0], a.center[1], a.center[2]},
                           {a.radii[0], a.radii[1], a.radii[2]});
    }
    Mask src = extract_mask(read_nifti(a.in), a.selector.resolve(0.5));
    if (!a.shift.empty()) {
      src = translate(src, {a.shift[0], a.shift[1], a.shift[2]});
    }
    if (a.dilate > 0.0) {
      src = dilate_ball(src, a.dilate);
    }
    if (a.noise > 0.0) {
      src = a.noise_band ? flip_noise(src, a.noise, a.seed, boundary_band(src, *a.noise_band))
                         : flip_noise(src, a.noise, a.seed);
    }
    return src;
  }();
  write_nifti(mask_to_volume(m), a.out);
  out << "wrote " << a.out << " (" << m.popcount() << " voxels, " << format_general(volume_mm3(m), 6)
      << " mm3)\n";
  return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Segmentation evaluation: overlap and surface-distance metrics against a manual "
               "reference, cohort statistics and synthetic phantoms."};
  app.name("segeval");
  app.require_subcommand(1);

  PairArgs pair;
  auto *pair_cmd = app.add_subcommand("pair", "evaluate one test mask against a reference mask");
  pair_cmd->add_option("--ref", pair.ref, "reference (manual) NIfTI file")->required();
  pair_cmd->add_option("--test", pair.test, "test (automated) NIfTI file")->required();
  pair.selector.add_to(*pair_cmd);
  pair_cmd->add_option("--out", pair.out, "output file (default: standard output)");
  pair_cmd->add_option("--format", pair.format, "json (default) or csv records")->check(CLI::IsMember({"json", "csv"}));
  pair_cmd->add_option("--case-id", pair.case_id, "case id used in the records");
  pair_cmd->add_option("--method", pair.method, "method name used in the records");
  pair_cmd->add_flag("--no-timestamp", pair.no_timestamp, "omit generated_at from metadata");

  CohortArgs cohort;
  auto *cohort_cmd = app.add_subcommand("cohort", "evaluate every case listed in a manifest");
  cohort_cmd->add_option("--manifest", cohort.manifest, "CSV with case_id,role,path")->required();
  cohort_cmd->add_option("--out", cohort.out, "output directory")->required();
  cohort_cmd->add_option("--format", cohort.format, "csv also writes records.csv")->check(CLI::IsMember({"json", "csv"}));
  cohort.selector.add_to(*cohort_cmd);
  cohort_cmd->add_option("--jobs", cohort.jobs, "cases evaluated concurrently")
      ->check(CLI::PositiveNumber);
  cohort_cmd->add_flag("--no-timestamp", cohort.no_timestamp, "omit generated_at from metadata");

  CompareArgs compare;
  auto *compare_cmd = app.add_subcommand("compare", "compare two methods over a cohort");
  compare_cmd->add_option("--records", compare.records, "report.json or records.csv")
      ->required();
  compare_cmd->add_option("--method-a", compare.method_a, "method under evaluation")->required();
  compare_cmd->add_option("--method-b", compare.method_b, "baseline method")->required();
  compare_cmd->add_option("--out", compare.out, "JSON report path");
  compare_cmd->add_option("--reference-method", compare.reference,
                          "method name whose records are ignored");
  compare_cmd->add_flag("--no-timestamp", compare.no_timestamp, "omit generated_at from metadata");

  PhantomArgs phantom;
  auto *phantom_cmd = app.add_subcommand("phantom", "write synthetic masks");
  phantom_cmd->require_subcommand(1);
  auto *box_cmd = phantom_cmd->add_subcommand("box", "closed index box");
  auto *ell_cmd = phantom_cmd->add_subcommand("ellipsoid", "axis-aligned ellipsoid");
  for (auto *c : {box_cmd, ell_cmd}) {
    c->add_option("--dims", phantom.dims, "nx ny nz")->expected(3)->required();
    c->add_option("--spacing", phantom.spacing, "sx sy sz in mm")->expected(3);
  }
  box_cmd->add_option("--lo", phantom.lo, "inclusive lower corner")->expected(3)->required();
  box_cmd->add_option("--hi", phantom.hi, "inclusive upper corner")->expected(3)->required();
  ell_cmd->add_option("--center", phantom.center, "centre in voxel indices")
      ->expected(3)
      ->required();
  ell_cmd->add_option("--radii", phantom.radii, "radii in mm")->expected(3)->required();
  auto *derive_cmd = phantom_cmd->add_subcommand("derive", "translate, dilate and/or flip a mask");
  derive_cmd->add_option("--in", phantom.in, "input NIfTI mask")->required();
  phantom.selector.add_to(*derive_cmd);
  derive_cmd->add_option("--translate", phantom.shift, "dx dy dz in voxels")->expected(3);
  derive_cmd->add_option("--dilate", phantom.dilate, "ball radius in voxels");
  derive_cmd->add_option("--noise", phantom.noise, "voxel flip probability");
  derive_cmd->add_option("--noise-band", phantom.noise_band,
                         "restrict noise to voxels within this many voxels of the boundary");
  derive_cmd->add_option("--seed", phantom.seed, "noise seed");
  for (auto *c : {box_cmd, ell_cmd, derive_cmd}) {
    c->add_option("--out", phantom.out, "output NIfTI path")->required();
  }

  std::vector<const char *> argv{"segeval"};
  for (const auto &a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (pair_cmd->parsed()) {
      return cmd_pair(pair, out);
    }
    if (cohort_cmd->parsed()) {
      return cmd_cohort(cohort, out, err);
    }
    if (compare_cmd->parsed()) {
      return cmd_compare(compare, out);
    }
    for (auto *c : {box_cmd, ell_cmd, derive_cmd}) {
      if (c->parsed()) {
        return cmd_phantom(c->get_name(), phantom, out);
      }
    }
  } catch (const Error &e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}

} // namespace segeval::cli
