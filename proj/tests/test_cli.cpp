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
#include "segeval/manifest.hpp"
#include "segeval/phantom.hpp"
#include "segeval/report.hpp"
#include "segeval/volume_io.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace segeval {
namespace {

using nlohmann::json;
using oracle::TempDir;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string> &args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double record_value(const json &report, const std::string &method, const std::string &metric) {
  for (const auto &r : report.at("records")) {
    if (r.at("method") == method && r.at("metric") == metric) return r.at("value").get<double>();
  }
  ADD_FAILURE() << "no record " << method << "/" << metric;
  return std::nan("");
}

void write_mask(const Mask &m, const std::filesystem::path &p) {
  write_nifti(mask_to_volume(m), p);
}

TEST(CliPhantom, BoxReadBack) {
  TempDir dir("cli");
  const auto path = (dir / "box.nii").string();
  const auto r = run({"phantom", "box", "--dims", "5", "5", "5", "--lo", "1", "1", "1", "--hi",
                      "3", "3", "3", "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(extract_mask(read_nifti(path), LabelSelector::exact(1)).popcount(), 27u);
}

TEST(CliPhantom, InvalidGeometryIsValidationError) {
  TempDir dir("cli");
  const auto path = (dir / "box.nii").string();
  EXPECT_EQ(run({"phantom", "box", "--dims", "5", "5", "5", "--lo", "1", "1", "1", "--hi", "5",
                 "5", "5", "--out", path})
                .code,
            2);
  EXPECT_EQ(run({"phantom", "ellipsoid", "--dims", "5", "5", "5", "--center", "2", "2", "2",
                 "--radii", "0", "1", "1", "--out", path})
                .code,
            2);
  EXPECT_EQ(run({"phantom", "box", "--dims", "0", "5", "5", "--lo", "0", "0", "0", "--hi", "0",
                 "0", "0", "--out", path})
                .code,
            2);
}

TEST(CliPhantom, DeriveNoiseZeroIsBitIdentical) {
  TempDir dir("cli");
  const auto in = (dir / "sphere.nii").string();
  const auto out = (dir / "derived.nii").string();
  ASSERT_EQ(run({"phantom", "ellipsoid", "--dims", "20", "20", "20", "--center", "10", "10", "10",
                 "--radii", "6", "6", "6", "--out", in})
                .code,
            0);
  ASSERT_EQ(run({"phantom", "derive", "--in", in, "--noise", "0", "--seed", "5", "--out", out})
                .code,
            0);
  EXPECT_EQ(slurp(in), slurp(out));
}

TEST(CliPhantom, DeriveNoiseBandFlipsOnlyNearBoundary) {
  TempDir dir("cli");
  const auto in = (dir / "box.nii").string();
  const auto out = (dir / "noisy.nii").string();
  write_mask(gen_box({{5, 5, 5}, {}}, {1, 1, 1}, {3, 3, 3}), in);
  ASSERT_EQ(run({"phantom", "derive", "--in", in, "--noise", "1", "--noise-band", "0", "--out",
                 out})
                .code,
            0);
  const auto m = extract_mask(read_nifti(out), LabelSelector::exact(1));
  EXPECT_EQ(m.popcount(), 1u);
  EXPECT_TRUE(m.at({2, 2, 2}));
}

TEST(CliPhantom, DeriveDilateGivesExactHausdorff) {
  TempDir dir("cli");
  const auto in = (dir / "sphere.nii").string();
  const auto out = (dir / "dilated.nii").string();
  ASSERT_EQ(run({"phantom", "ellipsoid", "--dims", "32", "32", "32", "--center", "16", "16", "16",
                 "--radii", "6", "6", "6", "--out", in})
                .code,
            0);
  ASSERT_EQ(run({"phantom", "derive", "--in", in, "--dilate", "2", "--out", out}).code, 0);
  const auto r = run({"pair", "--ref", in, "--test", out, "--label", "1", "--no-timestamp"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(record_value(json::parse(r.out), "test", "hausdorff"), 2.0);
}

class CliPairTest : public ::testing::Test {
protected:
  TempDir dir{"pair"};
  std::string box = (dir / "box.nii").string();
  std::string shifted = (dir / "shifted.nii.gz").string();

  void SetUp() override {
    const auto m = gen_box({{5, 5, 5}, {}}, {1, 1, 1}, {3, 3, 3});
    write_mask(m, box);
    write_mask(translate(m, {1, 0, 0}), shifted);
  }
};

TEST_F(CliPairTest, IdenticalFiles) {
  const auto r = run({"pair", "--ref", box, "--test", box, "--label", "1", "--no-timestamp"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(record_value(j, "test", "dice"), 1.0);
  EXPECT_EQ(record_value(j, "test", "hausdorff"), 0.0);
  EXPECT_EQ(record_value(j, "reference", "volume_mm3"), 27.0);
  EXPECT_EQ(j.at("records").size(), 11u);
}

TEST_F(CliPairTest, ShiftedBoxDice) {
  const auto r = run({"pair", "--ref", box, "--test", shifted, "--threshold", "0.5",
                      "--no-timestamp"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(record_value(json::parse(r.out), "test", "dice"), 0.666667, 1e-6);

  const auto csv = run({"pair", "--ref", box, "--test", shifted, "--label", "1", "--format",
                        "csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_NE(csv.out.find("pair,test,dice,0.666667\n"), std::string::npos) << csv.out;
}

TEST_F(CliPairTest, WritesToOutFile) {
  const auto path = (dir / "pair.json").string();
  const auto r = run({"pair", "--ref", box, "--test", shifted, "--label", "1", "--out", path});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(slurp(path)).at("schema_version"), "1.0");
}

TEST_F(CliPairTest, GridMismatchNamesBothDims) {
  const auto big = (dir / "big.nii").string();
  const auto small = (dir / "small.nii").string();
  write_mask(gen_box({{64, 64, 64}, {}}, {1, 1, 1}, {9, 9, 9}), big);
  write_mask(gen_box({{32, 32, 32}, {}}, {1, 1, 1}, {9, 9, 9}), small);
  const auto r = run({"pair", "--ref", big, "--test", small, "--label", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("64x64x64"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("32x32x32"), std::string::npos) << r.err;
}

TEST_F(CliPairTest, SelectorFlagsAreValidated) {
  EXPECT_EQ(run({"pair", "--ref", box, "--test", box}).code, 2);
  EXPECT_EQ(run({"pair", "--ref", box, "--test", box, "--label", "1", "--threshold", "1"}).code,
            2);
  EXPECT_EQ(run({"pair", "--ref", box, "--test", box, "--label", "1", "--format", "xml"}).code, 2);
}

TEST_F(CliPairTest, FileErrorsExitThree) {
  EXPECT_EQ(run({"pair", "--ref", box, "--test", (dir / "missing.nii").string(), "--label", "1"})
                .code,
            3);
  const auto junk = (dir / "junk.nii").string();
  std::ofstream(junk) << std::string(400, 'x');
  EXPECT_EQ(run({"pair", "--ref", box, "--test", junk, "--label", "1"}).code, 3);
}

TEST_F(CliPairTest, FloatVolumeWithLabelIsValidationError) {
  const auto f = (dir / "float.nii").string();
  write_nifti(Volume({{5, 5, 5}, {}}, std::vector<float>(125, 1.0f)), f);
  EXPECT_EQ(run({"pair", "--ref", f, "--test", f, "--label", "1"}).code, 2);
}

TEST_F(CliPairTest, BothEmptyIsValidationError) {
  const auto empty = (dir / "empty.nii").string();
  write_mask(Mask(Geometry{{5, 5, 5}, {}}), empty);
  EXPECT_EQ(run({"pair", "--ref", empty, "--test", empty, "--label", "1"}).code, 2);
}

TEST(CliMisc, UnknownCommandAndHelp) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("cohort"), std::string::npos);
}

/// Three cases, two methods, written next to a manifest.
class CliCohortTest : public ::testing::Test {
protected:
  TempDir dir{"cohort"};

  std::filesystem::path manifest(const std::string &body) {
    const auto p = dir / "manifest.csv";
    std::ofstream(p) << body;
    return p;
  }

  std::string standard_manifest() {
    std::string body = "case_id,role,path\n";
    const Geometry g{{24, 24, 24}, {1, 1, 1.5}};
    for (int c = 0; c < 3; ++c) {
      const auto id = "c" + std::to_string(c);
      const auto ref = gen_ellipsoid(g, {12, 12, 12}, {6.0 + c, 5.0, 7.0});
      write_mask(ref, dir / (id + "_ref.nii"));
      write_mask(flip_noise(ref, 0.002, 10 + c), dir / (id + "_a.nii"));
      write_mask(dilate_ball(translate(ref, {1, 0, 0}), 1), dir / (id + "_b.nii"));
      body += id + ",reference," + id + "_ref.nii\n";
      body += id + ",method:A," + id + "_a.nii\n";
      body += id + ",method:B," + id + "_b.nii\n";
    }
    return body;
  }
};

TEST_F(CliCohortTest, RecordCountAndCompare) {
  const auto m = manifest(standard_manifest());
  const auto out = (dir / "out").string();
  const auto r = run({"cohort", "--manifest", m.string(), "--out", out, "--no-timestamp",
                      "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::ordered_json::parse(slurp(dir / "out" / "report.json"));
  EXPECT_EQ(report.at("records").size(), 3u * 2u * 10u);
  EXPECT_TRUE(report.at("warnings").empty());
  std::vector<std::string> keys;
  for (const auto &[k, v] : report.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"schema_version", "metadata", "records",
                                            "comparisons", "warnings"}));
  EXPECT_FALSE(report.at("metadata").contains("generated_at"));
  for (const auto &[k, v] : report_conventions()) {
    EXPECT_EQ(report.at("metadata").at("conventions").at(k), v);
  }

  const auto csv = slurp(dir / "out" / "records.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 61);

  for (const auto &records : {(dir / "out" / "report.json").string(),
                              (dir / "out" / "records.csv").string()}) {
    const auto cmp = run({"compare", "--records", records, "--method-a", "A", "--method-b", "B",
                          "--out", (dir / "cmp.json").string(), "--no-timestamp"});
    ASSERT_EQ(cmp.code, 0) << cmp.err;
    EXPECT_NE(cmp.out.find("dice for A is"), std::string::npos);
    EXPECT_NE(cmp.out.find("higher compared to B"), std::string::npos) << cmp.out;
    EXPECT_NE(cmp.out.find("hausdorff for A is"), std::string::npos);
    const auto cj = json::parse(slurp(dir / "cmp.json"));
    EXPECT_EQ(cj.at("comparisons").size(), 10u);
  }
}

TEST_F(CliCohortTest, DeterministicAcrossRunsAndJobs) {
  const auto m = manifest(standard_manifest()).string();
  ASSERT_EQ(run({"cohort", "--manifest", m, "--out", (dir / "o1").string(), "--no-timestamp"})
                .code,
            0);
  ASSERT_EQ(run({"cohort", "--manifest", m, "--out", (dir / "o2").string(), "--no-timestamp",
                 "--jobs", "3"})
                .code,
            0);
  EXPECT_EQ(slurp(dir / "o1" / "report.json"), slurp(dir / "o2" / "report.json"));
}

TEST_F(CliCohortTest, MissingReferenceBecomesWarning) {
  auto body = standard_manifest();
  body.erase(body.find("c1,reference,c1_ref.nii\n"), std::string("c1,reference,c1_ref.nii\n").size());
  const auto m = manifest(body);
  const auto r = run({"cohort", "--manifest", m.string(), "--out", (dir / "o").string(),
                      "--no-timestamp"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(slurp(dir / "o" / "report.json"));
  EXPECT_EQ(report.at("records").size(), 2u * 2u * 10u);
  ASSERT_EQ(report.at("warnings").size(), 1u);
  EXPECT_NE(report.at("warnings")[0].get<std::string>().find("c1"), std::string::npos);
}

TEST_F(CliCohortTest, UnreadableCaseIsWarningNotAbort) {
  auto body = standard_manifest();
  body += "c9,reference,nope.nii\nc9,method:A,nope.nii\n";
  const auto r = run({"cohort", "--manifest", manifest(body).string(), "--out",
                      (dir / "o").string(), "--no-timestamp"});
  ASSERT_EQ(r.code, 0);
  const auto report = json::parse(slurp(dir / "o" / "report.json"));
  EXPECT_EQ(report.at("records").size(), 60u);
  EXPECT_EQ(report.at("warnings").size(), 1u);
}

TEST_F(CliCohortTest, EmptyOrInvalidManifest) {
  const auto out = (dir / "o").string();
  EXPECT_EQ(run({"cohort", "--manifest", manifest("").string(), "--out", out}).code, 2);
  EXPECT_EQ(run({"cohort", "--manifest", manifest("case_id,role,path\n").string(), "--out", out})
                .code,
            2);
  EXPECT_EQ(run({"cohort", "--manifest", manifest("id,kind,file\nc,reference,x.nii\n").string(),
                 "--out", out})
                .code,
            2);
  EXPECT_EQ(run({"cohort", "--manifest", manifest("case_id,role,path\nc,judge,x.nii\n").string(),
                 "--out", out})
                .code,
            2);
  EXPECT_EQ(run({"cohort", "--manifest", (dir / "absent.csv").string(), "--out", out}).code, 3);
}

TEST_F(CliCohortTest, AllCasesFailing) {
  const auto m = manifest("case_id,role,path\nc,reference,a.nii\nc,method:A,b.nii\n");
  EXPECT_EQ(run({"cohort", "--manifest", m.string(), "--out", (dir / "o").string()}).code, 3);
}

TEST_F(CliCohortTest, RaterVariability) {
  const Geometry g{{16, 16, 16}, {}};
  const auto a = gen_box(g, {3, 3, 3}, {10, 10, 10});
  write_mask(a, dir / "r1s1.nii");
  write_mask(a, dir / "r1s2.nii");
  write_mask(translate(a, {1, 0, 0}), dir / "r2s1.nii");
  const auto m = manifest("case_id,role,path\n"
                          "c,rater:r1:s1,r1s1.nii\n"
                          "c,rater:r1:s2,r1s2.nii\n"
                          "c,rater:r2:s1,r2s1.nii\n");
  const auto r = run({"cohort", "--manifest", m.string(), "--out", (dir / "o").string(),
                      "--no-timestamp"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(slurp(dir / "o" / "report.json"));
  const auto &var = report.at("variability");
  ASSERT_EQ(var.size(), 2u);
  EXPECT_EQ(var[0].at("grouping"), "intra_rater");
  EXPECT_EQ(var[0].at("mean_pairwise_dice"), 1.0);
  EXPECT_EQ(var[1].at("grouping"), "inter_rater");
  EXPECT_EQ(var[1].at("n_pairs"), 2);
  EXPECT_NEAR(var[1].at("mean_pairwise_dice").get<double>(), 7.0 / 8.0, 1e-12);
}

class CliCompareTest : public ::testing::Test {
protected:
  TempDir dir{"compare"};

  std::string records(const std::vector<MetricRecord> &recs) {
    const auto p = dir / "records.csv";
    std::ofstream(p) << render_records_csv(recs);
    return p.string();
  }
};

TEST_F(CliCompareTest, DiceExampleRow) {
  std::vector<MetricRecord> recs;
  const double a[] = {0.80, 0.82, 0.78};
  const double b[] = {0.70, 0.72, 0.68};
  for (int i = 0; i < 3; ++i) {
    recs.push_back({"c" + std::to_string(i), "methodA", "dice", a[i]});
    recs.push_back({"c" + std::to_string(i), "methodB", "dice", b[i]});
  }
  const auto r = run({"compare", "--records", records(recs), "--method-a", "methodA",
                      "--method-b", "methodB", "--out", (dir / "c.json").string(),
                      "--no-timestamp"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("+14.2857%"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("wilcoxon_exact: p = 0.25"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("paired_t: DegenerateVariance"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("dice for methodA is 14.29% (wilcoxon_exact: p = 0.25) higher compared "
                       "to methodB"),
            std::string::npos)
      << r.out;
  const auto row = json::parse(slurp(dir / "c.json")).at("comparisons")[0];
  EXPECT_NEAR(row.at("percent_diff").get<double>(), 14.285714285714285, 1e-9);
  EXPECT_EQ(row.at("direction"), "higher");
  EXPECT_EQ(row.at("wilcoxon").at("p_two_sided"), 0.25);
  EXPECT_EQ(row.at("paired_t").at("flag"), "DegenerateVariance");
}

TEST_F(CliCompareTest, LowerWordForDistances) {
  std::vector<MetricRecord> recs;
  for (int i = 0; i < 6; ++i) {
    recs.push_back({"c" + std::to_string(i), "A", "hausdorff", 1.0 + 0.1 * i});
    recs.push_back({"c" + std::to_string(i), "B", "hausdorff", 7.0 + 0.3 * i});
  }
  const auto r = run({"compare", "--records", records(recs), "--method-a", "A", "--method-b", "B"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("lower compared to B"), std::string::npos) << r.out;
}

TEST_F(CliCompareTest, IdenticalMethodsGiveZeroPercent) {
  std::vector<MetricRecord> recs;
  for (int i = 0; i < 4; ++i) {
    for (const char *metric : {"dice", "rms"}) {
      recs.push_back({"c" + std::to_string(i), "A", metric, 0.5 + i});
      recs.push_back({"c" + std::to_string(i), "B", metric, 0.5 + i});
    }
  }
  const auto out = (dir / "c.json").string();
  ASSERT_EQ(run({"compare", "--records", records(recs), "--method-a", "A", "--method-b", "B",
                 "--out", out})
                .code,
            0);
  for (const auto &row : json::parse(slurp(out)).at("comparisons")) {
    EXPECT_EQ(row.at("percent_diff"), 0.0);
    EXPECT_EQ(row.at("wilcoxon").at("flag"), "AllZeroDifferences");
  }
}

TEST_F(CliCompareTest, Errors) {
  const std::vector<MetricRecord> recs{{"c1", "A", "dice", 0.8}, {"c2", "B", "dice", 0.7}};
  const auto path = records(recs);
  EXPECT_EQ(run({"compare", "--records", path, "--method-a", "A", "--method-b", "B"}).code, 2);
  EXPECT_EQ(run({"compare", "--records", path, "--method-a", "A", "--method-b", "Z"}).code, 2);
  const auto junk = (dir / "junk.csv").string();
  std::ofstream(junk) << "not,a,records,file\n";
  EXPECT_EQ(run({"compare", "--records", junk, "--method-a", "A", "--method-b", "B"}).code, 3);
  EXPECT_EQ(run({"compare", "--records", (dir / "none.json").string(), "--method-a", "A",
                 "--method-b", "B"})
                .code,
            3);
}

TEST(Manifest, ParsesRolesAndQuotes) {
  const auto m = parse_manifest("\xEF\xBB\xBF" "case_id,role,path\r\n"
                                "c1,reference,ref.nii\r\n"
                                "c1,method:ABSS,\"dir, with comma/a.nii\"\r\n"
                                "\n"
                                "c1,rater:r1:s2,/abs/r.nii\n",
                                "/data");
  ASSERT_EQ(m.rows.size(), 3u);
  EXPECT_EQ(m.rows[0].path, std::filesystem::path("/data/ref.nii"));
  EXPECT_EQ(m.rows[1].role.kind, Role::Kind::Method);
  EXPECT_EQ(m.rows[1].role.name, "ABSS");
  EXPECT_EQ(m.rows[1].path, std::filesystem::path("/data/dir, with comma/a.nii"));
  EXPECT_EQ(m.rows[2].role.kind, Role::Kind::Rater);
  EXPECT_EQ(m.rows[2].role.str(), "rater:r1:s2");
  EXPECT_EQ(m.rows[2].path, std::filesystem::path("/abs/r.nii"));
}

TEST(Manifest, RejectsBadRoles) {
  for (const char *role : {"method:", "rater:r1", "rater::s", "judge"}) {
    EXPECT_THROW(parse_manifest(std::string("case_id,role,path\nc,") + role + ",x.nii\n", "."),
                 Error)
        << role;
  }
}

} // namespace
} // namespace segeval
