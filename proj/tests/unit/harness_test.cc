// Copyright 2026 The RSR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "rsr/error.hpp"
#include "rsr/harness/config.hpp"
#include "rsr/harness/csv.hpp"
#include "rsr/harness/experiment.hpp"
#include "rsr/harness/report.hpp"

namespace rsr::harness {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

ErrorCode code_of(auto&& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no rsr::Error thrown";
  return ErrorCode::invalid_argument;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class ScratchDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("rsr_harness_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

ExperimentRecord full_record() {
  ExperimentRecord r;
  r.preset = "fig1_eps_sweep";
  r.trial_index = 3;
  r.seed = 18446744073709551615ULL;
  r.method = "ransac_plus";
  r.d = 100;
  r.n = 500;
  r.r_star = 10;
  r.epsilon = 0.1;
  r.sigma2 = 1.6e-3;
  r.r_hat = 12;
  r.r_tilde = 10;
  r.subspace_error = 3.2e-15;
  r.medres_final = 0.125;
  r.gap_found = true;
  r.capped = false;
  r.runtime_ms_stage1 = 4;
  r.runtime_ms_stage2 = 1200;
  r.runtime_ms_total = 1205;
  return r;
}

// A grid small enough to run in a second or two: 2 x 2 x 2 cells.
ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.d = 20;
  s.n = 100;
  s.r_stars = {2, 3};
  s.epsilons = {0.0, 0.2};
  s.sigma2s = {0.0, 1e-3};
  s.trials = 3;
  s.master_seed = 99;
  s.methods = {Method::ransac_plus, Method::classic_ransac, Method::oracle_pca};
  s.ransac_plus.stage2.T_cap = 200;
  s.baseline.max_iters = 200;
  s.timing = false;
  return s;
}

TEST(CsvTest, HeaderMatchesColumnList) {
  EXPECT_EQ(csv_header(),
            "preset,trial_index,seed,method,d,n,r_star,epsilon,sigma2,r_hat,r_tilde,subspace_error,medres_final,"
            "gap_found,capped,runtime_ms_stage1,runtime_ms_stage2,runtime_ms_total");
}

TEST(CsvTest, FormatDoubleIsShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(1e-4), "1e-04");
  EXPECT_EQ(format_double(0.0016), "0.0016");
  const double awkward = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(awkward)), awkward);
}

TEST(CsvTest, RowRoundTrip) {
  const auto r = full_record();
  const auto row = to_csv_row(r);
  EXPECT_EQ(row,
            "fig1_eps_sweep,3,18446744073709551615,ransac_plus,100,500,10,0.1,0.0016,12,10,3.2e-15,0.125,true,"
            "false,4,1200,1205");
  EXPECT_EQ(parse_csv_row(row), r);
}

TEST(CsvTest, UnsetFieldsAreEmpty) {
  ExperimentRecord r = full_record();
  r.r_hat.reset();
  r.r_tilde.reset();
  r.subspace_error.reset();
  r.medres_final.reset();
  r.gap_found.reset();
  r.capped.reset();
  r.runtime_ms_stage1.reset();
  r.runtime_ms_stage2.reset();
  r.runtime_ms_total.reset();
  const auto row = to_csv_row(r);
  EXPECT_THAT(row, ::testing::EndsWith(",0.1,0.0016,,,,,,,,,"));
  EXPECT_EQ(split_csv_line(row).size(), kRecordColumns.size());
  EXPECT_EQ(parse_csv_row(row), r);
}

TEST(CsvTest, MalformedRowsAreSchemaErrors) {
  EXPECT_EQ(code_of([] { parse_csv_row("a,b,c"); }), ErrorCode::schema_error);
  auto row = to_csv_row(full_record());
  row.replace(row.find("true"), 4, "yes");
  EXPECT_EQ(code_of([&] { parse_csv_row(row); }), ErrorCode::schema_error);
  auto bad_int = to_csv_row(full_record());
  bad_int.replace(bad_int.find(",100,"), 5, ",1x0,");
  EXPECT_EQ(code_of([&] { parse_csv_row(bad_int); }), ErrorCode::schema_error);
}

TEST(ConfigTest, DefaultsWithoutKeys) {
  const auto spec = parse_config_text("[experiment]\n");
  EXPECT_EQ(spec.preset, Preset::custom);
  EXPECT_EQ(spec.d, 100);
  EXPECT_EQ(spec.n, 500);
  EXPECT_EQ(spec.r_stars, std::vector<Index>{10});
  EXPECT_EQ(spec.trials, 20);
  EXPECT_EQ(spec.ransac_plus.stage1.C, 2.2);
  EXPECT_EQ(spec.ransac_plus.stage2.C_prime, 4.0);
  EXPECT_EQ(spec.ransac_plus.stage2.delta, 0.05);
  EXPECT_TRUE(spec.timing);
}

TEST(ConfigTest, ParsesListsAndSections) {
  const auto spec = parse_config_text(
      "# comment\n"
      "[experiment]\n"
      "preset = fig4_heatmap\n"
      "epsilon = 0, 0.1 ,0.2\n"
      "methods = ransac_plus, classic_ransac\n"
      "timing = false\n"
      "[stage1]\n"
      "C = 3.0\n"
      "r_star_hint = 10\n"
      "[stage2]\n"
      "T_cap = 500\n"
      "[baseline]\n"
      "r_offset = 1\n");
  EXPECT_EQ(spec.preset, Preset::fig4_heatmap);
  EXPECT_EQ(spec.epsilons, (std::vector<double>{0.0, 0.1, 0.2}));
  EXPECT_EQ(spec.sigma2s.size(), 5u);
  EXPECT_EQ(spec.methods, (std::vector<Method>{Method::ransac_plus, Method::classic_ransac}));
  EXPECT_FALSE(spec.timing);
  EXPECT_EQ(spec.ransac_plus.stage1.C, 3.0);
  EXPECT_EQ(spec.ransac_plus.stage1.r_star_hint, 10);
  EXPECT_EQ(spec.ransac_plus.stage2.T_cap, 500);
  EXPECT_EQ(spec.baseline.r_offset, 1);
}

TEST(ConfigTest, EpsilonAboveHalfIsRejected) {
  std::string msg;
  EXPECT_EQ(code_of([] { parse_config_text("[experiment]\nepsilon = 0.7\n"); }, &msg), ErrorCode::epsilon_too_large);
  EXPECT_EQ(code_of([] { parse_config_text("[experiment]\nepsilon = 0.1\n\nepsilon = 0.2\n"); }, &msg),
            ErrorCode::config_error);
  EXPECT_THAT(msg, HasSubstr("line 4"));
  EXPECT_THAT(msg, HasSubstr("line 2"));
}

TEST(ConfigTest, ReportsLineNumbers) {
  std::string msg;
  EXPECT_EQ(code_of([] { parse_config_text("[experiment]\ntrials = 3\nbogus = 1\n"); }, &msg),
            ErrorCode::config_error);
  EXPECT_THAT(msg, HasSubstr("line 3"));
  EXPECT_THAT(msg, HasSubstr("bogus"));
  EXPECT_EQ(code_of([] { parse_config_text("[experiment]\njust words\n"); }, &msg), ErrorCode::config_error);
  EXPECT_THAT(msg, HasSubstr("line 2"));
  EXPECT_EQ(code_of([] { parse_config_text("[nowhere]\n"); }, &msg), ErrorCode::config_error);
  EXPECT_THAT(msg, HasSubstr("line 1"));
  EXPECT_EQ(code_of([] { parse_config_text("trials = 3\n"); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] { parse_config_text("[experiment]\ntrials = many\n"); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] { parse_config_text("[experiment]\nmethods = ransac_plus, magic\n"); }),
            ErrorCode::config_error);
}

TEST(ConfigTest, ValidationCatchesImpossibleGrids) {
  EXPECT_EQ(code_of([] { parse_config_text("[experiment]\nd = 10\nr_star = 10\n"); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] { parse_config_text("[experiment]\ntrials = 0\n"); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] { parse_config(fs::path("/nonexistent/rsr.ini")); }), ErrorCode::io_error);
}

TEST(ConfigTest, ReferenceListsEveryKey) {
  const auto ref = config_reference();
  for (const char* key : {"[experiment]", "[stage1]", "[stage2]", "[baseline]", "T_cap", "r_offset", "timing"}) {
    EXPECT_THAT(ref, HasSubstr(key));
  }
}

TEST(PresetTest, NamesRoundTrip) {
  for (auto p : {Preset::fig1_eps_sweep, Preset::fig2_dim_misspec, Preset::fig2_noise_sweep, Preset::fig2_runtime,
                 Preset::fig4_heatmap, Preset::custom}) {
    EXPECT_EQ(parse_preset(preset_name(p)), p);
  }
  EXPECT_EQ(code_of([] { parse_preset("fig9"); }), ErrorCode::config_error);
  EXPECT_EQ(preset_spec(Preset::fig4_heatmap).cell_count(), 25);
  EXPECT_EQ(preset_spec(Preset::fig2_runtime).d, 1000);
}

TEST(ExperimentTest, GridOrderAndSeeds) {
  const auto spec = small_spec();
  ASSERT_EQ(spec.cell_count(), 8);
  const auto first = grid_cell(spec, 0);
  const auto second = grid_cell(spec, 1);
  const auto fifth = grid_cell(spec, 4);
  EXPECT_EQ(first.r_star, 2);
  EXPECT_EQ(second.sigma2, 1e-3);
  EXPECT_EQ(second.epsilon, 0.0);
  EXPECT_EQ(fifth.r_star, 3);
  EXPECT_EQ(trial_seed(spec, 5, 2), derive_seed(99, {5, 2}));
}

class ExperimentRunTest : public ScratchDir {};

TEST_F(ExperimentRunTest, WritesOneRowPerTrialAndMethod) {
  auto spec = small_spec();
  spec.output_path = (dir_ / "runs.csv").string();
  std::vector<ExperimentRecord> streamed;
  const auto records = run_experiment(spec, [&](const ExperimentRecord& r) { streamed.push_back(r); });
  ASSERT_EQ(records.size(), 8u * 3u * 3u);
  EXPECT_EQ(streamed, records);
  const auto back = read_records(spec.output_path);
  EXPECT_EQ(back, records);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].method, method_name(spec.methods[i % 3]));
    EXPECT_EQ(records[i].trial_index, static_cast<Index>((i / 3) % 3));
    EXPECT_FALSE(records[i].runtime_ms_total.has_value());
  }
}

TEST_F(ExperimentRunTest, FiveByTwentyGridRowCount) {
  auto spec = small_spec();
  spec.r_stars = {2};
  spec.epsilons = {0.0, 0.1, 0.2, 0.3, 0.4};
  spec.sigma2s = {0.0};
  spec.methods = {Method::ransac_plus, Method::classic_ransac};
  spec.trials = 20;
  EXPECT_EQ(run_experiment(spec).size(), 200u);
}

TEST_F(ExperimentRunTest, ByteIdenticalAcrossRunsAndThreads) {
  auto spec = small_spec();
  spec.output_path = (dir_ / "a.csv").string();
  run_experiment(spec);
  spec.output_path = (dir_ / "b.csv").string();
  run_experiment(spec);
  spec.threads = 4;
  spec.output_path = (dir_ / "c.csv").string();
  run_experiment(spec);
  const auto a = slurp(dir_ / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b.csv"));
  EXPECT_EQ(a, slurp(dir_ / "c.csv"));
}

TEST_F(ExperimentRunTest, SingleTrialReplayMatchesSweep) {
  const auto spec = small_spec();
  const auto records = run_experiment(spec);
  const auto replay = run_trial(spec, 6, 1);
  ASSERT_EQ(replay.size(), 3u);
  const std::size_t offset = (6 * 3 + 1) * 3;
  for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(replay[m], records[offset + m]);
  EXPECT_EQ(replay[0].seed, trial_seed(spec, 6, 1));
}

TEST_F(ExperimentRunTest, TimingColumnsFilledWhenEnabled) {
  auto spec = small_spec();
  spec.timing = true;
  spec.r_stars = {2};
  spec.epsilons = {0.1};
  spec.sigma2s = {0.0};
  spec.trials = 1;
  const auto records = run_experiment(spec);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_TRUE(records[0].runtime_ms_stage1.has_value());
  EXPECT_TRUE(records[0].runtime_ms_total.has_value());
  EXPECT_TRUE(records[1].runtime_ms_total.has_value());
}

TEST_F(ExperimentRunTest, UnwritableOutputIsIoError) {
  auto spec = small_spec();
  spec.output_path = (dir_ / "missing" / "runs.csv").string();
  EXPECT_EQ(code_of([&] { run_experiment(spec); }), ErrorCode::io_error);
}

TEST(ReportTest, MomentsOfSmallSamples) {
  const auto none = moments({});
  EXPECT_EQ(none.count, 0);
  EXPECT_FALSE(none.mean.has_value());
  const auto one = moments({2.5});
  EXPECT_EQ(one.mean, 2.5);
  EXPECT_EQ(one.std, 0.0);
  const auto same = moments({4.0, 4.0, 4.0});
  EXPECT_EQ(same.mean, 4.0);
  EXPECT_EQ(same.std, 0.0);
  const auto spread = moments({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(*spread.mean, 2.5);
  EXPECT_DOUBLE_EQ(*spread.std, std::sqrt(5.0 / 3.0));
}

TEST(ReportTest, GroupsByCellAndMethod) {
  std::vector<ExperimentRecord> records;
  for (int t = 0; t < 4; ++t) {
    auto r = full_record();
    r.trial_index = t;
    r.subspace_error = 0.1 * (t + 1);
    r.r_hat = 10 + 2 * t;
    records.push_back(r);
    auto c = r;
    c.method = "classic_ransac";
    c.r_hat.reset();
    c.subspace_error = 1.0;
    records.push_back(c);
  }
  auto failed = full_record();
  failed.subspace_error.reset();
  failed.r_hat.reset();
  records.push_back(failed);

  const auto rows = summarize(records);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].method, "classic_ransac");
  EXPECT_EQ(rows[0].trials, 4);
  EXPECT_EQ(rows[0].subspace_error.mean, 1.0);
  EXPECT_FALSE(rows[0].r_hat_ratio.mean.has_value());
  EXPECT_EQ(rows[1].method, "ransac_plus");
  EXPECT_EQ(rows[1].trials, 5);
  EXPECT_EQ(rows[1].subspace_error.count, 4);
  EXPECT_DOUBLE_EQ(*rows[1].subspace_error.mean, 0.25);
  EXPECT_DOUBLE_EQ(*rows[1].r_hat_ratio.mean, 1.3);
  EXPECT_THAT(to_summary_row(rows[0]), ::testing::StartsWith("fig1_eps_sweep,classic_ransac,100,500,10,0.1,0.0016,4,1,0,,"));
}

TEST(ReportTest, SummaryPathNaming) {
  EXPECT_EQ(summary_path("out/runs.csv"), fs::path("out/runs.summary.csv"));
  EXPECT_EQ(summary_path("runs.txt"), fs::path("runs.txt.summary.csv"));
}

class ReportFileTest : public ScratchDir {};

TEST_F(ReportFileTest, WritesSummaryNextToCsv) {
  const fs::path csv = dir_ / "runs.csv";
  {
    std::ofstream out(csv);
    out << csv_header() << '\n' << to_csv_row(full_record()) << '\n';
  }
  const auto out = report_summary(csv);
  EXPECT_EQ(out, dir_ / "runs.summary.csv");
  const auto text = slurp(out);
  EXPECT_THAT(text, ::testing::StartsWith(summary_header() + "\n"));
  EXPECT_THAT(text, HasSubstr("fig1_eps_sweep,ransac_plus,100,500,10,0.1,0.0016,1,3.2e-15,0,1.2,0,4,0,1200,0,1205,0"));
}

TEST_F(ReportFileTest, WrongHeaderIsSchemaError) {
  const fs::path csv = dir_ / "runs.csv";
  std::ofstream(csv) << "a,b,c\n1,2,3\n";
  EXPECT_EQ(code_of([&] { report_summary(csv); }), ErrorCode::schema_error);
  EXPECT_EQ(code_of([&] { report_summary(dir_ / "absent.csv"); }), ErrorCode::io_error);
}

}  // namespace
}  // namespace rsr::harness
