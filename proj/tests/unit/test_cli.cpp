#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "ercomp/errors.hpp"

using namespace ercomp;
using namespace ercomp::cli;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ercomp_cli_test_" + name);
}

}  // namespace

// ---------------------------------------------------------------------------
// exact-dist

TEST(ExactDist, ThreeVerticesRational) {
  ExactDistOptions opt;
  opt.n = 3;
  opt.p = ratio(1, 2);
  opt.precision = "rational";
  const auto r = cmd_exact_dist(opt);
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_EQ(r.metrics["distribution"]["1"], "1/4");
  EXPECT_EQ(r.metrics["distribution"]["2"], "1/4");
  EXPECT_EQ(r.metrics["distribution"]["3"], "1/2");
  EXPECT_EQ(r.to_csv(), "k,prob\n1,1/4\n2,1/4\n3,1/2\n");
}

TEST(ExactDist, TrivialInputs) {
  ExactDistOptions one;
  one.n = 1;
  one.p = ratio(1, 3);
  EXPECT_EQ(cmd_exact_dist(one).metrics["distribution"]["1"], "1");

  ExactDistOptions zero_t;
  zero_t.n = 2;
  zero_t.t = Rational(0);
  const auto r = cmd_exact_dist(zero_t);
  EXPECT_EQ(r.inputs["precision"], "rational");
  EXPECT_EQ(r.metrics["distribution"]["1"], "1");
  EXPECT_EQ(r.metrics["distribution"]["2"], "0");
}

TEST(ExactDist, JsonSchema) {
  ExactDistOptions opt;
  opt.n = 4;
  opt.t = Rational(1);
  const auto j = cmd_exact_dist(opt).to_json();
  for (const char* key : {"experiment", "inputs", "metrics", "verdict", "runtime_seconds"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["experiment"], "exact-dist");
  EXPECT_EQ(j["inputs"]["precision"], "ext:256");
  EXPECT_EQ(j["verdict"], "pass");
}

// ---------------------------------------------------------------------------
// verify-identity and recover

TEST(VerifyIdentity, SingleCaseEchoesBothSides) {
  VerifyIdentityOptions opt;
  opt.n_max = 2;
  opt.p = ratio(1, 2);
  opt.j = 1;
  const auto r = cmd_verify_identity(opt);
  EXPECT_EQ(r.verdict, Verdict::kPass);
  ASSERT_EQ(r.metrics["cases"].size(), 1U);
  EXPECT_EQ(r.metrics["cases"][0]["lhs"], "3/4");
  EXPECT_EQ(r.metrics["cases"][0]["rhs"], "3/4");
}

TEST(VerifyIdentity, SmallSweepPassesInEveryMode) {
  for (const char* precision : {"rational", "ext:128", "double"}) {
    VerifyIdentityOptions opt;
    opt.n_max = 6;
    opt.com_max = 4;
    opt.precision = precision;
    const auto r = cmd_verify_identity(opt);
    EXPECT_EQ(r.verdict, Verdict::kPass) << precision;
    EXPECT_EQ(r.metrics["failures"], 0);
    EXPECT_TRUE(r.metrics["j0_all_one"].get<bool>());
  }
}

TEST(VerifyIdentity, RejectsInvalidShift) {
  VerifyIdentityOptions opt;
  opt.n_max = 3;
  opt.j = -3;
  EXPECT_THROW(cmd_verify_identity(opt), InvalidInput);
}

TEST(Recover, RationalIsExactAndTrivialPasses) {
  RecoverOptions opt;
  opt.n = 10;
  opt.p = ratio(1, 5);
  const auto r = cmd_recover(opt);
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_EQ(r.metrics["max_abs_error"], "0");

  RecoverOptions one;
  one.n = 1;
  one.p = ratio(1, 2);
  EXPECT_EQ(cmd_recover(one).verdict, Verdict::kPass);
}

// ---------------------------------------------------------------------------
// susceptibility, rigid, clt, critical window

TEST(Susceptibility, ZeroIntensityIsExactlyOne) {
  SusceptibilityOptions opt;
  opt.t = Rational(0);
  opt.n_list = {5, 10};
  opt.precision = "rational";
  const auto r = cmd_susceptibility(opt);
  for (const auto& row : r.metrics["rows"]) EXPECT_EQ(row["mean"], "1");
  EXPECT_EQ(r.verdict, Verdict::kPass);
}

TEST(Susceptibility, EchoesExpansionValue) {
  SusceptibilityOptions opt;
  opt.n_list = {400};
  opt.precision = "ext:128";
  const auto r = cmd_susceptibility(opt);
  EXPECT_NEAR(r.metrics["rows"][0]["expansion_order1"].get<double>(), 1.985, 1e-15);
  EXPECT_THROW(cmd_susceptibility(SusceptibilityOptions{Rational(1), {10}, "ext:128"}), InvalidInput);
}

TEST(Rigid, SingleVertexIsConsistent) {
  RigidOptions opt;
  opt.n = 1;
  opt.t = Rational(1);
  opt.replicas = 100;
  const auto r = cmd_rigid(opt);
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_DOUBLE_EQ(r.metrics["sample_mean"].get<double>(), 1.0);
}

TEST(Rigid, SmallCaseIsReproducible) {
  RigidOptions opt;
  opt.n = 60;
  opt.t = ratio(1, 2);
  opt.replicas = 20000;
  opt.seed = 17;
  const auto a = cmd_rigid(opt);
  opt.threads = 2;
  const auto b = cmd_rigid(opt);
  EXPECT_EQ(a.metrics, b.metrics);
  EXPECT_EQ(a.verdict, Verdict::kPass);
}

TEST(Clt, CompleteGraphIsFlaggedDegenerate) {
  CltOptions opt;
  opt.n = 100;
  opt.p = 1.0;
  opt.replicas = 10;
  const auto r = cmd_clt(opt);
  EXPECT_EQ(r.verdict, Verdict::kExploratory);
  EXPECT_TRUE(r.metrics["degenerate"].get<bool>());
  EXPECT_DOUBLE_EQ(r.metrics["ks_statistic"].get<double>(), 0.5);
  EXPECT_FALSE(r.exploratory_met);
  EXPECT_EQ(r.exit_code(), kExitOk);
}

TEST(Clt, RawSamplesSpillToCsv) {
  const auto path = temp_file("raw.csv");
  CltOptions opt;
  opt.n = 2000;
  opt.replicas = 5;
  opt.raw_csv = path.string();
  cmd_clt(opt);
  const std::string text = slurp(path);
  EXPECT_EQ(text.rfind("replica,size1,largest,second\n", 0), 0U);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  std::filesystem::remove(path);
}

TEST(CriticalWindow, ZeroBetaIsExact) {
  CriticalWindowOptions opt;
  opt.betas = {0.0};
  opt.n_list = {64, 216};
  opt.precision = "ext:128";
  const auto r = cmd_critical_window(opt);
  EXPECT_EQ(r.verdict, Verdict::kExploratory);
  for (const auto& v : r.metrics["series"][0]["values"]) EXPECT_EQ(v.get<double>(), 0.0);
}

TEST(CriticalWindow, IdentityFormIsExactShift) {
  // With the exact factor the functional equals n^{1/3} floor(beta n^{2/3})/n.
  CriticalWindowOptions opt;
  opt.betas = {0.5, -0.5};
  opt.n_list = {216};
  opt.precision = "ext:192";
  const auto r = cmd_critical_window(opt);
  EXPECT_NEAR(r.metrics["series"][0]["identity_form_values"][0].get<double>(), 6.0 * 18 / 216, 1e-12);
  EXPECT_NEAR(r.metrics["series"][1]["identity_form_values"][0].get<double>(), -6.0 * 18 / 216, 1e-12);
}

// ---------------------------------------------------------------------------
// sbm-verify

TEST(SbmVerify, PresetsPass) {
  for (const char* preset : {"l1", "2,2"}) {
    SbmVerifyOptions opt;
    opt.preset = preset;
    const auto r = cmd_sbm_verify(opt);
    EXPECT_EQ(r.verdict, Verdict::kPass) << preset;
    EXPECT_TRUE(r.metrics["j0_all_one"].get<bool>());
  }
}

TEST(SbmVerify, CustomModel) {
  SbmVerifyOptions opt;
  opt.preset = "custom";
  opt.counts = {2, 1};
  opt.p_matrix = "1/2,1/3;1/3,1/4";
  EXPECT_EQ(cmd_sbm_verify(opt).verdict, Verdict::kPass);
  opt.p_matrix = "1/2,1/3;1/4,1/4";
  EXPECT_THROW(cmd_sbm_verify(opt), InvalidInput);
}

// ---------------------------------------------------------------------------
// Exit codes and output

TEST(RunAndEmit, ExitCodes) {
  const auto path = temp_file("out.json");
  const auto ok = [] {
    ExperimentReport r;
    r.experiment = "ok";
    return r;
  };
  EXPECT_EQ(run_and_emit("json", path.string(), ok), kExitOk);
  EXPECT_NE(slurp(path).find("\"experiment\": \"ok\""), std::string::npos);
  EXPECT_EQ(run_and_emit("json", path.string(), [] {
              ExperimentReport r;
              r.verdict = Verdict::kFail;
              return r;
            }),
            kExitFail);
  EXPECT_EQ(run_and_emit("json", path.string(), []() -> ExperimentReport { throw InvalidInput("x"); }),
            kExitInvalid);
  EXPECT_EQ(run_and_emit("json", path.string(), []() -> ExperimentReport { throw DomainError("x"); }),
            kExitInvalid);
  EXPECT_EQ(run_and_emit("json", path.string(), []() -> ExperimentReport { throw ResourceError("x"); }),
            kExitResource);
  EXPECT_EQ(run_and_emit("xml", path.string(), ok), kExitInvalid);
  std::filesystem::remove(path);
}

TEST(RunAndEmit, CsvFlattensNestedMetrics) {
  ExperimentReport r;
  r.metrics["a"] = 1;
  r.metrics["b"]["c"] = "x";
  r.metrics["d"] = nlohmann::ordered_json::array({2, 3});
  EXPECT_EQ(r.to_csv(), "metric,value\na,1\nb.c,x\nd[0],2\nd[1],3\n");
}

TEST(ParsePrecision, FallbackAndErrors) {
  EXPECT_EQ(parse_precision("", "ext:300").bits, 300U);
  EXPECT_EQ(parse_precision("rational", "ext:300").mode, Arithmetic::kRational);
  EXPECT_THROW(parse_precision("fast", "double"), InvalidInput);
}
