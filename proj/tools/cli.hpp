#pragma once

// Experiment harness behind the `ercomp` executable. Every subcommand is a
// plain function from an options struct to an ExperimentReport, so tests can
// drive them without a process boundary.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ercomp/numeric.hpp"

namespace ercomp::cli {

enum class Verdict { kPass, kFail, kExploratory };

std::string to_string(Verdict v);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitResource = 3;

struct ExperimentReport {
  std::string experiment;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  Verdict verdict = Verdict::kPass;
  // Exploratory reports record whether their documented thresholds were met;
  // they never produce a failing exit code.
  bool exploratory_met = true;
  double runtime_seconds = 0.0;
  // CSV body used instead of the flattened metrics when non-empty.
  std::string csv_table;

  // {experiment, inputs, metrics, verdict, runtime_seconds}
  nlohmann::ordered_json to_json() const;
  // csv_table, or "metric,value" rows with nested keys joined by '.'.
  std::string to_csv() const;
  int exit_code() const noexcept { return verdict == Verdict::kFail ? kExitFail : kExitOk; }
};

// "double" | "ext" | "ext:<bits>" | "rational"; an empty string selects
// `fallback`.
PrecisionCtx parse_precision(const std::string& text, const std::string& fallback);

struct ExactDistOptions {
  int n = 1;
  std::optional<Rational> p;
  std::optional<Rational> t;
  // Empty: rational when p is an exact rational, ext:256 otherwise.
  std::string precision;
};
ExperimentReport cmd_exact_dist(const ExactDistOptions& opt);

// Default p grid 1/10, ..., 9/10.
std::vector<Rational> default_p_grid();

struct VerifyIdentityOptions {
  int n_max = 12;
  // Largest M, N in the change-of-measure sweep.
  int com_max = 10;
  std::optional<Rational> p;  // default: the p grid
  // With j set only (n_max, j) is checked and the change-of-measure sweep
  // is skipped; otherwise n = 1..n_max with j in (-n, n_max - n].
  std::optional<long> j;
  std::string precision = "rational";
};
ExperimentReport cmd_verify_identity(const VerifyIdentityOptions& opt);

struct RecoverOptions {
  int n = 10;
  std::optional<Rational> p;
  std::optional<Rational> t;
  // Empty: rational when p is an exact rational, ext:512 otherwise.
  std::string precision;
};
ExperimentReport cmd_recover(const RecoverOptions& opt);

struct SusceptibilityOptions {
  Rational t{1, 2};
  std::vector<int> n_list{250, 500, 1000, 2000};
  std::string precision = "ext:256";
};
ExperimentReport cmd_susceptibility(const SusceptibilityOptions& opt);

struct CltOptions {
  int n = 50000;
  std::optional<double> t;  // default 2 unless p is given
  std::optional<double> p;
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string raw_csv;  // optional path for the raw samples
};
ExperimentReport cmd_clt(const CltOptions& opt);

struct RigidOptions {
  int n = 500;
  Rational t{4, 5};
  std::uint64_t replicas = 200000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string precision = "ext:256";
};
ExperimentReport cmd_rigid(const RigidOptions& opt);

struct CriticalWindowOptions {
  double u = 1.0;
  std::vector<double> betas{0.5};
  std::vector<int> n_list{512, 1728, 4096};
  std::string precision = "ext:256";
};
// One exact distribution per n serves every beta.
ExperimentReport cmd_critical_window(const CriticalWindowOptions& opt);

struct SbmVerifyOptions {
  // "all" (the three two-label presets), "l1", "2,2", "3,2", "2,3", or
  // "custom" with counts and p_matrix set.
  std::string preset = "all";
  std::vector<int> counts;
  std::string p_matrix;  // rows separated by ';', entries by ','
  std::string precision = "rational";
};
ExperimentReport cmd_sbm_verify(const SbmVerifyOptions& opt);

// Probability matrices swept by the two-label presets.
std::vector<std::vector<std::vector<Rational>>> default_sbm_p_grid();

// Runs `body`, timing it, and maps library exceptions to exit codes.
// Writes the report (json or csv) to `out_path` or stdout.
int run_and_emit(const std::string& format, const std::string& out_path,
                 const std::function<ExperimentReport()>& body);

}  // namespace ercomp::cli
