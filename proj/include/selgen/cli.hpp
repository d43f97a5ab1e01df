#pragma once

#include <optional>
#include <string>

#include "selgen/evaluate.hpp"
#include "selgen/records.hpp"

namespace selgen {

// Exit codes: 0 success; 2 validation failure; 3 run completed with a
// negative certification outcome (calibration Bounded=Fail, or a verify-pac
// audit with pass=false); 4 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCertFail = 3;
inline constexpr int kExitInternal = 4;

struct RunConfig {
  std::string command;  // calibrate | apply | evaluate | simulate | verify-pac | report
  Method method = Method::SemiMs;
  ScoreKey score_key = ScoreKey::FM1;

  // Budget: §-default mapping from (eps, delta) with optional overrides.
  double eps = 0.25;
  double delta = 0.02;
  double delta_w = 1e-5;
  std::optional<double> delta_s_override;
  std::optional<double> delta_e_override;
  int q = 5;

  double tau_pl = 0.9;
  bool psl_filter = false;

  std::string data_path;
  std::string selector_path;
  std::string world_path;
  std::string out_dir;  // empty -> $SELGEN_OUT_DIR or "."

  std::string claim = "theorem1";
  std::int64_t trials = 200;
  std::int64_t n = 1000;
  std::int64_t n_e = 500;
  std::int64_t n_u = 2000;
  std::optional<std::uint64_t> seed;
  double labeled_fraction = 1.0;
  int n_splits = 1;
  double calib_ratio = 0.5;
  bool keep_shadow = false;
  std::string sim_mode = "calibration";  // simulate output schema

  RiskBudget budget() const;
};

// Executes one command, writes its artifact files plus a manifest into the
// output directory, and returns the process exit code.
int run_command(const RunConfig& cfg);

// FNV-1a 64-bit content digest used in manifests (hex string).
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace selgen
