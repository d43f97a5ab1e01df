#pragma once

#include <string>
#include <vector>

#include "selgen/baselines.hpp"
#include "selgen/calibrate.hpp"
#include "selgen/records.hpp"

namespace selgen {

enum class Decision { Accept, Idk };

// Accept iff every (score >= threshold) conjunct holds; throws when the
// record lacks a referenced score.
Decision apply_selector(const Selector& sel, const ScoredRecord& r);

struct EvalReport {
  std::int64_t n_test = 0;
  std::int64_t n_selected = 0;
  std::int64_t n_false_selected = 0;  // e=0 among accepted
  bool fdr_e_defined = false;
  double fdr_e = 0.0;  // meaningful only when fdr_e_defined
  double efficiency = 0.0;
  std::string method;
  std::string bounded;  // calibration outcome carried through splits
  double u_hat = 0.0;

  nlohmann::json to_json() const;
};

// Empirical FDR-E and selection efficiency on a fully labeled test set.
// Zero selections flag fdr_e as undefined rather than reporting 0.
EvalReport evaluate(const Selector& sel, const Dataset& test);

enum class Method { SemiMs, SemiSingle, SemiDouble, Sup, Psl, Em };

Method method_from_string(const std::string& s);
const char* to_string(Method m);

// One calibration run: dispatches to the matching learner. z_u is ignored
// by Sup; Em uses the union.
CertifiedResult run_method(Method m, ScoreKey key, const RecordRefs& z_e,
                           const RecordRefs& z_u, const RiskBudget& budget,
                           const PslConfig& psl);

struct RepeatedSplitConfig {
  Method method = Method::SemiMs;
  ScoreKey score_key = ScoreKey::FM1;
  RiskBudget budget = default_budget(0.25, 0.02);
  PslConfig psl;
  int n_splits = 1;
  double calib_ratio = 0.5;       // fraction of records in the calibration half
  double labeled_fraction = 1.0;  // mask applied to the calibration half
  std::uint64_t seed = 0;
};

struct SplitSummary {
  double delta = 0.0;  // whisker level
  double fdr_q_lo = 0.0, fdr_q25 = 0.0, fdr_median = 0.0, fdr_q75 = 0.0,
         fdr_q_hi = 0.0, fdr_mean = 0.0;
  double eff_q_lo = 0.0, eff_q25 = 0.0, eff_median = 0.0, eff_q75 = 0.0,
         eff_q_hi = 0.0, eff_mean = 0.0;
  std::int64_t n_undefined = 0;

  nlohmann::json to_json() const;
};

// Deterministic repeated random splits: calibrate on one part, evaluate on
// the other, one report per split in split order.
std::vector<EvalReport> repeated_splits(const Dataset& ds,
                                        const RepeatedSplitConfig& cfg,
                                        SplitSummary* summary = nullptr);

// Box-plot data: columns (split, method, fdr_e, efficiency); undefined
// FDR-E prints NA.
std::string splits_to_csv(const std::vector<EvalReport>& reports);

}  // namespace selgen
