#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selgen/fdr_bounds.hpp"
#include "selgen/records.hpp"

namespace selgen {

enum class ScoreKey { FM1, FM2 };

const char* to_string(ScoreKey k);
ScoreKey score_key_from_string(const std::string& s);

double get_score(const ScoredRecord& r, ScoreKey key);  // throws if absent

struct SelectorTerm {
  ScoreKey key = ScoreKey::FM1;
  double threshold = 0.0;
};

// Conjunction of per-score thresholds: accept iff every score >= threshold.
// One or two terms with distinct keys.
struct Selector {
  std::vector<SelectorTerm> terms;

  void validate() const;
  bool references(ScoreKey key) const;
};

Selector single_selector(ScoreKey key, double threshold);
Selector double_selector(double tau_m1, double tau_m2);

enum class Bounded { Success, Fail };

const char* to_string(Bounded b);

// One bound evaluation inside a threshold search.
struct CandidateEval {
  int iter1 = 0;  // outer iteration (1-based)
  int iter2 = 0;  // inner iteration for the double search, else 0
  double tau1 = 0.0;
  std::optional<double> tau2;
  double bound = 1.0;
  bool feasible = false;
  std::int64_t n_selected = 0;
  std::int64_t loss_count = -1;  // baselines only
};

struct CertifiedResult {
  Selector selector;
  double u_hat = 1.0;
  Bounded bounded = Bounded::Fail;
  std::string score_set_used;
  std::vector<CandidateEval> trace;
  int iterations = 0;  // ceil_log2 of the initial candidate-set size
  // Budgets of each bound evaluation, for recomposition checks.
  double per_eval_delta_s = 0.0;
  double per_eval_delta_e = 0.0;
  double per_eval_delta_w = 0.0;
  double per_eval_delta = 0.0;  // baselines' single budget
  int per_eval_q = 0;
};

// Single-threshold semi-supervised learning: bisection over the union's
// sorted scores, fdr_e_bound per candidate at per-iteration budgets
// delta_X / ceil_log2(N). Success returns the last feasible candidate and
// its bound; Fail returns the bound-minimizing visited candidate.
CertifiedResult sgen_semi_single(ScoreKey key, const RecordRefs& z_e,
                                 const RecordRefs& z_u, const RiskBudget& b);

// Double-threshold variant: nested bisection over (f_m1, f_m2) candidates,
// budgets delta_X / I^2 per evaluation.
CertifiedResult sgen_semi_double(const RecordRefs& z_e, const RecordRefs& z_u,
                                 const RiskBudget& b);

// Neuro-selection model choice: runs the f_m1-single, f_m2-single and
// double branches at delta_X/3 each, then picks argmax u_hat among
// Successes, else argmin u_hat among Fails.
CertifiedResult sgen_semi_ms(const RecordRefs& z_e, const RecordRefs& z_u,
                             const RiskBudget& b);

}  // namespace selgen
