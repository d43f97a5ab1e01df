#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selgen/calibrate.hpp"
#include "selgen/records.hpp"
#include "selgen/rng.hpp"

namespace selgen {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedRiskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScoreLaw { Uniform, Beta };
enum class CurveKind { Identity, Logistic, Constant };

// Parametric synthetic world with analytically known true risks.
// f_m1 ~ score law; e | f_m1 ~ Bernoulli(pi(f_m1)); f_e | e ~ Beta(class);
// f_m2 = clamp(pi(f_m1) + Normal(0, sd)) when the law is set;
// em | e ~ Bernoulli(p_em_given_e); v ~ Bernoulli(p_v).
struct WorldSpec {
  ScoreLaw score_law = ScoreLaw::Uniform;
  double score_a = 1.0, score_b = 1.0;  // beta score law parameters
  CurveKind curve = CurveKind::Identity;
  double curve_slope = 1.0, curve_offset = 0.0;  // logistic curve
  double curve_p = 0.5;                          // constant curve
  double fe_a1 = 8.0, fe_b1 = 2.0;  // f_e | e=1
  double fe_a0 = 2.0, fe_b0 = 8.0;  // f_e | e=0
  std::optional<double> f_m2_noise_sd;
  double p_v = 0.2;
  double p_em_given_e1 = 0.7, p_em_given_e0 = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  double pi(double s) const;  // P(e=1 | f_m1 = s)

  static WorldSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// n i.i.d. records, deterministic given (w, seed stream). The entailment
// label is populated on every record as a shadow for audits; the pipeline
// ignores it whenever v=0.
Dataset sample_dataset(const WorldSpec& w, std::int64_t n);
Dataset sample_dataset(const WorldSpec& w, std::int64_t n, Rng& rng);

// Fixed-size draw for Monte-Carlo audits: n_e records with v=1 followed by
// n_u records with v=0 (shadow labels retained).
Dataset sample_split(const WorldSpec& w, std::int64_t n_e, std::int64_t n_u,
                     Rng& rng);

// Population risks of the world, computed by closed form / Gauss-Legendre
// quadrature over the score (e and f_e are independent of everything else
// given f_m1, and the f_m2 tail is an analytic normal tail).
class TrueRisk {
 public:
  explicit TrueRisk(const WorldSpec& w);

  double fdr_e_at(const Selector& sel) const;
  double fdr_em_at(const Selector& sel) const;
  double fer_at(double tau_e) const;  // P{e=0, f_e >= tau_e}
  double ner_at(double tau_e, const Selector& sel) const;
  double p_e0() const;                // P{e=0}
  double acceptance_mass(const Selector& sel) const;

 private:
  WorldSpec w_;
};

double true_fdr_e(const WorldSpec& w, const Selector& sel);

struct PluginEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::int64_t n_selected = 0;
};

// Monte-Carlo plug-in estimate of the conditional FDR-E from shadow-labeled
// samples; the independent cross-check of the quadrature path.
PluginEstimate plugin_fdr_e(const WorldSpec& w, const Selector& sel,
                            std::int64_t n_samples, std::uint64_t seed);

// (tau, true FDR-E) along a grid for the identity-calibrated world; refuses
// non-calibrated worlds and asserts pointwise non-increase.
std::vector<std::pair<double, double>> lemma4_curve(
    const WorldSpec& w, const std::vector<double>& taus);

enum class Claim { Fer, USsl, Theorem1, Theorem2 };

Claim claim_from_string(const std::string& s);
const char* to_string(Claim c);

struct AuditParams {
  std::int64_t trials = 200;
  std::int64_t n_e = 500;
  std::int64_t n_u = 2000;
  RiskBudget budget = default_budget(0.25, 0.02);  // theorem1
  double eps_e = 0.25;                             // fer / u_ssl
  double delta_e = 0.1;                            // fer / u_ssl
  double delta_s = 0.05;                           // u_ssl
  double delta = 0.05;                             // theorem2
};

struct AuditReport {
  std::string claim;
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double frequency = 0.0;
  double ci_low = 0.0;   // exact binomial 95% interval
  double ci_high = 1.0;
  bool pass = false;
  double budget_level = 0.0;       // the delta the frequency is held to
  std::int64_t pass_threshold = 0;  // ceil(delta*T + 3*sqrt(T*delta*(1-delta)))
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// Runs the named learner `trials` times on fresh draws and compares the
// learned bound against the world's true risk.
AuditReport mc_verify(Claim claim, const WorldSpec& w, const AuditParams& p);

}  // namespace selgen
