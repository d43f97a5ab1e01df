#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace selgen {

// One question/answer example with model scores, entailment score,
// optional entailment label e, optional exact-match flag em, and the
// label visibility flag v. Field names follow the JSONL contract.
struct ScoredRecord {
  std::string id;
  double f_m1 = 0.0;            // sequence-likelihood score, in [0,1]
  std::optional<double> f_m2;   // self-consistency score, in [0,1]
  double f_e = 0.0;             // entailment score, in [0,1]
  std::optional<int> e;         // entailment label; pipeline reads it only when v=1
  std::optional<int> em;        // exact-match flag
  int v = 0;
  nlohmann::json extras = nlohmann::json::object();  // unknown fields, preserved

  bool labeled() const { return v == 1 && e.has_value(); }
};

struct Dataset {
  std::vector<ScoredRecord> records;
  std::string provenance;
};

// The full confidence ledger: eps_s is the target FDR-E level, the three
// deltas split the total confidence budget, q is the epsilon_E grid size.
struct RiskBudget {
  double eps_s = 0.25;
  double delta_s = 0.0;
  double delta_e = 0.0;
  double delta_w = 0.0;
  int q = 5;

  void validate() const;
};

// Default mapping from user-facing (eps, delta):
// delta_w = 1e-5, delta_s = delta_e = (delta - delta_w) / 2.
RiskBudget default_budget(double eps, double delta, int q = 5,
                          double delta_w = 1e-5);

enum class SchemaMode { Calibration, Test };

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Dataset load_dataset(const std::string& path, SchemaMode mode);
Dataset parse_dataset(std::istream& in, SchemaMode mode,
                      const std::string& provenance);

nlohmann::json record_to_json(const ScoredRecord& r);
std::string to_jsonl(const Dataset& ds);
void save_dataset(const Dataset& ds, const std::string& path);

// Non-owning partitions Z_E = {v=1} and Z_U = {v=0}; disjoint, exhaustive.
using RecordRefs = std::vector<const ScoredRecord*>;
RecordRefs labeled_refs(const Dataset& ds);
RecordRefs unlabeled_refs(const Dataset& ds);
RecordRefs all_refs(const Dataset& ds);

// Demotes a seeded random subset of labeled records to v=0 so that exactly
// floor(fraction * |Z_E|) stay labeled; hidden labels are kept on the record
// but ignored by the pipeline from then on.
Dataset split_labeled_fraction(const Dataset& ds, double fraction,
                               std::uint64_t seed);

}  // namespace selgen
