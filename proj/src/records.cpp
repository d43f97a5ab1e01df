#include "selgen/records.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "selgen/rng.hpp"

namespace selgen {

void RiskBudget::validate() const {
  if (!(eps_s > 0.0 && eps_s <= 1.0)) {
    throw ValidationError("RiskBudget: eps_s must be in (0,1]");
  }
  for (double d : {delta_s, delta_e, delta_w}) {
    if (!(d > 0.0 && d < 1.0)) {
      throw ValidationError("RiskBudget: deltas must be in (0,1)");
    }
  }
  if (delta_s + delta_e + delta_w >= 1.0) {
    throw ValidationError("RiskBudget: delta_s + delta_e + delta_w must be < 1");
  }
  if (q < 1) {
    throw ValidationError("RiskBudget: q must be >= 1");
  }
}

RiskBudget default_budget(double eps, double delta, int q, double delta_w) {
  if (!(delta > delta_w)) {
    throw ValidationError("default_budget: delta must exceed delta_w");
  }
  RiskBudget b;
  b.eps_s = eps;
  b.delta_w = delta_w;
  b.delta_s = (delta - delta_w) / 2.0;
  b.delta_e = (delta - delta_w) / 2.0;
  b.q = q;
  b.validate();
  return b;
}

namespace {

const std::set<std::string> kKnownFields = {"id", "f_m1", "f_m2", "f_e",
                                            "e",  "em",   "v"};

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ValidationError("line " + std::to_string(line) + ": " + msg);
}

double get_score(const nlohmann::json& j, const char* key, std::size_t line) {
  const auto& v = j.at(key);
  if (!v.is_number()) fail(line, std::string(key) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
    fail(line, std::string(key) + " out of range [0,1]");
  }
  return x;
}

int get_bit(const nlohmann::json& v, const char* key, std::size_t line) {
  if (!v.is_number_integer()) fail(line, std::string(key) + " must be 0 or 1");
  const auto x = v.get<std::int64_t>();
  if (x != 0 && x != 1) fail(line, std::string(key) + " must be 0 or 1");
  return static_cast<int>(x);
}

ScoredRecord parse_record(const nlohmann::json& j, SchemaMode mode,
                          std::size_t line) {
  if (!j.is_object()) fail(line, "record must be a JSON object");
  ScoredRecord r;
  if (!j.contains("id") || !j.at("id").is_string()) {
    fail(line, "missing string field 'id'");
  }
  r.id = j.at("id").get<std::string>();
  if (!j.contains("f_m1")) fail(line, "missing field 'f_m1'");
  r.f_m1 = get_score(j, "f_m1", line);
  if (j.contains("f_m2")) r.f_m2 = get_score(j, "f_m2", line);
  if (!j.contains("f_e")) fail(line, "missing field 'f_e'");
  r.f_e = get_score(j, "f_e", line);

  if (j.contains("v")) {
    r.v = get_bit(j.at("v"), "v", line);
  } else if (mode == SchemaMode::Test) {
    r.v = 1;
  } else {
    fail(line, "missing field 'v'");
  }
  if (j.contains("e")) r.e = get_bit(j.at("e"), "e", line);
  if (j.contains("em")) r.em = get_bit(j.at("em"), "em", line);

  if (r.v == 1 && !r.e.has_value()) {
    fail(line, "v=1 requires an entailment label 'e'");
  }
  if (mode == SchemaMode::Test && !r.e.has_value()) {
    fail(line, "test records require an entailment label 'e'");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKnownFields.count(it.key())) r.extras[it.key()] = it.value();
  }
  return r;
}

}  // namespace

Dataset parse_dataset(std::istream& in, SchemaMode mode,
                      const std::string& provenance) {
  Dataset ds;
  ds.provenance = provenance;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(lineno, std::string("malformed JSON: ") + e.what());
    }
    ScoredRecord r = parse_record(j, mode, lineno);
    if (!seen_ids.insert(r.id).second) {
      fail(lineno, "duplicate id '" + r.id + "'");
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Dataset load_dataset(const std::string& path, SchemaMode mode) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file: " + path);
  return parse_dataset(in, mode, path);
}

nlohmann::json record_to_json(const ScoredRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["f_m1"] = r.f_m1;
  if (r.f_m2) j["f_m2"] = *r.f_m2;
  j["f_e"] = r.f_e;
  if (r.e) j["e"] = *r.e;
  if (r.em) j["em"] = *r.em;
  j["v"] = r.v;
  for (auto it = r.extras.begin(); it != r.extras.end(); ++it) {
    j[it.key()] = it.value();
  }
  return j;
}

std::string to_jsonl(const Dataset& ds) {
  std::ostringstream out;
  for (const auto& r : ds.records) {
    out << record_to_json(r).dump() << '\n';
  }
  return out.str();
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write dataset file: " + path);
  out << to_jsonl(ds);
}

RecordRefs labeled_refs(const Dataset& ds) {
  RecordRefs refs;
  for (const auto& r : ds.records) {
    if (r.v == 1) refs.push_back(&r);
  }
  return refs;
}

RecordRefs unlabeled_refs(const Dataset& ds) {
  RecordRefs refs;
  for (const auto& r : ds.records) {
    if (r.v == 0) refs.push_back(&r);
  }
  return refs;
}

RecordRefs all_refs(const Dataset& ds) {
  RecordRefs refs;
  refs.reserve(ds.records.size());
  for (const auto& r : ds.records) refs.push_back(&r);
  return refs;
}

Dataset split_labeled_fraction(const Dataset& ds, double fraction,
                               std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ValidationError("split_labeled_fraction: fraction outside [0,1]");
  }
  Dataset out = ds;
  std::vector<std::size_t> labeled_idx;
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    if (out.records[i].v == 1) labeled_idx.push_back(i);
  }
  const auto keep =
      static_cast<std::size_t>(std::floor(fraction * labeled_idx.size()));
  Rng rng(seed);
  for (std::size_t i = labeled_idx.size(); i > 1; --i) {
    std::swap(labeled_idx[i - 1], labeled_idx[rng.bounded(i)]);
  }
  for (std::size_t i = keep; i < labeled_idx.size(); ++i) {
    out.records[labeled_idx[i]].v = 0;  // label stays on the record, ignored
  }
  return out;
}

}  // namespace selgen
