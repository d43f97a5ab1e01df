#include "selgen/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "selgen/simulator.hpp"

namespace selgen {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

nlohmann::json selector_to_json(const Selector& sel) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : sel.terms) {
    terms.push_back({{"score", to_string(t.key)}, {"threshold", t.threshold}});
  }
  return nlohmann::json{{"terms", terms}};
}

Selector selector_from_json(const nlohmann::json& j) {
  const nlohmann::json& body = j.contains("selector") ? j.at("selector") : j;
  Selector sel;
  for (const auto& t : body.at("terms")) {
    sel.terms.push_back({score_key_from_string(t.at("score").get<std::string>()),
                         t.at("threshold").get<double>()});
  }
  sel.validate();
  return sel;
}

nlohmann::json result_to_json(const CertifiedResult& res, Method method) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& ev : res.trace) {
    nlohmann::json t{{"iter", ev.iter1},       {"tau1", ev.tau1},
                     {"bound", ev.bound},      {"feasible", ev.feasible},
                     {"n_selected", ev.n_selected}};
    if (ev.iter2 > 0) t["inner_iter"] = ev.iter2;
    if (ev.tau2) t["tau2"] = *ev.tau2;
    if (ev.loss_count >= 0) t["loss_count"] = ev.loss_count;
    trace.push_back(std::move(t));
  }
  nlohmann::json diagnostics{{"trace", trace},
                             {"iterations", res.iterations},
                             {"per_eval_delta_s", res.per_eval_delta_s},
                             {"per_eval_delta_e", res.per_eval_delta_e},
                             {"per_eval_delta_w", res.per_eval_delta_w},
                             {"per_eval_delta", res.per_eval_delta},
                             {"per_eval_q", res.per_eval_q}};
  return nlohmann::json{{"method", to_string(method)},
                        {"score_set_used", res.score_set_used},
                        {"selector", selector_to_json(res.selector)},
                        {"u_hat", res.u_hat},
                        {"bounded", to_string(res.bounded)},
                        {"diagnostics", diagnostics}};
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j{{"command", cfg.command},
                   {"method", to_string(cfg.method)},
                   {"score_key", to_string(cfg.score_key)},
                   {"eps", cfg.eps},
                   {"delta", cfg.delta},
                   {"delta_w", cfg.delta_w},
                   {"q", cfg.q},
                   {"tau_pl", cfg.tau_pl},
                   {"psl_filter", cfg.psl_filter},
                   {"claim", cfg.claim},
                   {"trials", cfg.trials},
                   {"n", cfg.n},
                   {"n_e", cfg.n_e},
                   {"n_u", cfg.n_u},
                   {"labeled_fraction", cfg.labeled_fraction},
                   {"n_splits", cfg.n_splits},
                   {"calib_ratio", cfg.calib_ratio},
                   {"keep_shadow", cfg.keep_shadow},
                   {"sim_mode", cfg.sim_mode}};
  if (cfg.delta_s_override) j["delta_s"] = *cfg.delta_s_override;
  if (cfg.delta_e_override) j["delta_e"] = *cfg.delta_e_override;
  if (cfg.seed) j["seed"] = *cfg.seed;
  if (!cfg.data_path.empty()) j["data"] = cfg.data_path;
  if (!cfg.selector_path.empty()) j["selector"] = cfg.selector_path;
  if (!cfg.world_path.empty()) j["world"] = cfg.world_path;
  return j;
}

class Runner {
 public:
  explicit Runner(const RunConfig& cfg) : cfg_(cfg) {
    std::string dir = cfg.out_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("SELGEN_OUT_DIR")) dir = env;
    }
    if (dir.empty()) dir = ".";
    out_dir_ = dir;
    fs::create_directories(out_dir_);
  }

  int run() {
    if (cfg_.command == "calibrate") return calibrate();
    if (cfg_.command == "apply") return apply();
    if (cfg_.command == "evaluate") return evaluate_cmd();
    if (cfg_.command == "simulate") return simulate();
    if (cfg_.command == "verify-pac") return verify_pac();
    if (cfg_.command == "report") return report();
    throw ValidationError("unknown command: " + cfg_.command);
  }

 private:
  void note_input(const std::string& path) {
    inputs_.push_back({{"path", path}, {"fnv1a64", fnv1a64_hex(read_file(path))}});
  }

  void write_artifact(const std::string& name, const std::string& content) {
    write_file_atomic(out_dir_ / name, content);
    outputs_.push_back(name);
  }

  void write_json(const std::string& name, const nlohmann::json& j) {
    write_artifact(name, j.dump(2) + "\n");
  }

  void write_manifest() {
    nlohmann::json manifest{
        {"config", config_to_json(cfg_)},
        {"versions",
         {{"selgen", kVersion}, {"nlohmann_json", NLOHMANN_JSON_VERSION_MAJOR},
          {"compiler", __VERSION__}}},
        {"inputs", inputs_},
        {"outputs", outputs_}};
    write_file_atomic(out_dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

  std::uint64_t seed() const { return cfg_.seed.value_or(0); }

  int calibrate() {
    note_input(cfg_.data_path);
    Dataset ds = load_dataset(cfg_.data_path, SchemaMode::Calibration);
    if (cfg_.labeled_fraction < 1.0) {
      ds = split_labeled_fraction(ds, cfg_.labeled_fraction, seed());
    }
    PslConfig psl{cfg_.tau_pl, cfg_.psl_filter};
    const CertifiedResult res =
        run_method(cfg_.method, cfg_.score_key, labeled_refs(ds),
                   unlabeled_refs(ds), cfg_.budget(), psl);
    write_json("certified_result.json", result_to_json(res, cfg_.method));
    write_manifest();
    return res.bounded == Bounded::Success ? kExitOk : kExitCertFail;
  }

  int apply() {
    note_input(cfg_.selector_path);
    note_input(cfg_.data_path);
    const Selector sel =
        selector_from_json(nlohmann::json::parse(read_file(cfg_.selector_path)));
    const Dataset ds = load_dataset(cfg_.data_path, SchemaMode::Calibration);
    std::ostringstream out;
    for (const auto& r : ds.records) {
      const bool accept = apply_selector(sel, r) == Decision::Accept;
      out << nlohmann::json{{"id", r.id},
                            {"decision", accept ? "accept" : "idk"}}
                 .dump()
          << '\n';
    }
    write_artifact("decisions.jsonl", out.str());
    write_manifest();
    return kExitOk;
  }

  int evaluate_cmd() {
    note_input(cfg_.selector_path);
    note_input(cfg_.data_path);
    const Selector sel =
        selector_from_json(nlohmann::json::parse(read_file(cfg_.selector_path)));
    const Dataset ds = load_dataset(cfg_.data_path, SchemaMode::Test);
    const EvalReport rep = evaluate(sel, ds);
    write_json("eval_report.json", rep.to_json());
    write_manifest();
    return kExitOk;
  }

  int simulate() {
    note_input(cfg_.world_path);
    WorldSpec w = WorldSpec::from_json(nlohmann::json::parse(read_file(cfg_.world_path)));
    if (cfg_.seed) w.seed = *cfg_.seed;
    Dataset ds = sample_dataset(w, cfg_.n);
    if (cfg_.sim_mode == "test") {
      for (auto& r : ds.records) r.v = 1;
    } else if (cfg_.sim_mode == "calibration") {
      if (!cfg_.keep_shadow) {
        for (auto& r : ds.records) {
          if (r.v == 0) r.e.reset();  // hide the shadow label
        }
      }
    } else {
      throw ValidationError("simulate: sim_mode must be calibration or test");
    }
    write_artifact("dataset.jsonl", to_jsonl(ds));
    write_manifest();
    return kExitOk;
  }

  int verify_pac() {
    note_input(cfg_.world_path);
    WorldSpec w = WorldSpec::from_json(nlohmann::json::parse(read_file(cfg_.world_path)));
    if (cfg_.seed) w.seed = *cfg_.seed;
    AuditParams p;
    p.trials = cfg_.trials;
    p.n_e = cfg_.n_e;
    p.n_u = cfg_.n_u;
    p.budget = cfg_.budget();
    p.eps_e = cfg_.eps;
    p.delta_e = cfg_.delta;
    p.delta_s = cfg_.delta;
    p.delta = cfg_.delta;
    const AuditReport rep = mc_verify(claim_from_string(cfg_.claim), w, p);
    write_json("audit.json", rep.to_json());
    write_manifest();
    return rep.pass ? kExitOk : kExitCertFail;
  }

  int report() {
    note_input(cfg_.data_path);
    const Dataset ds = load_dataset(cfg_.data_path, SchemaMode::Test);
    RepeatedSplitConfig rcfg;
    rcfg.method = cfg_.method;
    rcfg.score_key = cfg_.score_key;
    rcfg.budget = cfg_.budget();
    rcfg.psl = PslConfig{cfg_.tau_pl, cfg_.psl_filter};
    rcfg.n_splits = cfg_.n_splits;
    rcfg.calib_ratio = cfg_.calib_ratio;
    rcfg.labeled_fraction = cfg_.labeled_fraction;
    rcfg.seed = seed();
    SplitSummary summary;
    const auto reports = repeated_splits(ds, rcfg, &summary);
    write_artifact("splits.csv", splits_to_csv(reports));
    write_json("split_summary.json", summary.to_json());
    write_manifest();
    return kExitOk;
  }

  RunConfig cfg_;
  fs::path out_dir_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
};

}  // namespace

RiskBudget RunConfig::budget() const {
  RiskBudget b = default_budget(eps, delta, q, delta_w);
  if (delta_s_override) b.delta_s = *delta_s_override;
  if (delta_e_override) b.delta_e = *delta_e_override;
  b.validate();
  return b;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run_command(const RunConfig& cfg) {
  try {
    Runner runner(cfg);
    return runner.run();
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace selgen
