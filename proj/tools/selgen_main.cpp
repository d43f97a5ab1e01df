#include <CLI11.hpp>

#include "selgen/cli.hpp"

namespace {

void add_budget_flags(CLI::App* cmd, selgen::RunConfig& cfg) {
  cmd->add_option("--eps", cfg.eps, "Target FDR-E level epsilon");
  cmd->add_option("--delta", cfg.delta, "Total confidence budget delta");
  cmd->add_option("--delta-w", cfg.delta_w, "Visibility-weight budget delta_W");
  cmd->add_option_function<double>(
      "--delta-s", [&cfg](double v) { cfg.delta_s_override = v; },
      "Override delta_S (default (delta-delta_W)/2)");
  cmd->add_option_function<double>(
      "--delta-e", [&cfg](double v) { cfg.delta_e_override = v; },
      "Override delta_E (default (delta-delta_W)/2)");
  cmd->add_option("--q", cfg.q, "epsilon_E grid size Q");
}

void add_method_flags(CLI::App* cmd, selgen::RunConfig& cfg,
                      std::string& method, std::string& score_key) {
  cmd->add_option("--method", method,
                  "semi-ms | semi-single | semi-double | sup | psl | em");
  cmd->add_option("--score-key", score_key, "f_m1 | f_m2");
  cmd->add_option("--tau-pl", cfg.tau_pl, "Pseudo-label threshold (psl)");
  cmd->add_flag("--filter", cfg.psl_filter, "Enable the psl confidence filter");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective generation calibration with PAC FDR-E control"};
  app.require_subcommand(1);

  selgen::RunConfig cfg;
  std::string method = "semi-ms";
  std::string score_key = "f_m1";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for all randomness")
        ->each([&](const std::string&) { seed_set = true; });
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", cfg.out_dir,
                    "Output directory (default $SELGEN_OUT_DIR or .)");
  };

  CLI::App* calibrate = app.add_subcommand("calibrate", "Learn a selector");
  calibrate->add_option("--data", cfg.data_path, "Calibration JSONL")->required();
  add_method_flags(calibrate, cfg, method, score_key);
  add_budget_flags(calibrate, cfg);
  calibrate->add_option("--labeled-fraction", cfg.labeled_fraction,
                        "Keep this fraction of labeled records labeled");
  add_seed(calibrate);
  add_out(calibrate);

  CLI::App* apply = app.add_subcommand("apply", "Apply a selector to data");
  apply->add_option("--selector", cfg.selector_path,
                    "Selector or certified-result JSON")->required();
  apply->add_option("--data", cfg.data_path, "JSONL to decide on")->required();
  add_out(apply);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a selector on labeled data");
  evaluate->add_option("--selector", cfg.selector_path,
                       "Selector or certified-result JSON")->required();
  evaluate->add_option("--data", cfg.data_path, "Labeled test JSONL")->required();
  add_out(evaluate);

  CLI::App* simulate = app.add_subcommand("simulate", "Sample a synthetic dataset");
  simulate->add_option("--world", cfg.world_path, "WorldSpec JSON")->required();
  simulate->add_option("--n", cfg.n, "Number of records");
  simulate->add_option("--mode", cfg.sim_mode, "calibration | test");
  simulate->add_flag("--keep-shadow", cfg.keep_shadow,
                     "Keep hidden labels on v=0 records");
  add_seed(simulate);
  add_out(simulate);

  CLI::App* verify = app.add_subcommand("verify-pac", "Monte-Carlo audit of a PAC claim");
  verify->add_option("--world", cfg.world_path, "WorldSpec JSON")->required();
  verify->add_option("--claim", cfg.claim, "fer | u_ssl | theorem1 | theorem2");
  verify->add_option("--trials", cfg.trials, "Number of independent trials");
  verify->add_option("--n-e", cfg.n_e, "Labeled draw size per trial");
  verify->add_option("--n-u", cfg.n_u, "Unlabeled draw size per trial");
  add_budget_flags(verify, cfg);
  add_seed(verify);
  add_out(verify);

  CLI::App* report = app.add_subcommand("report", "Repeated-split evaluation");
  report->add_option("--data", cfg.data_path, "Labeled JSONL")->required();
  add_method_flags(report, cfg, method, score_key);
  add_budget_flags(report, cfg);
  report->add_option("--splits", cfg.n_splits, "Number of random splits");
  report->add_option("--calib-ratio", cfg.calib_ratio,
                     "Fraction of records in the calibration half");
  report->add_option("--labeled-fraction", cfg.labeled_fraction,
                     "Keep this fraction of labeled records labeled");
  add_seed(report);
  add_out(report);

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.method = selgen::method_from_string(method);
    cfg.score_key = selgen::score_key_from_string(score_key);
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return selgen::kExitValidation;
  }
  if (seed_set) cfg.seed = seed;
  cfg.command = app.get_subcommands().front()->get_name();
  return selgen::run_command(cfg);
}
