#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoisim/harness.hpp"

using namespace aoisim;

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information scheduling simulator for multihop wireless networks"};
  app.require_subcommand(1);

  // run
  std::string config_path, policy_override, out_dir = ".";
  long long slots_override = -1;
  int trials_override = -1;
  long long seed_override = -1;
  bool trace = false;
  auto* run = app.add_subcommand("run", "Run one experiment from a config file");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--policy", policy_override, "Policy override");
  run->add_option("--slots", slots_override, "Slots per trial override");
  run->add_option("--trials", trials_override, "Trial count override");
  run->add_option("--seed", seed_override, "Base seed override");
  run->add_option("--out", out_dir, "Output directory (default .)");
  run->add_flag("--trace", trace, "Write a per-slot trace CSV for trial 0");

  // reproduce-table
  int table = 0;
  std::string table_out = ".";
  long long table_slots = 10000;
  int table_trials = 100;
  long long table_seed = 1;
  auto* rep = app.add_subcommand("reproduce-table", "Run a bundled experiment table (1-6)");
  rep->add_option("table", table, "Table number, 1-6")->required();
  rep->add_option("--out", table_out, "Output directory (default .)");
  rep->add_option("--slots", table_slots, "Slots per trial (default 10000)");
  rep->add_option("--trials", table_trials, "Trials (default 100)");
  rep->add_option("--seed", table_seed, "Base seed (default 1)");

  // lower-bound
  double lb_p = 0.0, lb_q = 0.0;
  int lb_hops = 0;
  auto* lb = app.add_subcommand("lower-bound", "Closed-form single-flow age lower bound");
  lb->add_option("--p", lb_p, "Arrival probability")->required();
  lb->add_option("--q", lb_q, "Channel success probability")->required();
  lb->add_option("--hops", lb_hops, "Number of links on the path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      if (!policy_override.empty()) cfg.policy.kind = policy_from_name(policy_override);
      if (slots_override > 0) cfg.slots = slots_override;
      if (trials_override > 0) cfg.trials = trials_override;
      if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);

      ExperimentContext ctx(cfg);
      std::vector<TrialResult> trials;
      for (int i = 0; i < cfg.trials; ++i) {
        if (trace && i == 0) {
          std::ofstream tf(out_dir + "/trace.csv", std::ios::binary);
          trials.push_back(run_trial(ctx, i, &tf));
        } else {
          trials.push_back(run_trial(ctx, i));
        }
      }
      auto summary = summarize(ctx, trials);
      std::vector<SummaryTable> tables{summary};
      emit_outputs(tables, out_dir, "summary");
      std::cout << to_text(tables);
    } else if (rep->parsed()) {
      auto configs = table_configs(table, table_slots, table_trials,
                                   static_cast<uint64_t>(table_seed));
      std::vector<SummaryTable> tables;
      for (const auto& cfg : configs) {
        std::cerr << "running " << policy_name(cfg.policy.kind) << " ..." << std::endl;
        tables.push_back(run_experiment(cfg));
      }
      std::string stem = "table" + std::to_string(table);
      emit_outputs(tables, table_out, stem);
      std::cout << to_text(tables);
    } else if (lb->parsed()) {
      std::printf("%.6f\n", lower_bound(lb_p, lb_q, lb_hops));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
