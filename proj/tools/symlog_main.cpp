#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "symlog/pipeline.hpp"

namespace {

// Exit codes: 0 success, 1 usage/config error, 2 verification failures
// present, 3 resource-cap abort.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kUnsound = 2;
constexpr int kResource = 3;

symlog::GenConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw symlog::ConfigError("cannot open config: " + path);
  symlog::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw symlog::ConfigError(path + ": invalid JSON: " + std::string(e.what()));
  }
  return symlog::GenConfig::from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symlog: symbolic reasoning-chain benchmark "
               "generator, verifier, solver and scorer"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a benchmark JSONL from a config");
  std::string gen_config, gen_out = "instances.jsonl", gen_manifest;
  std::uint64_t gen_seed = 0;
  bool gen_seed_set = false;
  gen->add_option("--config", gen_config, "Config JSON file");
  gen->add_option("--from-manifest", gen_manifest, "Replay a previous run's manifest");
  gen->add_option("--out", gen_out, "Output JSONL path")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Override the config seed")
      ->each([&](const std::string&) { gen_seed_set = true; });

  // stats
  auto* stats = app.add_subcommand("stats", "Dataset statistics for an instance JSONL");
  std::string stats_in, stats_out;
  stats->add_option("--in", stats_in, "Instance JSONL")->required();
  stats->add_option("--out", stats_out, "Write the statistics JSON here (default: stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Verify every reasoning chain in a JSONL");
  std::string verify_in, verify_out = "verify_report.jsonl";
  int verify_domain_bound = 3;
  verify->add_option("--in", verify_in, "Instance JSONL")->required();
  verify->add_option("--out", verify_out, "Report JSONL path")->capture_default_str();
  verify->add_option("--max-domain", verify_domain_bound, "Finite-model bound")
      ->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "Run the deterministic reasoning loop");
  std::string solve_in, solve_out = "predictions.jsonl", solve_heur;
  int solve_iters = 20;
  std::vector<std::string> solve_classes;
  solve->add_option("--in", solve_in, "Instance JSONL")->required();
  solve->add_option("--out", solve_out, "Prediction JSONL path")->capture_default_str();
  solve->add_option("--max-iters", solve_iters, "Iteration bound")->capture_default_str();
  solve->add_option("--heuristic-cmd", solve_heur,
                    "Heuristic provider command (line-oriented subprocess)");
  solve->add_option("--logic-classes", solve_classes,
                    "Restrict rule classes (PL FOL NM); default: the instance's class");

  // score
  auto* score = app.add_subcommand("score", "Score predictions against gold instances");
  std::string score_gold, score_pred, score_out = "report.json", score_table;
  score->add_option("--gold", score_gold, "Gold instance JSONL")->required();
  score->add_option("--pred", score_pred, "Prediction JSONL")->required();
  score->add_option("--out", score_out, "Report JSON path")->capture_default_str();
  score->add_option("--table", score_table, "Also write an aligned text table here");

  // rules-dump
  auto* rules = app.add_subcommand("rules-dump", "Dump the rule catalog as JSON");
  std::string rules_out;
  rules->add_option("--out", rules_out, "Write the catalog here (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      symlog::GenStats gs;
      if (!gen_manifest.empty()) {
        gs = symlog::generate_from_manifest(gen_manifest, gen_out);
      } else {
        if (gen_config.empty()) {
          throw symlog::ConfigError("generate requires --config or --from-manifest");
        }
        symlog::GenConfig config = load_config(gen_config);
        if (gen_seed_set) config.seed = gen_seed;
        gs = symlog::generate_dataset(config, gen_out);
      }
      std::cerr << "generated " << gs.accepted << "/" << gs.requested << " instances -> "
                << gen_out << "\n";
      for (const auto& [reason, n] : gs.rejections) {
        std::cerr << "  rejected (" << reason << "): " << n << "\n";
      }
      return kOk;
    }
    if (stats->parsed()) {
      symlog::json j = symlog::dataset_stats(stats_in);
      if (stats_out.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream out(stats_out, std::ios::binary);
        out << j.dump(2) << "\n";
      }
      return kOk;
    }
    if (verify->parsed()) {
      symlog::OracleLimits limits;
      limits.max_fol_domain = verify_domain_bound;
      symlog::VerifySummary s = symlog::verify_file(verify_in, verify_out, limits);
      std::cerr << "verified " << s.total << " instances, " << s.unsound << " unsound -> "
                << verify_out << "\n";
      return s.unsound > 0 ? kUnsound : kOk;
    }
    if (solve->parsed()) {
      symlog::SolveFileOptions opts;
      opts.max_iterations = solve_iters;
      opts.heuristic_command = solve_heur;
      for (const auto& c : solve_classes) {
        opts.classes.insert(symlog::logic_class_from_string(c));
      }
      symlog::solve_file(solve_in, solve_out, opts);
      std::cerr << "solved -> " << solve_out << "\n";
      return kOk;
    }
    if (score->parsed()) {
      symlog::EvalReport report =
          symlog::score_files(score_gold, score_pred, score_out, score_table);
      std::cout << symlog::report_to_table(report);
      return kOk;
    }
    if (rules->parsed()) {
      symlog::json j = symlog::rules_dump();
      if (rules_out.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream out(rules_out, std::ios::binary);
        out << j.dump(2) << "\n";
      }
      return kOk;
    }
  } catch (const symlog::CapExceededError& e) {
    std::cerr << "error (resource cap): " << e.what() << "\n";
    return kResource;
  } catch (const symlog::ConfigError& e) {
    std::cerr << "error (config): " << e.what() << "\n";
    return kUsage;
  } catch (const symlog::DataError& e) {
    std::cerr << "error (data): " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
