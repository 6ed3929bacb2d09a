// Command-line front end: train / eval / sweep / ablate-fps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "goalmap/experiment.hpp"

using namespace goalmap;

namespace {

RunConfig load_base_config(int argc, char** argv) {
  // --env and --config decide the defaults, so scan them before the real parse
  std::string env = "FourRoom", config_path;
  for (int i = 1; i + 1 < argc; ++i) {
    std::string a = argv[i];
    if (a == "--env") env = argv[i + 1];
    if (a == "--config") config_path = argv[i + 1];
  }
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw std::runtime_error("cannot open config " + config_path);
    nlohmann::json j = nlohmann::json::parse(f);
    if (j.contains("env") && env == "FourRoom") env = j.at("env").get<std::string>();
    RunConfig cfg = default_config(env);
    from_json(j, cfg);
    return cfg;
  }
  return default_config(env);
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file; CLI flags override it");
  cmd->add_option("--env", cfg.env, "FourRoom | 2DReach | 2DPush");
  cmd->add_option("--steps", cfg.total_env_steps, "total env steps per seed");
  cmd->add_option("--eval-every", cfg.eval_every);
  cmd->add_option("--eval-episodes", cfg.eval_episodes);
  cmd->add_option("--seeds", cfg.seeds)->delimiter(',');
  cmd->add_option("--gamma", cfg.gamma);
  cmd->add_option("--eps-start", cfg.eps.eps_start);
  cmd->add_option("--eps-end", cfg.eps.eps_end);
  cmd->add_option("--eps-decay-frac", cfg.eps.decay_frac);
  cmd->add_option("--her-k", cfg.her.k, "hindsight relabel horizon");
  cmd->add_option("--her-ratio", cfg.her.ratio);
  cmd->add_option("--her-capacity", cfg.her.capacity);
  cmd->add_option("--presample", cfg.map.presample_m);
  cmd->add_option("--landmarks", cfg.map.n_landmarks);
  cmd->add_option("--tau", cfg.map.tau, "edge clip threshold");
  cmd->add_option_function<std::string>(
      "--fps-metric", [&cfg](const std::string& s) { cfg.map.fps_metric = fps_mode_from(s); },
      "euclidean | uvfa");
  cmd->add_flag("--planner,!--no-planner", cfg.planner, "landmark planning vs flat UVFA");
  cmd->add_flag("--uniform-landmarks", cfg.uniform_landmarks);
  cmd->add_flag("--fixed-start", cfg.fixed_start);
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--hidden", cfg.hidden)->delimiter(',');
  cmd->add_option("--lr", cfg.lr);
  cmd->add_option("--batch-size", cfg.batch_size);
  cmd->add_option("--train-every", cfg.train_every);
  cmd->add_option("--warmup-steps", cfg.warmup_steps);
  cmd->add_option("--polyak-tau", cfg.polyak_tau);
  cmd->add_option("--checkpoint-every", cfg.checkpoint_every);
  cmd->add_option("--probe-pairs", cfg.probe_pairs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"landmark-based map planning over a goal-conditioned value network"};
  app.require_subcommand(1);

  RunConfig cfg;
  try {
    cfg = load_base_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::string config_path;

  auto* train = app.add_subcommand("train", "train and evaluate per seed, write metrics.csv");
  add_common_flags(train, cfg, config_path);

  auto* eval = app.add_subcommand("eval", "evaluate a stored checkpoint + buffer snapshot");
  std::string ck_path, buf_path, mode = "planner";
  long eval_step = 0;
  add_common_flags(eval, cfg, config_path);
  eval->add_option("--checkpoint", ck_path, "agent checkpoint JSON")->required();
  eval->add_option("--buffer", buf_path, "replay buffer snapshot (needed for planner mode)");
  eval->add_option("--mode", mode, "planner | flat");
  eval->add_option("--step", eval_step, "nominal step label for the output row");

  auto* sweep = app.add_subcommand("sweep", "(n_landmarks, tau) sensitivity grid");
  std::vector<int> grid_landmarks = {5, 15, 40, 100};
  std::vector<double> grid_taus = {3.0, 6.0, 10.0, 15.0};
  add_common_flags(sweep, cfg, config_path);
  sweep->add_option("--grid-landmarks", grid_landmarks)->delimiter(',');
  sweep->add_option("--grid-taus", grid_taus)->delimiter(',');

  auto* ablate = app.add_subcommand("ablate-fps", "FPS vs uniform landmark selection");
  add_common_flags(ablate, cfg, config_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) {
      auto rows = run_experiment(cfg);
      std::cout << metrics_csv_header() << "\n";
      for (const auto& r : rows) std::cout << metric_row_csv(r) << "\n";
    } else if (app.got_subcommand(eval)) {
      std::ifstream f(ck_path);
      if (!f) throw std::runtime_error("cannot open checkpoint " + ck_path);
      UvfaAgent agent = agent_from_json(nlohmann::json::parse(f));
      cfg.env = env_name_str(agent.env.name);
      cfg.planner = (mode == "planner");
      EnvSpec spec = agent.env;
      ReplayBuffer buffer(spec, 1, 1, 0.0);
      if (cfg.planner) {
        if (buf_path.empty()) throw std::runtime_error("planner mode needs --buffer");
        buffer = load_buffer(buf_path);
      }
      std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds[0];
      ProbeSet probe = make_probe_set(spec, seed, cfg.probe_pairs, cfg.fixed_start);
      EvalContext ctx{spec, cfg, seed, probe};
      MetricRow row = evaluate(ctx, agent, buffer, eval_step);
      std::cout << metrics_csv_header() << "\n" << metric_row_csv(row) << "\n";
      if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_metrics_csv(cfg.out_dir + "/metrics.csv", {row});
      }
    } else if (app.got_subcommand(sweep)) {
      auto cells = sweep_landmarks_tau(cfg, grid_landmarks, grid_taus);
      std::cout << "n_landmarks,tau,seed,success_rate\n";
      for (const auto& c : cells)
        std::printf("%d,%.6f,%llu,%.6f\n", c.n_landmarks, c.tau,
                    static_cast<unsigned long long>(c.seed), c.success_rate);
    } else if (app.got_subcommand(ablate)) {
      auto [fps_rows, uni_rows] = ablation_fps_vs_uniform(cfg);
      std::cout << "mode," << metrics_csv_header() << "\n";
      for (const auto& r : fps_rows) std::cout << "fps," << metric_row_csv(r) << "\n";
      for (const auto& r : uni_rows) std::cout << "uniform," << metric_row_csv(r) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
