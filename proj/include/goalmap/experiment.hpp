#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "goalmap/agent.hpp"
#include "goalmap/core.hpp"
#include "goalmap/env.hpp"
#include "goalmap/map.hpp"
#include "goalmap/planner.hpp"
#include "goalmap/replay.hpp"

namespace goalmap {

struct HerParams {
  int k = 50;
  double ratio = 0.8;
  size_t capacity = 500000;
};

struct MapParams {
  int presample_m = 1000;
  int n_landmarks = 100;
  double tau = 10.0;
  FpsMode fps_metric = FpsMode::Euclidean;
};

struct RunConfig {
  std::string env = "FourRoom";
  long total_env_steps = 100000;
  long eval_every = 5000;
  int eval_episodes = 50;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  double gamma = 0.99;
  EpsSchedule eps;
  HerParams her;
  MapParams map;
  bool planner = true;             // landmark planning vs flat UVFA baseline
  bool uniform_landmarks = false;  // replace FPS with uniform index picks
  bool fixed_start = false;        // fixed start + fixed far goal (FPS ablation setting)
  std::string out_dir;

  // training-loop knobs
  std::vector<int> hidden = {256, 256};
  double lr = 1e-3;
  int batch_size = 64;
  int train_every = 4;
  long warmup_steps = 500;
  double polyak_tau = 0.05;
  long checkpoint_every = 0;  // 0: final checkpoint only
  int probe_pairs = 64;
  bool save_buffer_snapshot = true;
};

inline RunConfig default_config(const std::string& env) {
  RunConfig c;
  c.env = env;
  EnvName n = env_name_from(env);
  if (n == EnvName::FourRoom) {
    c.total_env_steps = 100000;
    c.her.k = 50;
    c.checkpoint_every = 25000;
  } else {
    c.total_env_steps = 300000;
    c.her.k = 100;
    c.checkpoint_every = 50000;
  }
  return c;
}

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"env", c.env},
                     {"total_env_steps", c.total_env_steps},
                     {"eval_every", c.eval_every},
                     {"eval_episodes", c.eval_episodes},
                     {"seeds", c.seeds},
                     {"gamma", c.gamma},
                     {"eps_start", c.eps.eps_start},
                     {"eps_end", c.eps.eps_end},
                     {"eps_decay_frac", c.eps.decay_frac},
                     {"her_k", c.her.k},
                     {"her_ratio", c.her.ratio},
                     {"her_capacity", c.her.capacity},
                     {"map_presample", c.map.presample_m},
                     {"map_landmarks", c.map.n_landmarks},
                     {"map_tau", c.map.tau},
                     {"map_fps_metric", fps_mode_str(c.map.fps_metric)},
                     {"planner", c.planner},
                     {"uniform_landmarks", c.uniform_landmarks},
                     {"fixed_start", c.fixed_start},
                     {"out_dir", c.out_dir},
                     {"hidden", c.hidden},
                     {"lr", c.lr},
                     {"batch_size", c.batch_size},
                     {"train_every", c.train_every},
                     {"warmup_steps", c.warmup_steps},
                     {"polyak_tau", c.polyak_tau},
                     {"checkpoint_every", c.checkpoint_every},
                     {"probe_pairs", c.probe_pairs},
                     {"save_buffer_snapshot", c.save_buffer_snapshot}};
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
  RunConfig d;
  c.env = j.value("env", d.env);
  c.total_env_steps = j.value("total_env_steps", d.total_env_steps);
  c.eval_every = j.value("eval_every", d.eval_every);
  c.eval_episodes = j.value("eval_episodes", d.eval_episodes);
  c.seeds = j.value("seeds", d.seeds);
  c.gamma = j.value("gamma", d.gamma);
  c.eps.eps_start = j.value("eps_start", d.eps.eps_start);
  c.eps.eps_end = j.value("eps_end", d.eps.eps_end);
  c.eps.decay_frac = j.value("eps_decay_frac", d.eps.decay_frac);
  c.her.k = j.value("her_k", d.her.k);
  c.her.ratio = j.value("her_ratio", d.her.ratio);
  c.her.capacity = j.value("her_capacity", d.her.capacity);
  c.map.presample_m = j.value("map_presample", d.map.presample_m);
  c.map.n_landmarks = j.value("map_landmarks", d.map.n_landmarks);
  c.map.tau = j.value("map_tau", d.map.tau);
  c.map.fps_metric = fps_mode_from(j.value("map_fps_metric", std::string("euclidean")));
  c.planner = j.value("planner", d.planner);
  c.uniform_landmarks = j.value("uniform_landmarks", d.uniform_landmarks);
  c.fixed_start = j.value("fixed_start", d.fixed_start);
  c.out_dir = j.value("out_dir", d.out_dir);
  c.hidden = j.value("hidden", d.hidden);
  c.lr = j.value("lr", d.lr);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.train_every = j.value("train_every", d.train_every);
  c.warmup_steps = j.value("warmup_steps", d.warmup_steps);
  c.polyak_tau = j.value("polyak_tau", d.polyak_tau);
  c.checkpoint_every = j.value("checkpoint_every", d.checkpoint_every);
  c.probe_pairs = j.value("probe_pairs", d.probe_pairs);
  c.save_buffer_snapshot = j.value("save_buffer_snapshot", d.save_buffer_snapshot);
}

struct MetricRow {
  long step = 0;
  std::uint64_t seed = 0;
  double success_rate = 0.0;
  double mde = 0.0;
  double max_dist_est = 0.0;
  double mean_episode_len = 0.0;
};

inline std::string metrics_csv_header() {
  return "step,seed,success_rate,mde,max_dist_est,mean_episode_len";
}

inline std::string metric_row_csv(const MetricRow& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%ld,%llu,%.6f,%.6f,%.6f,%.6f", r.step,
                static_cast<unsigned long long>(r.seed), r.success_rate, r.mde, r.max_dist_est,
                r.mean_episode_len);
  return buf;
}

inline void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << metrics_csv_header() << '\n';
  for (const auto& r : rows) f << metric_row_csv(r) << '\n';
  if (!f) throw std::runtime_error("write failed for " + path);
}

// Mean distortion error: mean over pairs of |pred - truth| / truth. Pairs
// with zero ground-truth distance must be excluded by the caller.
inline double mde(const std::vector<double>& pred, const std::vector<double>& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("mde: length mismatch");
  if (pred.empty()) throw std::invalid_argument("mde: empty input");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (!(truth[i] > 0.0)) throw std::invalid_argument("mde: nonpositive truth entry");
    acc += std::abs(pred[i] - truth[i]) / truth[i];
  }
  return acc / pred.size();
}

// --- evaluation distributions -------------------------------------------

inline State fixed_start_state(const EnvSpec& spec) {
  State s;
  switch (spec.name) {
    case EnvName::FourRoom: s.v = vec2(1, 1); break;
    case EnvName::Reach2D: s.v = vec2(2.0, 12.0); break;
    case EnvName::Push2D: s.v = vec4(2.0, 12.0, 3.2, 12.0); break;
  }
  return s;
}

inline Goal fixed_far_goal(const EnvSpec& spec) {
  Goal g;
  g.v = spec.name == EnvName::FourRoom ? vec2(9, 9) : vec2(2.0, 3.0);
  return g;
}

namespace detail {

inline SmallVec uniform_in_box(std::mt19937_64& rng, double x0, double x1, double y0, double y1) {
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  return vec2(ux(rng), uy(rng));
}

}  // namespace detail

// Test-time distribution: FourRoom starts in the lower-left room with goals in
// the diagonally opposite room; the 2D mazes start above the wall with goals
// across the U-bend. Fixed-start mode pins both endpoints.
inline std::pair<State, Goal> eval_reset(const EnvSpec& spec, bool fixed_start,
                                         std::mt19937_64& rng) {
  if (fixed_start) return {fixed_start_state(spec), fixed_far_goal(spec)};
  State s;
  Goal g;
  if (spec.name == EnvName::FourRoom) {
    std::uniform_int_distribution<int> cell(0, 4);
    s.v = vec2(cell(rng), cell(rng));
    g.v = vec2(6 + cell(rng), 6 + cell(rng));
    return {s, g};
  }
  if (spec.name == EnvName::Reach2D) {
    s.v = detail::uniform_in_box(rng, 0.5, 6.0, 9.0, 14.5);
    g.v = detail::uniform_in_box(rng, 0.5, 6.0, 0.5, 6.0);
    return {s, g};
  }
  // Push2D: block B spawns near A above the wall, goal across the bend.
  SmallVec a = detail::uniform_in_box(rng, 0.5, 6.0, 9.0, 14.5);
  std::uniform_real_distribution<double> ur(0.6, 2.0), uang(0.0, 2.0 * std::numbers::pi);
  SmallVec b;
  while (true) {
    double r = ur(rng), ang = uang(rng);
    b = vec2(a[0] + r * std::cos(ang), a[1] + r * std::sin(ang));
    if (point_free(spec, b[0], b[1])) break;
  }
  s.v = vec4(a[0], a[1], b[0], b[1]);
  g.v = detail::uniform_in_box(rng, 0.5, 6.0, 0.5, 6.0);
  return {s, g};
}

// Training distribution: uniform free start and goal, goal resampled until it
// is not already satisfied at reset. Fixed-start mode uses the pinned pair.
inline std::pair<State, Goal> train_reset(const EnvSpec& spec, bool fixed_start,
                                          std::mt19937_64& rng) {
  if (fixed_start) return {fixed_start_state(spec), fixed_far_goal(spec)};
  State s = random_free_state(spec, rng);
  Goal g = random_free_goal(spec, rng);
  while (goal_reached(spec, proj(spec, s), g)) g = random_free_goal(spec, rng);
  return {s, g};
}

// Fixed state-goal pairs with known ground-truth distances, used for MDE and
// max-distance metrics. Seeded independently of everything the training loop
// touches so no probe pair can leak into HER relabeling.
struct ProbeSet {
  std::vector<State> s;
  std::vector<Goal> g;
  std::vector<double> dgt;
};

inline ProbeSet make_probe_set(const EnvSpec& spec, std::uint64_t seed, int count,
                               bool fixed_start) {
  ProbeSet p;
  auto rng = make_rng(seed, Stream::ProbeSet);
  int guard = 0;
  while (static_cast<int>(p.s.size()) < count) {
    auto [s, g] = eval_reset(spec, false, rng);
    if (fixed_start) s = fixed_start_state(spec);
    double d = ground_truth_distance(spec, s, g);
    if (!(d > 0.0) || std::isinf(d)) {
      if (++guard > 100 * count) throw std::runtime_error("probe set: cannot find valid pairs");
      continue;
    }
    p.s.push_back(s);
    p.g.push_back(g);
    p.dgt.push_back(d);
  }
  return p;
}

// --- evaluation -----------------------------------------------------------

// The planner's distance estimate for a probe pair: routed through the map
// when some vertex qualifies, the flat estimate otherwise (which is also what
// the acting planner falls back to).
template <typename Agent>
double planner_distance_estimate(const State& s, const LandmarkGraph& g, const Agent& agent) {
  return next_subgoal(s, g, agent).est_total;
}

struct EvalContext {
  const EnvSpec& spec;
  const RunConfig& cfg;
  std::uint64_t seed;
  const ProbeSet& probe;
};

namespace detail {

// Presample + landmark selection, shared by training, evaluation and dumps.
template <typename Agent>
LandmarkSet select_landmarks(const RunConfig& cfg, const EnvSpec& spec, const Agent& agent,
                             const ReplayBuffer& buffer, std::mt19937_64& map_rng) {
  std::vector<State> pts = presample(buffer, cfg.map.presample_m, map_rng);
  std::uint64_t sel_seed = map_rng();
  std::vector<int> idx =
      cfg.uniform_landmarks
          ? uniform_select(static_cast<int>(pts.size()), cfg.map.n_landmarks, sel_seed)
          : fps_select(pts, cfg.map.n_landmarks, cfg.map.fps_metric, agent, spec, sel_seed);
  std::vector<State> landmarks;
  landmarks.reserve(idx.size());
  for (int i : idx) landmarks.push_back(pts[i]);
  return make_landmark_set(std::move(landmarks), spec, agent, cfg.map.tau, cfg.map.presample_m);
}

}  // namespace detail

template <typename Agent>
MetricRow evaluate(const EvalContext& ctx, const Agent& agent, const ReplayBuffer& buffer,
                   long step) {
  const EnvSpec& spec = ctx.spec;
  const RunConfig& cfg = ctx.cfg;
  MetricRow row;
  row.step = step;
  row.seed = ctx.seed;

  bool use_map = cfg.planner && !buffer.empty();
  LandmarkSet set;
  if (use_map) {
    auto map_rng = make_rng(ctx.seed, Stream::MapBuild, static_cast<std::uint64_t>(step), 1);
    set = detail::select_landmarks(cfg, spec, agent, buffer, map_rng);
  }

  double successes = 0.0, len_sum = 0.0;
  for (int e = 0; e < cfg.eval_episodes; ++e) {
    auto ep_rng = make_rng(ctx.seed, Stream::EvalReset, static_cast<std::uint64_t>(step), e);
    auto [s0, g] = eval_reset(spec, cfg.fixed_start, ep_rng);
    EpisodeTrace trace;
    if (use_map) {
      LandmarkGraph graph = build_graph(set, g, agent);
      trace = run_episode(spec, s0, g, agent, &graph, ControlMode::Planner,
                          spec.max_episode_steps, false, ep_rng);
    } else {
      trace = run_episode(spec, s0, g, agent, nullptr, ControlMode::FlatUvfa,
                          spec.max_episode_steps, false, ep_rng);
    }
    successes += trace.success ? 1.0 : 0.0;
    len_sum += trace.steps_used;
  }
  row.success_rate = successes / cfg.eval_episodes;
  row.mean_episode_len = len_sum / cfg.eval_episodes;

  std::vector<double> pred(ctx.probe.s.size());
  for (size_t i = 0; i < ctx.probe.s.size(); ++i) {
    if (use_map) {
      LandmarkGraph graph = build_graph(set, ctx.probe.g[i], agent);
      pred[i] = planner_distance_estimate(ctx.probe.s[i], graph, agent);
    } else {
      pred[i] = agent.distance(ctx.probe.s[i], ctx.probe.g[i], cfg.map.tau).value;
    }
  }
  row.mde = mde(pred, ctx.probe.dgt);
  row.max_dist_est = *std::max_element(pred.begin(), pred.end());
  return row;
}

// --- training -------------------------------------------------------------

struct RunArtifacts {
  UvfaAgent agent;           // final agent
  ReplayBuffer buffer;       // final buffer
  std::vector<MetricRow> rows;
};

// One seed of the full train/eval loop. The landmark map is rebuilt from the
// replay buffer at the start of every episode; evaluation happens at nominal
// step boundaries (5k, 10k, ...) right after the episode that crosses them.
template <typename EvalHook>
RunArtifacts run_training(const RunConfig& cfg, std::uint64_t seed, EvalHook&& on_eval) {
  EnvSpec spec = make_env(env_name_from(cfg.env));
  UvfaAgent agent = make_uvfa_agent(spec, cfg.hidden, cfg.gamma, cfg.lr, seed);
  agent.total_steps = cfg.total_env_steps;
  agent.eps_sched = cfg.eps;
  ReplayBuffer buffer(spec, cfg.her.capacity, cfg.her.k, cfg.her.ratio);
  ProbeSet probe = make_probe_set(spec, seed, cfg.probe_pairs, cfg.fixed_start);
  EvalContext ctx{spec, cfg, seed, probe};

  auto reset_rng = make_rng(seed, Stream::TrainReset);
  auto behavior_rng = make_rng(seed, Stream::Behavior);
  auto replay_rng = make_rng(seed, Stream::Replay);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> rand_action(0, spec.action_count - 1);

  std::vector<MetricRow> rows;
  long env_steps = 0, episode = 0, next_eval = cfg.eval_every;

  while (env_steps < cfg.total_env_steps) {
    auto [s, g] = train_reset(spec, cfg.fixed_start, reset_rng);
    LandmarkSet set;
    LandmarkGraph graph;
    bool have_map = cfg.planner && !buffer.empty();
    if (have_map) {
      auto map_rng = make_rng(seed, Stream::MapBuild, static_cast<std::uint64_t>(episode), 0);
      set = detail::select_landmarks(cfg, spec, agent, buffer, map_rng);
      graph = build_graph(set, g, agent);
    }

    std::vector<TransitionRecord> ep;
    if (!goal_reached(spec, proj(spec, s), g)) {
      for (int t = 0; t < spec.max_episode_steps; ++t) {
        Goal subgoal = g;
        int a;
        if (coin(behavior_rng) < agent.epsilon()) {
          a = rand_action(behavior_rng);
        } else {
          if (have_map) subgoal = next_subgoal(s, graph, agent).subgoal;
          a = agent.act_greedy(s, subgoal);
        }
        StepOutcome out = step(spec, s, a, g);
        TransitionRecord rec;
        rec.s = s;
        rec.a = a;
        rec.r = out.reward;
        rec.s_next = out.next_state;
        rec.g = g;
        rec.reached = out.reached;
        ep.push_back(std::move(rec));
        s = out.next_state;
        ++env_steps;
        ++agent.env_steps;
        if (env_steps > cfg.warmup_steps && env_steps % cfg.train_every == 0 &&
            !buffer.empty()) {
          agent.td_update(buffer.sample_batch(cfg.batch_size, replay_rng));
          agent.sync_target(cfg.polyak_tau);
        }
        if (out.reached || env_steps >= cfg.total_env_steps) break;
      }
    }
    buffer.store_episode(std::move(ep));
    ++episode;

    while (next_eval <= env_steps) {
      MetricRow row = evaluate(ctx, agent, buffer, next_eval);
      rows.push_back(row);
      on_eval(row, agent, buffer);
      next_eval += cfg.eval_every;
    }
  }
  return RunArtifacts{std::move(agent), std::move(buffer), std::move(rows)};
}

inline RunArtifacts run_training(const RunConfig& cfg, std::uint64_t seed) {
  return run_training(cfg, seed, [](const MetricRow&, const UvfaAgent&, const ReplayBuffer&) {});
}

// --- full experiment with on-disk artifacts --------------------------------

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

// Train/eval every seed of the config; writes metrics.csv, a config echo,
// periodic checkpoints, and landmark-graph dumps under cfg.out_dir.
inline std::vector<MetricRow> run_experiment(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  bool to_disk = !cfg.out_dir.empty();
  if (to_disk) {
    fs::create_directories(cfg.out_dir);
    fs::create_directories(cfg.out_dir + "/checkpoints");
    fs::create_directories(cfg.out_dir + "/graphs");
    write_text(cfg.out_dir + "/config.json", nlohmann::json(cfg).dump(2) + "\n");
  }
  std::vector<MetricRow> all_rows;
  for (std::uint64_t seed : cfg.seeds) {
    auto artifacts = run_training(
        cfg, seed,
        [&](const MetricRow& row, const UvfaAgent& agent, const ReplayBuffer& buffer) {
          if (!to_disk) return;
          bool checkpoint_due =
              cfg.checkpoint_every > 0 && row.step % cfg.checkpoint_every == 0;
          if (checkpoint_due) {
            char name[128];
            std::snprintf(name, sizeof(name), "/checkpoints/seed%llu_step%09ld.json",
                          static_cast<unsigned long long>(seed), row.step);
            write_text(cfg.out_dir + name, agent_to_json(agent).dump() + "\n");
          }
          if (cfg.planner && !buffer.empty()) {
            EnvSpec spec = make_env(env_name_from(cfg.env));
            auto map_rng = make_rng(seed, Stream::MapBuild, static_cast<std::uint64_t>(row.step), 1);
            LandmarkSet set = detail::select_landmarks(cfg, spec, agent, buffer, map_rng);
            LandmarkGraph graph = build_graph(set, fixed_far_goal(spec), agent);
            char name[128];
            std::snprintf(name, sizeof(name), "/graphs/seed%llu_step%09ld.json",
                          static_cast<unsigned long long>(seed), row.step);
            write_text(cfg.out_dir + name, graph_to_json(graph).dump() + "\n");
          }
        });
    for (const auto& r : artifacts.rows) all_rows.push_back(r);
    if (to_disk) {
      char name[128];
      std::snprintf(name, sizeof(name), "/checkpoints/seed%llu_final.json",
                    static_cast<unsigned long long>(seed));
      write_text(cfg.out_dir + name, agent_to_json(artifacts.agent).dump() + "\n");
      if (cfg.save_buffer_snapshot) {
        std::snprintf(name, sizeof(name), "/buffer_seed%llu.bin",
                      static_cast<unsigned long long>(seed));
        save_buffer(artifacts.buffer, cfg.out_dir + name);
      }
    }
  }
  if (to_disk) write_metrics_csv(cfg.out_dir + "/metrics.csv", all_rows);
  return all_rows;
}

// Identical pipelines differing only in landmark selection; fixed-start mode.
// Emits fps.csv and uniform.csv under cfg.out_dir when set.
inline std::pair<std::vector<MetricRow>, std::vector<MetricRow>> ablation_fps_vs_uniform(
    RunConfig cfg) {
  cfg.fixed_start = true;
  cfg.planner = true;
  std::string out = cfg.out_dir;
  RunConfig fps_cfg = cfg;
  fps_cfg.uniform_landmarks = false;
  fps_cfg.out_dir = out.empty() ? "" : out + "/fps";
  RunConfig uni_cfg = cfg;
  uni_cfg.uniform_landmarks = true;
  uni_cfg.out_dir = out.empty() ? "" : out + "/uniform";
  auto fps_rows = run_experiment(fps_cfg);
  auto uni_rows = run_experiment(uni_cfg);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    write_metrics_csv(out + "/fps.csv", fps_rows);
    write_metrics_csv(out + "/uniform.csv", uni_rows);
  }
  return {fps_rows, uni_rows};
}

struct SweepCell {
  int n_landmarks = 0;
  double tau = 0.0;
  std::uint64_t seed = 0;
  double success_rate = 0.0;
};

// Fig-5a-style sensitivity grid: train once per seed with the base config,
// then re-evaluate the final agent+buffer under each (n_landmarks, tau).
inline std::vector<SweepCell> sweep_landmarks_tau(const RunConfig& base,
                                                  const std::vector<int>& landmark_grid,
                                                  const std::vector<double>& tau_grid) {
  std::vector<SweepCell> cells;
  for (std::uint64_t seed : base.seeds) {
    RunConfig train_cfg = base;
    train_cfg.out_dir.clear();
    auto artifacts = run_training(train_cfg, seed);
    ProbeSet probe = make_probe_set(make_env(env_name_from(base.env)), seed, base.probe_pairs,
                                    base.fixed_start);
    for (int n : landmark_grid) {
      for (double tau : tau_grid) {
        RunConfig cell_cfg = base;
        cell_cfg.map.n_landmarks = n;
        cell_cfg.map.tau = tau;
        EnvSpec spec = make_env(env_name_from(base.env));
        EvalContext ctx{spec, cell_cfg, seed, probe};
        MetricRow row = evaluate(ctx, artifacts.agent, artifacts.buffer, base.total_env_steps);
        cells.push_back(SweepCell{n, tau, seed, row.success_rate});
      }
    }
  }
  if (!base.out_dir.empty()) {
    std::filesystem::create_directories(base.out_dir);
    std::ofstream f(base.out_dir + "/sweep.csv");
    f << "n_landmarks,tau,seed,success_rate\n";
    for (const auto& c : cells) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%d,%.6f,%llu,%.6f\n", c.n_landmarks, c.tau,
                    static_cast<unsigned long long>(c.seed), c.success_rate);
      f << buf;
    }
  }
  return cells;
}

}  // namespace goalmap
