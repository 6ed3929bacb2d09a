#pragma once

#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "goalmap/agent.hpp"
#include "goalmap/core.hpp"
#include "goalmap/env.hpp"
#include "goalmap/replay.hpp"

namespace goalmap {

enum class FpsMode { Euclidean, UvfaDistance };

inline std::string fps_mode_str(FpsMode m) {
  return m == FpsMode::Euclidean ? "euclidean" : "uvfa";
}

inline FpsMode fps_mode_from(const std::string& s) {
  if (s == "euclidean") return FpsMode::Euclidean;
  if (s == "uvfa") return FpsMode::UvfaDistance;
  throw std::invalid_argument("unknown fps metric: " + s);
}

inline std::vector<State> presample(const ReplayBuffer& buf, int m, std::mt19937_64& rng) {
  return buf.presample_states(m, rng);
}

namespace detail {

// Greedy farthest point sampling. dist_from(i) must return the (symmetrized)
// distance from point i to every point. First pick is seeded-random, every
// later pick maximizes the min distance to the selected set, ties to the
// lowest index.
template <typename DistFromFn>
std::vector<int> fps_core(int n, int k, std::uint64_t rng_seed, DistFromFn&& dist_from) {
  if (n <= 0) throw std::invalid_argument("fps: empty point set");
  if (k < 1) throw std::invalid_argument("fps: k must be >= 1");
  k = std::min(k, n);
  std::vector<int> chosen;
  chosen.reserve(k);
  auto rng = make_rng(rng_seed, Stream::Fps);
  std::uniform_int_distribution<int> first(0, n - 1);
  int cur = first(rng);
  Eigen::VectorXd min_dist = Eigen::VectorXd::Constant(n, kInf);
  std::vector<char> taken(n, 0);
  for (int it = 0; it < k; ++it) {
    chosen.push_back(cur);
    taken[cur] = 1;
    if (it + 1 == k) break;
    Eigen::VectorXd row = dist_from(cur);
    min_dist = min_dist.cwiseMin(row);
    int best = -1;
    double best_d = -kInf;
    for (int i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (best < 0 || min_dist[i] > best_d) {
        best = i;
        best_d = min_dist[i];
      }
    }
    cur = best;
  }
  return chosen;
}

}  // namespace detail

inline std::vector<int> fps_select(const std::vector<State>& points, int k,
                                   std::uint64_t rng_seed) {
  int n = static_cast<int>(points.size());
  return detail::fps_core(n, k, rng_seed, [&](int c) {
    Eigen::VectorXd row(n);
    for (int i = 0; i < n; ++i) row[i] = (points[i].v - points[c].v).norm();
    return row;
  });
}

// FPS under the agent's pairwise distance estimate, symmetrized by
// max(d(a,b), d(b,a)) since the learned distance is directed.
template <typename Agent>
std::vector<int> fps_select_uvfa(const std::vector<State>& points, int k, const Agent& agent,
                                 const EnvSpec& spec, std::uint64_t rng_seed) {
  int n = static_cast<int>(points.size());
  std::vector<Goal> goals(n);
  for (int i = 0; i < n; ++i) goals[i] = proj(spec, points[i]);
  return detail::fps_core(n, k, rng_seed, [&](int c) {
    Eigen::MatrixXd to_all = agent.distance_matrix({points[c]}, goals);        // 1 x n
    Eigen::MatrixXd from_all = agent.distance_matrix(points, {goals[c]});      // n x 1
    return to_all.row(0).transpose().cwiseMax(from_all.col(0)).eval();
  });
}

template <typename Agent>
std::vector<int> fps_select(const std::vector<State>& points, int k, FpsMode mode,
                            const Agent& agent, const EnvSpec& spec, std::uint64_t rng_seed) {
  if (mode == FpsMode::Euclidean) return fps_select(points, k, rng_seed);
  return fps_select_uvfa(points, k, agent, spec, rng_seed);
}

// Uniform landmark pick (ablation baseline): k distinct indices.
inline std::vector<int> uniform_select(int n, int k, std::uint64_t rng_seed) {
  if (n <= 0) throw std::invalid_argument("uniform_select: empty point set");
  k = std::min(k, n);
  auto rng = make_rng(rng_seed, Stream::Fps);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

// Landmark-to-landmark block of the map. The per-episode goal vertex is
// attached separately so evaluation can reuse one block across many goals.
struct LandmarkSet {
  EnvSpec env;
  std::vector<State> landmarks;
  std::vector<Goal> landmark_goals;  // proj of each landmark
  Eigen::MatrixXd w;                 // clipped directed weights, +inf where cut
  double tau = 0.0;
  int presample_size = 0;
};

template <typename Agent>
LandmarkSet make_landmark_set(std::vector<State> landmarks, const EnvSpec& spec,
                              const Agent& agent, double tau, int presample_size = 0) {
  if (landmarks.empty()) throw std::invalid_argument("landmark set must be nonempty");
  if (tau < 0.0) throw std::invalid_argument("tau must be >= 0");
  LandmarkSet set;
  set.env = spec;
  set.tau = tau;
  set.presample_size = presample_size;
  set.landmarks = std::move(landmarks);
  int n = static_cast<int>(set.landmarks.size());
  set.landmark_goals.resize(n);
  for (int i = 0; i < n; ++i) set.landmark_goals[i] = proj(spec, set.landmarks[i]);
  Eigen::MatrixXd d = agent.distance_matrix(set.landmarks, set.landmark_goals);
  set.w = (d.array() <= tau).select(d, kInf);
  set.w.diagonal().setZero();
  return set;
}

struct LandmarkGraph {
  EnvSpec env;
  std::vector<State> landmarks;
  std::vector<Goal> vertex_goals;  // landmark projections, then the episode goal
  Goal goal;
  int goal_index = 0;
  Eigen::MatrixXd w;             // (n+1)^2 directed weights
  Eigen::VectorXd dist_to_goal;  // single-destination shortest paths
  double tau = 0.0;
  int n_landmarks = 0;
  int presample_size = 0;
};

// Single-destination shortest paths over nonnegative directed weights
// (dense Dijkstra on the reversed graph). Unreachable vertices get +inf.
inline Eigen::VectorXd shortest_paths_to_goal(const Eigen::MatrixXd& w, int goal_index) {
  int n = static_cast<int>(w.rows());
  if (w.cols() != n || goal_index < 0 || goal_index >= n)
    throw std::invalid_argument("shortest_paths_to_goal: bad input");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w(i, j) < 0.0) throw std::invalid_argument("negative edge weight");
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, kInf);
  std::vector<char> done(n, 0);
  dist[goal_index] = 0.0;
  for (int round = 0; round < n; ++round) {
    int u = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && (u < 0 || dist[i] < dist[u])) u = i;
    if (u < 0 || std::isinf(dist[u])) break;
    done[u] = 1;
    for (int i = 0; i < n; ++i) {
      if (done[i] || std::isinf(w(i, u))) continue;
      double nd = w(i, u) + dist[u];
      if (nd < dist[i]) dist[i] = nd;
    }
  }
  return dist;
}

// Relaxation variant of the same computation, kept as the cross-check route.
inline Eigen::VectorXd bellman_ford_to_goal(const Eigen::MatrixXd& w, int goal_index) {
  int n = static_cast<int>(w.rows());
  if (w.cols() != n || goal_index < 0 || goal_index >= n)
    throw std::invalid_argument("bellman_ford_to_goal: bad input");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w(i, j) < 0.0) throw std::invalid_argument("negative edge weight");
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, kInf);
  dist[goal_index] = 0.0;
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (std::isinf(w(i, j)) || std::isinf(dist[j])) continue;
        double nd = w(i, j) + dist[j];
        if (nd < dist[i]) {
          dist[i] = nd;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return dist;
}

// Attach the episode goal as the final vertex: incoming edges only (outgoing
// edges from the goal are never used by the planner).
template <typename Agent>
LandmarkGraph build_graph(const LandmarkSet& set, const Goal& goal, const Agent& agent) {
  int n = static_cast<int>(set.landmarks.size());
  LandmarkGraph g;
  g.env = set.env;
  g.landmarks = set.landmarks;
  g.vertex_goals = set.landmark_goals;
  g.vertex_goals.push_back(goal);
  g.goal = goal;
  g.goal_index = n;
  g.tau = set.tau;
  g.n_landmarks = n;
  g.presample_size = set.presample_size;
  g.w = Eigen::MatrixXd::Constant(n + 1, n + 1, kInf);
  g.w.topLeftCorner(n, n) = set.w;
  Eigen::MatrixXd to_goal = agent.distance_matrix(set.landmarks, {goal});
  for (int i = 0; i < n; ++i)
    if (to_goal(i, 0) <= set.tau) g.w(i, n) = to_goal(i, 0);
  g.w(n, n) = 0.0;
  g.dist_to_goal = shortest_paths_to_goal(g.w, g.goal_index);
  return g;
}

template <typename Agent>
LandmarkGraph build_graph(std::vector<State> landmarks, const Goal& goal, const EnvSpec& spec,
                          const Agent& agent, double tau, int presample_size = 0) {
  return build_graph(make_landmark_set(std::move(landmarks), spec, agent, tau, presample_size),
                     goal, agent);
}

inline nlohmann::json graph_to_json(const LandmarkGraph& g) {
  nlohmann::json landmarks = nlohmann::json::array();
  for (const auto& l : g.landmarks)
    landmarks.push_back(std::vector<double>(l.v.data(), l.v.data() + l.v.size()));
  nlohmann::json edges = nlohmann::json::array();
  int n = static_cast<int>(g.w.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::isfinite(g.w(i, j))) edges.push_back({i, j, g.w(i, j)});
  nlohmann::json dist = nlohmann::json::array();
  for (int i = 0; i < g.dist_to_goal.size(); ++i)
    dist.push_back(std::isfinite(g.dist_to_goal[i]) ? nlohmann::json(g.dist_to_goal[i])
                                                    : nlohmann::json());
  return nlohmann::json{
      {"format", "goalmap-graph-v1"},
      {"goal", std::vector<double>(g.goal.v.data(), g.goal.v.data() + g.goal.v.size())},
      {"goal_index", g.goal_index},
      {"tau", g.tau},
      {"n_landmarks", g.n_landmarks},
      {"presample_size", g.presample_size},
      {"landmarks", landmarks},
      {"edges", edges},
      {"dist_to_goal", dist}};
}

}  // namespace goalmap
