// Test-side reference implementations, written independently of the library
// code they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include "goalmap/agent.hpp"
#include "goalmap/core.hpp"
#include "goalmap/env.hpp"
#include "goalmap/nn.hpp"

namespace oracle {

using goalmap::EnvSpec;
using goalmap::Goal;
using goalmap::State;

// Plain-loop forward pass, no Eigen expressions.
inline std::vector<double> naive_mlp_forward(const goalmap::Mlp& p,
                                             const std::vector<double>& x) {
  std::vector<double> cur = x;
  for (int layer = 0; layer < p.n_layers(); ++layer) {
    int rows = static_cast<int>(p.W[layer].rows());
    int cols = static_cast<int>(p.W[layer].cols());
    std::vector<double> next(rows, 0.0);
    for (int r = 0; r < rows; ++r) {
      double acc = p.b[layer][r];
      for (int c = 0; c < cols; ++c) acc += p.W[layer](r, c) * cur[c];
      if (layer + 1 < p.n_layers() && acc < 0.0) acc = 0.0;
      next[r] = acc;
    }
    cur = std::move(next);
  }
  return cur;
}

// Central finite differences of loss(p) w.r.t. every parameter.
template <typename LossFn>
goalmap::Grads finite_diff_grads(goalmap::Mlp p, LossFn&& loss, double h = 1e-5) {
  goalmap::Grads g;
  g.W.resize(p.n_layers());
  g.b.resize(p.n_layers());
  for (int l = 0; l < p.n_layers(); ++l) {
    g.W[l] = Eigen::MatrixXd::Zero(p.W[l].rows(), p.W[l].cols());
    g.b[l] = Eigen::VectorXd::Zero(p.b[l].size());
    for (int r = 0; r < p.W[l].rows(); ++r)
      for (int c = 0; c < p.W[l].cols(); ++c) {
        double orig = p.W[l](r, c);
        p.W[l](r, c) = orig + h;
        double up = loss(p);
        p.W[l](r, c) = orig - h;
        double down = loss(p);
        p.W[l](r, c) = orig;
        g.W[l](r, c) = (up - down) / (2.0 * h);
      }
    for (int r = 0; r < p.b[l].size(); ++r) {
      double orig = p.b[l][r];
      p.b[l][r] = orig + h;
      double up = loss(p);
      p.b[l][r] = orig - h;
      double down = loss(p);
      p.b[l][r] = orig;
      g.b[l][r] = (up - down) / (2.0 * h);
    }
  }
  return g;
}

// All-pairs shortest paths by Floyd-Warshall.
inline Eigen::MatrixXd floyd_warshall(Eigen::MatrixXd w) {
  int n = static_cast<int>(w.rows());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (std::isinf(w(i, k)) || std::isinf(w(k, j))) continue;
        double alt = w(i, k) + w(k, j);
        if (alt < w(i, j)) w(i, j) = alt;
      }
  return w;
}

// Greedy farthest point sampling by full rescans: at every iteration the
// candidate's distance to the selected set is recomputed from scratch.
template <typename DistFn>
std::vector<int> brute_force_fps(int n, int k, std::uint64_t rng_seed, DistFn&& dist) {
  auto rng = goalmap::make_rng(rng_seed, goalmap::Stream::Fps);
  std::uniform_int_distribution<int> first(0, n - 1);
  std::vector<int> chosen = {first(rng)};
  k = std::min(k, n);
  while (static_cast<int>(chosen.size()) < k) {
    int best = -1;
    double best_d = -1.0;
    for (int i = 0; i < n; ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      double dmin = goalmap::kInf;
      for (int c : chosen) dmin = std::min(dmin, dist(c, i));
      if (best < 0 || dmin > best_d) {
        best = i;
        best_d = dmin;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

// Grid BFS written against the raw mask strings.
inline double grid_bfs(const std::vector<std::string>& grid, int sx, int sy, int gx, int gy) {
  int h = static_cast<int>(grid.size());
  int w = static_cast<int>(grid[0].size());
  auto open = [&](int x, int y) {
    return x >= 0 && x < w && y >= 0 && y < h && grid[y][x] == '.';
  };
  std::map<std::pair<int, int>, int> dist;
  std::queue<std::pair<int, int>> q;
  dist[{sx, sy}] = 0;
  q.push({sx, sy});
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    if (x == gx && y == gy) return dist[{x, y}];
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      int nx = x + dx, ny = y + dy;
      if (!open(nx, ny) || dist.count({nx, ny})) continue;
      dist[{nx, ny}] = dist[{x, y}] + 1;
      q.push({nx, ny});
    }
  }
  return goalmap::kInf;
}

// Independent continuous-maze shortest path at a caller-chosen pitch,
// organized around an explicit node list rather than the library's layout.
inline double maze_dijkstra(const EnvSpec& spec, double sx, double sy, double gx, double gy,
                            double pitch) {
  int n = static_cast<int>(std::llround(spec.box / pitch)) + 1;
  auto id = [&](int i, int j) { return j * n + i; };
  std::vector<bool> open(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      open[id(i, j)] = !goalmap::in_wall_interior(spec, i * pitch, j * pitch);
  auto snap = [&](double x, double y) {
    int bi = 0, bj = 0;
    double best = goalmap::kInf;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (!open[id(i, j)]) continue;
        double d = std::hypot(i * pitch - x, j * pitch - y);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    return std::pair{bi, bj};
  };
  auto [si, sj] = snap(sx, sy);
  auto [gi, gj] = snap(gx, gy);
  std::vector<double> dist(n * n, goalmap::kInf);
  dist[id(si, sj)] = 0.0;
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
  pq.emplace(0.0, id(si, sj));
  while (!pq.empty()) {
    auto [d, cur] = pq.top();
    pq.pop();
    if (d > dist[cur]) continue;
    int ci = cur % n, cj = cur / n;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        int ni = ci + di, nj = cj + dj;
        if (ni < 0 || ni >= n || nj < 0 || nj >= n || !open[id(ni, nj)]) continue;
        double step = pitch * ((di != 0 && dj != 0) ? std::sqrt(2.0) : 1.0);
        if (d + step < dist[id(ni, nj)]) {
          dist[id(ni, nj)] = d + step;
          pq.emplace(d + step, id(ni, nj));
        }
      }
  }
  return dist[id(gi, gj)];
}

inline double spearman_rho(std::vector<double> a, std::vector<double> b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<size_t> order(v.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (size_t i = 0; i < order.size();) {
      size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      double mean_rank = 0.5 * (i + j);
      for (size_t k = i; k <= j; ++k) r[order[k]] = mean_rank;
      i = j + 1;
    }
    return r;
  };
  std::vector<double> ra = ranks(a), rb = ranks(b);
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / ra.size();
  double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / rb.size();
  double num = 0.0, da = 0.0, db = 0.0;
  for (size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(da * db);
}

// Agent with exact values: Q(s, a, g) = -D_gt(next(s, a), g). Lets planner and
// map logic be tested against a converged policy without any training.
struct ExactAgent {
  EnvSpec env;

  double q_of(const State& s, int a, const Goal& g) const {
    goalmap::StepOutcome out = goalmap::step(env, s, a, g);
    return -goalmap::ground_truth_distance(env, out.next_state, g);
  }

  Eigen::VectorXd q_values(const State& s, const Goal& g) const {
    Eigen::VectorXd q(env.action_count);
    for (int a = 0; a < env.action_count; ++a) q[a] = q_of(s, a, g);
    return q;
  }

  int act_greedy(const State& s, const Goal& g) const {
    return goalmap::argmax_low(q_values(s, g));
  }

  int act(const State& s, const Goal& g, bool, std::mt19937_64&) const {
    return act_greedy(s, g);
  }

  goalmap::DistanceEstimate distance(const State& s, const Goal& g, double clip) const {
    double d = std::max(0.0, -q_values(s, g).maxCoeff());
    return {d, d <= clip};
  }

  Eigen::VectorXd distance_row(const State& s, const std::vector<Goal>& goals) const {
    Eigen::VectorXd out(goals.size());
    for (size_t i = 0; i < goals.size(); ++i)
      out[i] = std::max(0.0, -q_values(s, goals[i]).maxCoeff());
    return out;
  }

  Eigen::MatrixXd distance_matrix(const std::vector<State>& states,
                                  const std::vector<Goal>& goals) const {
    Eigen::MatrixXd out(states.size(), goals.size());
    for (size_t i = 0; i < states.size(); ++i) out.row(i) = distance_row(states[i], goals);
    return out;
  }
};

}  // namespace oracle
