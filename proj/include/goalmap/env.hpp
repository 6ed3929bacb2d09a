#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "goalmap/core.hpp"

namespace goalmap {

enum class EnvName { FourRoom, Reach2D, Push2D };

inline std::string env_name_str(EnvName n) {
  switch (n) {
    case EnvName::FourRoom: return "FourRoom";
    case EnvName::Reach2D: return "2DReach";
    case EnvName::Push2D: return "2DPush";
  }
  return "?";
}

inline EnvName env_name_from(const std::string& s) {
  if (s == "FourRoom") return EnvName::FourRoom;
  if (s == "2DReach") return EnvName::Reach2D;
  if (s == "2DPush") return EnvName::Push2D;
  throw std::invalid_argument("unknown env name: " + s);
}

// Axis-aligned blocked rectangle; the open interior is solid, faces are free.
struct WallRect {
  double xmin, xmax, ymin, ymax;
};

struct EnvSpec {
  EnvName name = EnvName::FourRoom;
  int state_dim = 2;
  int goal_dim = 2;
  int action_count = 4;
  double delta = 0.0;      // goal-reach tolerance; FourRoom uses exact cell match
  int max_episode_steps = 50;
  // FourRoom geometry: row-major grid mask, grid[y][x], '#' wall, '.' free.
  std::vector<std::string> grid;
  // Continuous geometry: the square [0, box]^2 minus wall interiors.
  double box = 0.0;
  std::vector<WallRect> walls;
  double max_step_len = 1.0;
  double contact_radius = 0.0;  // Push2D only

  int grid_w() const { return grid.empty() ? 0 : static_cast<int>(grid[0].size()); }
  int grid_h() const { return static_cast<int>(grid.size()); }
  bool discrete() const { return name == EnvName::FourRoom; }
};

// The classic four-rooms grid: 11x11, one wall per axis, four doorways.
inline EnvSpec four_room_spec() {
  EnvSpec s;
  s.name = EnvName::FourRoom;
  s.state_dim = 2;
  s.goal_dim = 2;
  s.action_count = 4;
  s.delta = 0.0;
  s.max_episode_steps = 50;
  s.grid.assign(11, std::string(11, '.'));
  for (int x = 0; x < 11; ++x) s.grid[5][x] = '#';
  for (int y = 0; y < 11; ++y) s.grid[y][5] = '#';
  s.grid[5][2] = '.';
  s.grid[5][8] = '.';
  s.grid[2][5] = '.';
  s.grid[8][5] = '.';
  return s;
}

// 15x15 U-maze: a horizontal wall of length 10 attached to the left side.
// The rectangle extends past x=0 so its open interior seals the boundary.
inline EnvSpec reach2d_spec() {
  EnvSpec s;
  s.name = EnvName::Reach2D;
  s.state_dim = 2;
  s.goal_dim = 2;
  s.action_count = 16;
  s.delta = 0.5;
  s.max_episode_steps = 100;
  s.box = 15.0;
  s.walls = {WallRect{-1.0, 10.0, 7.25, 7.75}};
  return s;
}

inline EnvSpec push2d_spec() {
  EnvSpec s = reach2d_spec();
  s.name = EnvName::Push2D;
  s.state_dim = 4;
  s.goal_dim = 2;
  s.max_episode_steps = 150;
  s.contact_radius = 0.5;
  return s;
}

inline EnvSpec make_env(EnvName n) {
  switch (n) {
    case EnvName::FourRoom: return four_room_spec();
    case EnvName::Reach2D: return reach2d_spec();
    case EnvName::Push2D: return push2d_spec();
  }
  throw std::invalid_argument("bad env");
}

inline void to_json(nlohmann::json& j, const WallRect& w) {
  j = nlohmann::json{{"xmin", w.xmin}, {"xmax", w.xmax}, {"ymin", w.ymin}, {"ymax", w.ymax}};
}

inline void from_json(const nlohmann::json& j, WallRect& w) {
  j.at("xmin").get_to(w.xmin);
  j.at("xmax").get_to(w.xmax);
  j.at("ymin").get_to(w.ymin);
  j.at("ymax").get_to(w.ymax);
}

inline void to_json(nlohmann::json& j, const EnvSpec& s) {
  j = nlohmann::json{{"name", env_name_str(s.name)},
                     {"state_dim", s.state_dim},
                     {"goal_dim", s.goal_dim},
                     {"action_count", s.action_count},
                     {"delta", s.delta},
                     {"max_episode_steps", s.max_episode_steps},
                     {"grid", s.grid},
                     {"box", s.box},
                     {"walls", s.walls},
                     {"max_step_len", s.max_step_len},
                     {"contact_radius", s.contact_radius}};
}

inline void from_json(const nlohmann::json& j, EnvSpec& s) {
  s.name = env_name_from(j.at("name").get<std::string>());
  j.at("state_dim").get_to(s.state_dim);
  j.at("goal_dim").get_to(s.goal_dim);
  j.at("action_count").get_to(s.action_count);
  j.at("delta").get_to(s.delta);
  j.at("max_episode_steps").get_to(s.max_episode_steps);
  j.at("grid").get_to(s.grid);
  j.at("box").get_to(s.box);
  j.at("walls").get_to(s.walls);
  j.at("max_step_len").get_to(s.max_step_len);
  j.at("contact_radius").get_to(s.contact_radius);
}

inline bool grid_free(const EnvSpec& spec, int x, int y) {
  return x >= 0 && x < spec.grid_w() && y >= 0 && y < spec.grid_h() &&
         spec.grid[y][x] == '.';
}

inline bool in_wall_interior(const EnvSpec& spec, double x, double y) {
  for (const auto& w : spec.walls)
    if (x > w.xmin && x < w.xmax && y > w.ymin && y < w.ymax) return true;
  return false;
}

inline bool point_free(const EnvSpec& spec, double x, double y) {
  if (spec.discrete())
    return grid_free(spec, static_cast<int>(std::llround(x)), static_cast<int>(std::llround(y)));
  return x >= 0.0 && x <= spec.box && y >= 0.0 && y <= spec.box &&
         !in_wall_interior(spec, x, y);
}

inline bool state_valid(const EnvSpec& spec, const State& s) {
  if (s.v.size() != spec.state_dim) return false;
  if (!point_free(spec, s.v[0], s.v[1])) return false;
  if (spec.name == EnvName::Push2D && !point_free(spec, s.v[2], s.v[3])) return false;
  return true;
}

inline bool goal_valid(const EnvSpec& spec, const Goal& g) {
  return g.v.size() == spec.goal_dim && point_free(spec, g.v[0], g.v[1]);
}

// Goal space is a projection of the state space: identity for FourRoom and
// 2DReach, block-B coordinates for 2DPush.
inline Goal proj(const EnvSpec& spec, const State& s) {
  Goal g;
  if (spec.name == EnvName::Push2D)
    g.v = s.v.segment(2, 2);
  else
    g.v = s.v.head(spec.goal_dim);
  return g;
}

inline bool goal_reached(const EnvSpec& spec, const Goal& achieved, const Goal& g) {
  if (spec.discrete())
    return std::llround(achieved.v[0]) == std::llround(g.v[0]) &&
           std::llround(achieved.v[1]) == std::llround(g.v[1]);
  return (achieved.v - g.v).norm() <= spec.delta;
}

struct StepOutcome {
  State next_state;
  double reward;
  bool reached;
  bool truncated = false;
};

// Sparse goal-reaching reward: 0 on reach, -1 otherwise. HER relabeling reuses
// this exact function so recomputed rewards are bit-identical to step().
inline std::pair<double, bool> reward_of(const EnvSpec& spec, const State& next_state,
                                         const Goal& g) {
  bool reached = goal_reached(spec, proj(spec, next_state), g);
  return {reached ? 0.0 : -1.0, reached};
}

// 16 actions for the continuous envs: 8 compass unit vectors at full step
// length plus the same directions at half length.
inline SmallVec action_dir(const EnvSpec& spec, int a) {
  if (a < 0 || a >= spec.action_count) throw std::invalid_argument("action out of range");
  if (spec.discrete()) {
    static const int dx[4] = {1, 0, -1, 0};
    static const int dy[4] = {0, 1, 0, -1};
    return vec2(dx[a], dy[a]);
  }
  const double diag = std::sqrt(0.5);
  static const double ux[8] = {1, diag, 0, -diag, -1, -diag, 0, diag};
  static const double uy[8] = {0, diag, 1, diag, 0, -diag, -1, -diag};
  double scale = (a < 8) ? spec.max_step_len : 0.5 * spec.max_step_len;
  return vec2(ux[a % 8] * scale, uy[a % 8] * scale);
}

namespace detail {

// Moves p by d, stopping at the first contact with a wall interior or the
// bounding box; no sliding. The crossed coordinate is snapped exactly onto
// the contact face so positions never end up strictly inside a wall.
inline SmallVec move_point(const EnvSpec& spec, const SmallVec& p, const SmallVec& d) {
  double t_stop = 1.0;
  int snap_axis = -1;
  double snap_val = 0.0;

  // bounding box
  for (int ax = 0; ax < 2; ++ax) {
    if (d[ax] > 0.0) {
      double t = (spec.box - p[ax]) / d[ax];
      if (t < t_stop) { t_stop = std::max(0.0, t); snap_axis = ax; snap_val = spec.box; }
    } else if (d[ax] < 0.0) {
      double t = (0.0 - p[ax]) / d[ax];
      if (t < t_stop) { t_stop = std::max(0.0, t); snap_axis = ax; snap_val = 0.0; }
    }
  }

  for (const auto& w : spec.walls) {
    double lo[2] = {w.xmin, w.ymin}, hi[2] = {w.xmax, w.ymax};
    double t_enter = -kInf, t_exit = kInf;
    int enter_axis = -1;
    double enter_val = 0.0;
    bool miss = false;
    for (int ax = 0; ax < 2; ++ax) {
      if (d[ax] == 0.0) {
        if (!(p[ax] > lo[ax] && p[ax] < hi[ax])) { miss = true; break; }
      } else {
        double t0 = (lo[ax] - p[ax]) / d[ax];
        double t1 = (hi[ax] - p[ax]) / d[ax];
        double face = t0 < t1 ? lo[ax] : hi[ax];
        if (t0 > t1) std::swap(t0, t1);
        if (t0 > t_enter) { t_enter = t0; enter_axis = ax; enter_val = face; }
        t_exit = std::min(t_exit, t1);
      }
    }
    if (miss || t_enter >= t_exit || t_exit <= 0.0) continue;
    double tc = std::max(t_enter, 0.0);
    if (tc < t_stop) {
      t_stop = tc;
      snap_axis = enter_axis;
      snap_val = enter_val;
    }
  }

  SmallVec out = p + t_stop * d;
  if (snap_axis >= 0 && t_stop < 1.0) out[snap_axis] = snap_val;
  out[0] = std::clamp(out[0], 0.0, spec.box);
  out[1] = std::clamp(out[1], 0.0, spec.box);
  return out;
}

}  // namespace detail

inline StepOutcome step(const EnvSpec& spec, const State& s, int a, const Goal& g) {
  if (a < 0 || a >= spec.action_count) throw std::invalid_argument("action out of range");
  State next;
  if (spec.discrete()) {
    SmallVec d = action_dir(spec, a);
    int nx = static_cast<int>(std::llround(s.v[0] + d[0]));
    int ny = static_cast<int>(std::llround(s.v[1] + d[1]));
    next.v = grid_free(spec, nx, ny) ? vec2(nx, ny) : s.v;
  } else if (spec.name == EnvName::Reach2D) {
    next.v = detail::move_point(spec, s.v, action_dir(spec, a));
  } else {
    SmallVec a_pos = s.v.head(2);
    SmallVec b_pos = s.v.segment(2, 2);
    bool contact = (a_pos - b_pos).norm() <= spec.contact_radius;
    SmallVec a_next = detail::move_point(spec, a_pos, action_dir(spec, a));
    SmallVec b_next = b_pos;
    if (contact) {
      SmallVec da = a_next - a_pos;
      b_next = detail::move_point(spec, b_pos, da);
    }
    next.v = vec4(a_next[0], a_next[1], b_next[0], b_next[1]);
  }
  auto [r, reached] = reward_of(spec, next, g);
  return StepOutcome{next, r, reached, false};
}

inline std::vector<std::pair<int, int>> free_cells(const EnvSpec& spec) {
  std::vector<std::pair<int, int>> cells;
  for (int y = 0; y < spec.grid_h(); ++y)
    for (int x = 0; x < spec.grid_w(); ++x)
      if (spec.grid[y][x] == '.') cells.emplace_back(x, y);
  return cells;
}

inline SmallVec random_free_point(const EnvSpec& spec, std::mt19937_64& rng) {
  if (spec.discrete()) {
    auto cells = free_cells(spec);
    std::uniform_int_distribution<size_t> pick(0, cells.size() - 1);
    auto [x, y] = cells[pick(rng)];
    return vec2(x, y);
  }
  std::uniform_real_distribution<double> u(0.0, spec.box);
  while (true) {
    double x = u(rng), y = u(rng);
    if (!in_wall_interior(spec, x, y)) return vec2(x, y);
  }
}

inline State random_free_state(const EnvSpec& spec, std::mt19937_64& rng) {
  State s;
  if (spec.name == EnvName::Push2D) {
    SmallVec a = random_free_point(spec, rng);
    SmallVec b = random_free_point(spec, rng);
    s.v = vec4(a[0], a[1], b[0], b[1]);
  } else {
    s.v = random_free_point(spec, rng);
  }
  return s;
}

inline Goal random_free_goal(const EnvSpec& spec, std::mt19937_64& rng) {
  Goal g;
  g.v = random_free_point(spec, rng);
  return g;
}

inline std::pair<State, Goal> reset_rng(const EnvSpec& spec, std::mt19937_64& rng,
                                        const std::optional<State>& start = std::nullopt,
                                        const std::optional<Goal>& goal = std::nullopt) {
  State s;
  if (start) {
    if (!state_valid(spec, *start)) throw std::invalid_argument("fixed start not in free space");
    s = *start;
  } else {
    s = random_free_state(spec, rng);
  }
  Goal g;
  if (goal) {
    if (!goal_valid(spec, *goal)) throw std::invalid_argument("fixed goal not in free space");
    g = *goal;
  } else {
    g = random_free_goal(spec, rng);
  }
  return {s, g};
}

inline std::pair<State, Goal> reset(const EnvSpec& spec, std::uint64_t rng_seed,
                                    const std::optional<State>& start = std::nullopt,
                                    const std::optional<Goal>& goal = std::nullopt) {
  auto rng = make_rng(rng_seed, Stream::TrainReset);
  return reset_rng(spec, rng, start, goal);
}

namespace detail {

inline double bfs_grid_distance(const EnvSpec& spec, int sx, int sy, int gx, int gy) {
  if (!grid_free(spec, sx, sy) || !grid_free(spec, gx, gy))
    throw std::invalid_argument("query cell not in free space");
  if (sx == gx && sy == gy) return 0.0;
  int w = spec.grid_w(), h = spec.grid_h();
  std::vector<int> dist(w * h, -1);
  std::deque<int> q;
  dist[sy * w + sx] = 0;
  q.push_back(sy * w + sx);
  static const int dx[4] = {1, 0, -1, 0}, dy[4] = {0, 1, 0, -1};
  while (!q.empty()) {
    int cur = q.front();
    q.pop_front();
    int cx = cur % w, cy = cur / w;
    for (int k = 0; k < 4; ++k) {
      int nx = cx + dx[k], ny = cy + dy[k];
      if (!grid_free(spec, nx, ny)) continue;
      int ni = ny * w + nx;
      if (dist[ni] >= 0) continue;
      dist[ni] = dist[cur] + 1;
      if (nx == gx && ny == gy) return dist[ni];
      q.push_back(ni);
    }
  }
  return kInf;
}

// Fine 8-connected discretization of the continuous maze. pitch must be at
// most half the wall thickness so no edge can hop across a wall.
struct FineGrid {
  int n = 0;
  double pitch = 0.0;
  std::vector<char> free;

  FineGrid(const EnvSpec& spec, double pitch_) : pitch(pitch_) {
    n = static_cast<int>(std::llround(spec.box / pitch)) + 1;
    free.resize(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        free[static_cast<size_t>(j) * n + i] =
            !in_wall_interior(spec, i * pitch, j * pitch);
  }

  bool is_free(int i, int j) const {
    return i >= 0 && i < n && j >= 0 && j < n && free[static_cast<size_t>(j) * n + i];
  }

  // nearest free node, expanding ring search
  std::pair<int, int> snap(double x, double y) const {
    int ci = std::clamp(static_cast<int>(std::llround(x / pitch)), 0, n - 1);
    int cj = std::clamp(static_cast<int>(std::llround(y / pitch)), 0, n - 1);
    for (int r = 0; r < n; ++r)
      for (int dj = -r; dj <= r; ++dj)
        for (int di = -r; di <= r; ++di) {
          if (std::max(std::abs(di), std::abs(dj)) != r) continue;
          if (is_free(ci + di, cj + dj)) return {ci + di, cj + dj};
        }
    throw std::runtime_error("no free node in grid");
  }

  double dijkstra(std::pair<int, int> a, std::pair<int, int> b) const {
    if (a == b) return 0.0;
    size_t total = static_cast<size_t>(n) * n;
    std::vector<double> dist(total, kInf);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    int start = a.second * n + a.first, target = b.second * n + b.first;
    dist[start] = 0.0;
    pq.emplace(0.0, start);
    const double diag = pitch * std::sqrt(2.0);
    static const int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static const int dy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    while (!pq.empty()) {
      auto [d, cur] = pq.top();
      pq.pop();
      if (d > dist[cur]) continue;
      if (cur == target) return d;
      int ci = cur % n, cj = cur / n;
      for (int k = 0; k < 8; ++k) {
        int ni = ci + dx[k], nj = cj + dy[k];
        if (!is_free(ni, nj)) continue;
        double nd = d + ((k % 2) ? diag : pitch);
        int nidx = nj * n + ni;
        if (nd < dist[nidx]) {
          dist[nidx] = nd;
          pq.emplace(nd, nidx);
        }
      }
    }
    return kInf;
  }
};

inline double fine_grid_distance(const EnvSpec& spec, const SmallVec& a, const SmallVec& b,
                                 double pitch) {
  FineGrid grid(spec, pitch);
  return grid.dijkstra(grid.snap(a[0], a[1]), grid.snap(b[0], b[1]));
}

}  // namespace detail

// Exact step-count oracle used only for evaluation. FourRoom: BFS on the grid.
// Continuous envs: shortest path on a 0.25-pitch discretization divided by the
// max step length. Push2D composes approach-to-contact and push legs.
inline double ground_truth_distance(const EnvSpec& spec, const State& s, const Goal& g,
                                    double pitch = 0.25) {
  if (!state_valid(spec, s) || !goal_valid(spec, g))
    throw std::invalid_argument("ground_truth_distance: query not in free space");
  if (spec.discrete())
    return detail::bfs_grid_distance(spec, static_cast<int>(std::llround(s.v[0])),
                                     static_cast<int>(std::llround(s.v[1])),
                                     static_cast<int>(std::llround(g.v[0])),
                                     static_cast<int>(std::llround(g.v[1])));
  if (spec.name == EnvName::Reach2D)
    return detail::fine_grid_distance(spec, s.v, g.v, pitch) / spec.max_step_len;
  // Push2D: walk A to contact with B, then push B to the goal.
  SmallVec a_pos = s.v.head(2);
  SmallVec b_pos = s.v.segment(2, 2);
  double push = detail::fine_grid_distance(spec, b_pos, g.v, pitch) / spec.max_step_len;
  if (push == 0.0) return 0.0;
  double approach = detail::fine_grid_distance(spec, a_pos, b_pos, pitch) / spec.max_step_len;
  if (std::isinf(push) || std::isinf(approach)) return kInf;
  return std::max(0.0, approach - spec.contact_radius) + push;
}

}  // namespace goalmap
