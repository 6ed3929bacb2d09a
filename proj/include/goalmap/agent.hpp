#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "goalmap/core.hpp"
#include "goalmap/env.hpp"
#include "goalmap/nn.hpp"
#include "goalmap/replay.hpp"

namespace goalmap {

struct DistanceEstimate {
  double value = 0.0;  // estimated steps to the goal, >= 0
  bool reliable = false;
};

struct EpsSchedule {
  double eps_start = 1.0;
  double eps_end = 0.1;
  double decay_frac = 0.2;  // fraction of training over which epsilon anneals

  double at(double progress) const {
    if (decay_frac <= 0.0) return eps_end;
    double t = std::clamp(progress / decay_frac, 0.0, 1.0);
    return eps_start + t * (eps_end - eps_start);
  }
};

// Network input layout per env: FourRoom uses a one-hot of the x-y cell for
// both state and goal; continuous envs use raw coordinates scaled to [0,1].
inline int encoder_input_dim(const EnvSpec& spec) {
  if (spec.discrete()) return 2 * spec.grid_w() * spec.grid_h();
  return spec.state_dim + spec.goal_dim;
}

namespace detail {

inline int grid_cell_index(const EnvSpec& spec, double x, double y) {
  int ix = static_cast<int>(std::llround(x));
  int iy = static_cast<int>(std::llround(y));
  return iy * spec.grid_w() + ix;
}

template <typename Row>
void encode_pair_into(const EnvSpec& spec, const State& s, const Goal& g, Row&& row) {
  if (spec.discrete()) {
    int cells = spec.grid_w() * spec.grid_h();
    row.setZero();
    row[grid_cell_index(spec, s.v[0], s.v[1])] = 1.0;
    row[cells + grid_cell_index(spec, g.v[0], g.v[1])] = 1.0;
  } else {
    for (int i = 0; i < spec.state_dim; ++i) row[i] = s.v[i] / spec.box;
    for (int i = 0; i < spec.goal_dim; ++i) row[spec.state_dim + i] = g.v[i] / spec.box;
  }
}

}  // namespace detail

// Goal-conditioned DQN. Rewards are in {-1, 0}, so true values live in
// [-1/(1-gamma), 0]; distance reads and bootstrap targets clamp the network
// output into that range. Action selection and the TD loss use raw outputs.
struct UvfaAgent {
  EnvSpec env;
  Mlp online;
  Mlp target;
  AdamState opt;
  double gamma = 0.99;
  EpsSchedule eps_sched;
  long env_steps = 0;
  long total_steps = 1;

  double v_min() const { return -1.0 / (1.0 - gamma); }
  double epsilon() const {
    return eps_sched.at(static_cast<double>(env_steps) / static_cast<double>(total_steps));
  }

  Eigen::VectorXd encode(const State& s, const Goal& g) const {
    Eigen::VectorXd x(encoder_input_dim(env));
    detail::encode_pair_into(env, s, g, x);
    return x;
  }

  Eigen::VectorXd q_values(const State& s, const Goal& g) const {
    return forward(online, encode(s, g));
  }

  // value prediction clamped into the feasible range
  double value(const State& s, const Goal& g) const {
    return std::clamp(q_values(s, g).maxCoeff(), v_min(), 0.0);
  }

  int act_greedy(const State& s, const Goal& g) const { return argmax_low(q_values(s, g)); }

  int act(const State& s, const Goal& g, bool explore, std::mt19937_64& rng) const {
    if (explore) {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (coin(rng) < epsilon()) {
        std::uniform_int_distribution<int> pick(0, env.action_count - 1);
        return pick(rng);
      }
    }
    return act_greedy(s, g);
  }

  DistanceEstimate distance(const State& s, const Goal& g, double clip) const {
    if (clip <= 0.0) throw std::invalid_argument("distance: clip must be > 0");
    double d = std::max(0.0, -value(s, g));
    return DistanceEstimate{d, d <= clip};
  }

  // Distance from one state to many goals in a single batched forward pass.
  Eigen::VectorXd distance_row(const State& s, const std::vector<Goal>& goals) const {
    int n = static_cast<int>(goals.size());
    Eigen::MatrixXd X(n, encoder_input_dim(env));
    for (int i = 0; i < n; ++i)
      detail::encode_pair_into(env, s, goals[i], X.row(i));
    Eigen::MatrixXd Q = forward_batch(online, X).output();
    Eigen::VectorXd v = Q.rowwise().maxCoeff().cwiseMax(v_min()).cwiseMin(0.0);
    return (-v).cwiseMax(0.0);
  }

  // Pairwise distances, rows = source states, cols = target goals.
  Eigen::MatrixXd distance_matrix(const std::vector<State>& states,
                                  const std::vector<Goal>& goals) const {
    int ns = static_cast<int>(states.size());
    int ng = static_cast<int>(goals.size());
    Eigen::MatrixXd X(static_cast<long>(ns) * ng, encoder_input_dim(env));
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < ng; ++j)
        detail::encode_pair_into(env, states[i], goals[j], X.row(static_cast<long>(i) * ng + j));
    Eigen::MatrixXd Q = forward_batch(online, X).output();
    Eigen::VectorXd v = Q.rowwise().maxCoeff().cwiseMax(v_min()).cwiseMin(0.0);
    Eigen::VectorXd d = (-v).cwiseMax(0.0);
    return Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
               d.data(), ns, ng)
        .eval();
  }

  // One Adam step on the mean squared TD error over the batch; returns the
  // pre-update loss. Targets bootstrap from the clamped target net and are
  // clipped into the feasible value range.
  double td_update(const std::vector<TransitionRecord>& batch) {
    if (batch.empty()) throw std::invalid_argument("td_update: empty batch");
    int n = static_cast<int>(batch.size());
    int in_dim = encoder_input_dim(env);
    Eigen::MatrixXd X(n, in_dim), Xn(n, in_dim);
    for (int i = 0; i < n; ++i) {
      detail::encode_pair_into(env, batch[i].s, batch[i].g, X.row(i));
      detail::encode_pair_into(env, batch[i].s_next, batch[i].g, Xn.row(i));
    }
    Eigen::MatrixXd Qn = forward_batch(target, Xn).output();
    Eigen::VectorXd max_next = Qn.rowwise().maxCoeff().cwiseMax(v_min()).cwiseMin(0.0);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      double t = batch[i].reached ? batch[i].r : batch[i].r + gamma * max_next[i];
      y[i] = std::clamp(t, v_min(), 0.0);
    }
    ForwardCache cache = forward_batch(online, X);
    const Eigen::MatrixXd& Q = cache.output();
    Eigen::MatrixXd grad_out = Eigen::MatrixXd::Zero(n, env.action_count);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      double diff = Q(i, batch[i].a) - y[i];
      loss += diff * diff;
      grad_out(i, batch[i].a) = 2.0 * diff / n;
    }
    loss /= n;
    if (!std::isfinite(loss)) throw std::runtime_error("td_update: non-finite loss");
    Grads g = backward_batch(online, cache, grad_out);
    adam_step(online, g, opt);
    return loss;
  }

  // target <- tau * online + (1 - tau) * target
  void sync_target(double tau) {
    if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("sync_target: tau in (0,1]");
    for (int i = 0; i < online.n_layers(); ++i) {
      target.W[i] = tau * online.W[i] + (1.0 - tau) * target.W[i];
      target.b[i] = tau * online.b[i] + (1.0 - tau) * target.b[i];
    }
  }
};

inline UvfaAgent make_uvfa_agent(const EnvSpec& spec, const std::vector<int>& hidden,
                                 double gamma, double lr, std::uint64_t seed) {
  if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must be in (0,1)");
  UvfaAgent a;
  a.env = spec;
  a.gamma = gamma;
  std::vector<int> dims;
  dims.push_back(encoder_input_dim(spec));
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(spec.action_count);
  auto rng = make_rng(seed, Stream::AgentInit);
  a.online = make_mlp(dims, rng);
  a.target = a.online;
  a.opt = make_adam(a.online, lr);
  return a;
}

// Inverts the geometric reward sum instead of reading -V directly; optional
// mode for the ablation harness. V must lie in (-1/(1-gamma), 0].
inline double geometric_steps(double value, double gamma) {
  double base = 1.0 + value * (1.0 - gamma);
  if (base <= 0.0) return kInf;
  if (value >= 0.0) return 0.0;
  return std::log(base) / std::log(gamma);
}

inline nlohmann::json agent_to_json(const UvfaAgent& a) {
  return nlohmann::json{{"format", "goalmap-agent-v1"},
                        {"env", a.env},
                        {"gamma", a.gamma},
                        {"env_steps", a.env_steps},
                        {"total_steps", a.total_steps},
                        {"online", mlp_to_json(a.online)},
                        {"target", mlp_to_json(a.target)}};
}

inline UvfaAgent agent_from_json(const nlohmann::json& j) {
  if (j.at("format") != "goalmap-agent-v1") throw std::runtime_error("bad agent checkpoint");
  UvfaAgent a;
  a.env = j.at("env").get<EnvSpec>();
  a.gamma = j.at("gamma");
  a.env_steps = j.at("env_steps");
  a.total_steps = j.at("total_steps");
  a.online = mlp_from_json(j.at("online"));
  a.target = mlp_from_json(j.at("target"));
  a.opt = make_adam(a.online);
  return a;
}

}  // namespace goalmap
