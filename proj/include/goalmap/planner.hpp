#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "goalmap/core.hpp"
#include "goalmap/env.hpp"
#include "goalmap/map.hpp"
#include "goalmap/replay.hpp"

namespace goalmap {

struct PlanStep {
  Goal subgoal;
  bool subgoal_is_final = false;  // the subgoal is the episode goal itself
  double est_total = kInf;        // d(s, vertex) + dist_to_goal[vertex]
  int chosen_vertex = -1;
  bool fallback = false;          // no reliable vertex; routing straight at the goal
};

// Pick the next subgoal: among vertices whose local distance from s is
// reliable (<= tau) and whose map distance to the goal is finite, minimize
// d(s, v) + D_v (ties to the lowest index). The goal vertex competes like any
// other. With no qualifying vertex the flat policy is the only signal left,
// so the episode goal is returned directly.
//
// When the winning vertex is already reached (the agent is standing on it,
// up to the env tolerance), conditioning on it would produce no motion, so
// the subgoal advances along the vertex's shortest-path chain toward the
// goal. est_total always reports the argmin value itself.
template <typename Agent>
PlanStep next_subgoal(const State& s, const LandmarkGraph& g, const Agent& agent) {
  Eigen::VectorXd local = agent.distance_row(s, g.vertex_goals);
  int best = -1;
  double best_score = kInf;
  for (int i = 0; i < static_cast<int>(g.vertex_goals.size()); ++i) {
    if (local[i] > g.tau || std::isinf(g.dist_to_goal[i])) continue;
    double score = local[i] + g.dist_to_goal[i];
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  PlanStep step;
  if (best < 0) {
    step.subgoal = g.goal;
    step.subgoal_is_final = true;
    step.est_total = local[g.goal_index];
    step.chosen_vertex = g.goal_index;
    step.fallback = true;
    return step;
  }
  step.est_total = best_score;
  step.chosen_vertex = best;
  Goal achieved = proj(g.env, s);
  int hop = best;
  int guard = static_cast<int>(g.vertex_goals.size());
  while (hop != g.goal_index && goal_reached(g.env, achieved, g.vertex_goals[hop]) &&
         guard-- > 0) {
    int succ = -1;
    double succ_score = kInf;
    for (int j = 0; j < static_cast<int>(g.vertex_goals.size()); ++j) {
      if (j == hop || std::isinf(g.w(hop, j)) || std::isinf(g.dist_to_goal[j])) continue;
      double sc = g.w(hop, j) + g.dist_to_goal[j];
      if (sc < succ_score) {
        succ_score = sc;
        succ = j;
      }
    }
    if (succ < 0) break;
    hop = succ;
  }
  step.subgoal = g.vertex_goals[hop];
  step.subgoal_is_final = (hop == g.goal_index);
  return step;
}

// Map-routed distance estimate: min over reliable vertices of d(s,v) + D_v,
// +inf when nothing qualifies.
template <typename Agent>
double planned_distance(const State& s, const LandmarkGraph& g, const Agent& agent) {
  PlanStep step = next_subgoal(s, g, agent);
  return step.fallback ? kInf : step.est_total;
}

enum class ControlMode { Planner, FlatUvfa };

struct TraceStep {
  State s;
  int action = 0;
  double reward = -1.0;
  Goal subgoal;
};

struct EpisodeTrace {
  std::vector<TraceStep> steps;
  State final_state;
  bool success = false;
  bool truncated = false;
  int steps_used = 0;
};

// Run one episode from a reset (s0, g). Planner mode re-plans the subgoal
// every step; FlatUvfa conditions directly on the episode goal. An episode
// that starts inside the goal region succeeds immediately with 0 steps.
template <typename Agent>
EpisodeTrace run_episode(const EnvSpec& spec, const State& s0, const Goal& g,
                         const Agent& agent, const LandmarkGraph* graph, ControlMode mode,
                         int max_steps, bool explore, std::mt19937_64& rng) {
  EpisodeTrace trace;
  State s = s0;
  if (goal_reached(spec, proj(spec, s), g)) {
    trace.final_state = s;
    trace.success = true;
    return trace;
  }
  for (int t = 0; t < max_steps; ++t) {
    Goal subgoal = g;
    if (mode == ControlMode::Planner && graph != nullptr)
      subgoal = next_subgoal(s, *graph, agent).subgoal;
    int a = agent.act(s, subgoal, explore, rng);
    StepOutcome out = step(spec, s, a, g);
    trace.steps.push_back(TraceStep{s, a, out.reward, subgoal});
    s = out.next_state;
    if (out.reached) {
      trace.success = true;
      break;
    }
  }
  trace.final_state = s;
  trace.steps_used = static_cast<int>(trace.steps.size());
  trace.truncated = !trace.success;
  return trace;
}

inline std::vector<TransitionRecord> trace_to_records(const EnvSpec& spec,
                                                      const EpisodeTrace& trace, const Goal& g) {
  std::vector<TransitionRecord> recs;
  recs.reserve(trace.steps.size());
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    TransitionRecord r;
    r.s = trace.steps[i].s;
    r.a = trace.steps[i].action;
    r.r = trace.steps[i].reward;
    r.s_next = i + 1 < trace.steps.size() ? trace.steps[i + 1].s : trace.final_state;
    r.g = g;
    r.reached = trace.steps[i].reward == 0.0;
    recs.push_back(std::move(r));
  }
  return recs;
}

inline nlohmann::json trace_to_json(const EpisodeTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& st : trace.steps)
    steps.push_back({{"s", std::vector<double>(st.s.v.data(), st.s.v.data() + st.s.v.size())},
                     {"a", st.action},
                     {"r", st.reward},
                     {"subgoal", std::vector<double>(st.subgoal.v.data(),
                                                     st.subgoal.v.data() + st.subgoal.v.size())}});
  return nlohmann::json{{"format", "goalmap-trace-v1"},
                        {"steps", steps},
                        {"final_state", std::vector<double>(trace.final_state.v.data(),
                                                            trace.final_state.v.data() +
                                                                trace.final_state.v.size())},
                        {"success", trace.success},
                        {"truncated", trace.truncated},
                        {"steps_used", trace.steps_used}};
}

}  // namespace goalmap
