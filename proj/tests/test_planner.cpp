#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "goalmap/planner.hpp"
#include "oracles.hpp"

using namespace goalmap;

namespace {

// scripted local distances: row i of d is distance_row from probe state i
struct ScriptedAgent {
  Eigen::VectorXd row;
  Eigen::VectorXd distance_row(const State&, const std::vector<Goal>&) const { return row; }
  int act(const State&, const Goal&, bool, std::mt19937_64&) const { return 0; }
  int act_greedy(const State&, const Goal&) const { return 0; }
};

LandmarkGraph one_landmark_graph(double w_to_goal, double tau) {
  LandmarkGraph g;
  g.env = four_room_spec();
  g.landmarks = {State{vec2(3, 3)}};
  g.goal = Goal{vec2(9, 9)};
  g.vertex_goals = {Goal{vec2(3, 3)}, g.goal};
  g.goal_index = 1;
  g.tau = tau;
  g.n_landmarks = 1;
  g.w = Eigen::MatrixXd::Constant(2, 2, kInf);
  g.w.diagonal().setZero();
  g.w(0, 1) = w_to_goal;
  g.dist_to_goal = shortest_paths_to_goal(g.w, 1);
  return g;
}

}  // namespace

TEST_CASE("next_subgoal: next to the goal the goal vertex wins with zero estimate") {
  EnvSpec spec = four_room_spec();
  oracle::ExactAgent agent{spec};
  std::vector<State> landmarks = {State{vec2(1, 1)}, State{vec2(2, 1)}};
  Goal goal{vec2(9, 9)};
  LandmarkGraph g = build_graph(landmarks, goal, spec, agent, 5.0);
  PlanStep step = next_subgoal(State{vec2(8, 9)}, g, agent);
  REQUIRE(step.subgoal_is_final);
  REQUIRE(!step.fallback);
  REQUIRE(step.chosen_vertex == g.goal_index);
  REQUIRE(step.est_total == 0.0);
}

TEST_CASE("next_subgoal: forced argmin through the only reliable landmark") {
  LandmarkGraph g = one_landmark_graph(7.0, 10.0);
  ScriptedAgent agent;
  agent.row = Eigen::VectorXd(2);
  agent.row << 3.0, 50.0;  // d(s, l) = 3 reliable; direct goal 50 unreliable
  PlanStep step = next_subgoal(State{vec2(0, 0)}, g, agent);
  REQUIRE(!step.fallback);
  REQUIRE(!step.subgoal_is_final);
  REQUIRE(step.chosen_vertex == 0);
  REQUIRE(step.est_total == 10.0);
  REQUIRE(step.subgoal.v == vec2(3, 3));
  REQUIRE(planned_distance(State{vec2(0, 0)}, g, agent) == 10.0);
}

TEST_CASE("next_subgoal: with no reliable vertex the episode goal is the fallback") {
  LandmarkGraph g = one_landmark_graph(7.0, 10.0);
  ScriptedAgent agent;
  agent.row = Eigen::VectorXd(2);
  agent.row << 20.0, 50.0;  // nothing within tau
  PlanStep step = next_subgoal(State{vec2(0, 0)}, g, agent);
  REQUIRE(step.fallback);
  REQUIRE(step.subgoal_is_final);
  REQUIRE(step.subgoal.v == g.goal.v);
  REQUIRE(step.est_total == 50.0);
  REQUIRE(std::isinf(planned_distance(State{vec2(0, 0)}, g, agent)));
}

TEST_CASE("next_subgoal: degenerate clipped graph with unreliable goal is unreachable") {
  LandmarkGraph g = one_landmark_graph(kInf, 0.0);
  g.tau = 0.0;
  ScriptedAgent agent;
  agent.row = Eigen::VectorXd(2);
  agent.row << 4.0, 30.0;
  REQUIRE(std::isinf(planned_distance(State{vec2(0, 0)}, g, agent)));
}

TEST_CASE("next_subgoal: est_total equals planned_distance unless the fallback fired") {
  EnvSpec spec = four_room_spec();
  oracle::ExactAgent agent{spec};
  auto rng = make_rng(21, Stream::MapBuild);
  auto cells = free_cells(spec);
  std::uniform_int_distribution<size_t> pick(0, cells.size() - 1);
  std::vector<State> landmarks;
  for (int i = 0; i < 30; ++i) {
    auto [x, y] = cells[pick(rng)];
    landmarks.push_back(State{vec2(x, y)});
  }
  LandmarkGraph g = build_graph(landmarks, Goal{vec2(9, 9)}, spec, agent, 6.0);
  for (int i = 0; i < 50; ++i) {
    auto [x, y] = cells[pick(rng)];
    State s{vec2(x, y)};
    PlanStep step = next_subgoal(s, g, agent);
    double pd = planned_distance(s, g, agent);
    if (step.fallback) {
      REQUIRE(std::isinf(pd));
    } else {
      REQUIRE(step.est_total == pd);
      // the chosen vertex is locally reliable
      REQUIRE(agent.distance_row(s, g.vertex_goals)[step.chosen_vertex] <= g.tau);
    }
  }
}

TEST_CASE("run_episode: starting at the goal succeeds in zero steps") {
  EnvSpec spec = four_room_spec();
  oracle::ExactAgent agent{spec};
  auto rng = make_rng(0, Stream::EvalReset);
  EpisodeTrace t = run_episode(spec, State{vec2(4, 4)}, Goal{vec2(4, 4)}, agent, nullptr,
                               ControlMode::FlatUvfa, 50, false, rng);
  REQUIRE(t.success);
  REQUIRE(t.steps_used == 0);
}

TEST_CASE("run_episode: flat mode with a zero net fails far goals and respects the cap") {
  EnvSpec spec = four_room_spec();
  UvfaAgent agent = make_uvfa_agent(spec, {8}, 0.99, 1e-3, 0);
  agent.online = zeros_like(agent.online);
  auto rng = make_rng(1, Stream::EvalReset);
  int successes = 0;
  for (int i = 0; i < 20; ++i) {
    EpisodeTrace t = run_episode(spec, State{vec2(1, 1)}, Goal{vec2(9, 9)}, agent, nullptr,
                                 ControlMode::FlatUvfa, 50, false, rng);
    REQUIRE(t.steps_used <= 50);
    successes += t.success ? 1 : 0;
  }
  REQUIRE(successes == 0);  // argmax of all-zero Q walks into the east wall forever
}

TEST_CASE("run_episode: deterministic given identical inputs") {
  EnvSpec spec = four_room_spec();
  UvfaAgent agent = make_uvfa_agent(spec, {32, 32}, 0.99, 1e-3, 9);
  auto r1 = make_rng(2, Stream::EvalReset);
  auto r2 = make_rng(2, Stream::EvalReset);
  EpisodeTrace a = run_episode(spec, State{vec2(1, 1)}, Goal{vec2(9, 9)}, agent, nullptr,
                               ControlMode::FlatUvfa, 50, true, r1);
  EpisodeTrace b = run_episode(spec, State{vec2(1, 1)}, Goal{vec2(9, 9)}, agent, nullptr,
                               ControlMode::FlatUvfa, 50, true, r2);
  REQUIRE(trace_to_json(a).dump() == trace_to_json(b).dump());
}

TEST_CASE("planner with an exact agent routes through doorways to the far room") {
  EnvSpec spec = four_room_spec();
  oracle::ExactAgent agent{spec};
  auto cells = free_cells(spec);
  std::vector<State> all_states;
  for (auto [x, y] : cells) all_states.push_back(State{vec2(x, y)});
  auto idx = fps_select(all_states, 40, 3);
  std::vector<State> landmarks;
  for (int i : idx) landmarks.push_back(all_states[i]);
  Goal goal{vec2(9, 9)};
  LandmarkGraph g = build_graph(landmarks, goal, spec, agent, 3.0);

  auto rng = make_rng(3, Stream::EvalReset);
  EpisodeTrace t =
      run_episode(spec, State{vec2(1, 1)}, goal, agent, &g, ControlMode::Planner, 50, false, rng);
  REQUIRE(t.success);

  // audit: moves are between free 4-neighbors, and room changes only happen
  // through the four doorway cells
  auto room_of = [](double x, double y) {
    if (x == 5 || y == 5) return -1;  // on a wall line: doorway cell
    return (x > 5 ? 1 : 0) + (y > 5 ? 2 : 0);
  };
  std::vector<State> path;
  for (const auto& st : t.steps) path.push_back(st.s);
  path.push_back(t.final_state);
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    double dx = path[i + 1].v[0] - path[i].v[0];
    double dy = path[i + 1].v[1] - path[i].v[1];
    REQUIRE(std::abs(dx) + std::abs(dy) <= 1.0);
    REQUIRE(grid_free(spec, static_cast<int>(path[i + 1].v[0]),
                      static_cast<int>(path[i + 1].v[1])));
    int r0 = room_of(path[i].v[0], path[i].v[1]);
    int r1 = room_of(path[i + 1].v[0], path[i + 1].v[1]);
    if (r0 >= 0 && r1 >= 0) REQUIRE(r0 == r1);  // no wall can be crossed directly
  }
}

TEST_CASE("trace_to_records rebuilds the transition chain") {
  EnvSpec spec = four_room_spec();
  oracle::ExactAgent agent{spec};
  auto rng = make_rng(4, Stream::EvalReset);
  Goal goal{vec2(3, 4)};
  EpisodeTrace t = run_episode(spec, State{vec2(1, 1)}, goal, agent, nullptr,
                               ControlMode::FlatUvfa, 50, false, rng);
  REQUIRE(t.success);
  auto recs = trace_to_records(spec, t, goal);
  REQUIRE(recs.size() == t.steps.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    auto [r, reached] = reward_of(spec, recs[i].s_next, goal);
    REQUIRE(recs[i].r == r);
    REQUIRE(recs[i].reached == reached);
    if (i + 1 < recs.size()) REQUIRE(recs[i].s_next.v == recs[i + 1].s.v);
  }
  REQUIRE(recs.back().reached);
  nlohmann::json j = trace_to_json(t);
  REQUIRE(j.at("success") == true);
  REQUIRE(j.at("steps").size() == recs.size());
}
