#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <random>

namespace goalmap {

// States and goals are short real vectors (dim <= 4 across all supported
// environments), kept allocation-free.
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::DontAlign, 4, 1>;

struct State {
  SmallVec v;
};

struct Goal {
  SmallVec v;
};

inline SmallVec vec2(double x, double y) {
  SmallVec v(2);
  v << x, y;
  return v;
}

inline SmallVec vec4(double x, double y, double z, double w) {
  SmallVec v(4);
  v << x, y, z, w;
  return v;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Named RNG streams. One global seed fans out to independent generators via
// seed_seq over (seed, role, a, b); the same tuple always yields the same
// stream, which is what per-seed byte-identical reruns rely on.
enum class Stream : std::uint32_t {
  AgentInit = 1,
  TrainReset = 2,
  Behavior = 3,
  Replay = 4,
  MapBuild = 5,
  EvalReset = 6,
  ProbeSet = 7,
  Fps = 8,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream role,
                                std::uint64_t a = 0, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(role),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

// argmax with lowest-index tie break; Eigen's maxCoeff has the same contract
// but we keep the rule explicit since action selection depends on it.
template <typename Derived>
int argmax_low(const Eigen::MatrixBase<Derived>& x) {
  int best = 0;
  for (int i = 1; i < x.size(); ++i)
    if (x[i] > x[best]) best = i;
  return best;
}

}  // namespace goalmap
