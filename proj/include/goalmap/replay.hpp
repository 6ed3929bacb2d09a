#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "goalmap/core.hpp"
#include "goalmap/env.hpp"

namespace goalmap {

struct TransitionRecord {
  State s;
  int a = 0;
  double r = -1.0;
  State s_next;
  Goal g;
  std::int64_t episode_id = -1;
  int step_index = 0;
  bool reached = false;
};

// Episode-granular replay with hindsight relabeling restricted to a fixed
// near-future horizon. Episodes are stored whole because relabeling needs the
// states that follow each transition; eviction drops whole episodes.
class ReplayBuffer {
 public:
  ReplayBuffer(EnvSpec spec, size_t capacity, int her_k, double her_ratio)
      : spec_(std::move(spec)), capacity_(capacity), her_k_(her_k), her_ratio_(her_ratio) {
    if (her_k_ < 1) throw std::invalid_argument("her horizon k must be >= 1");
    if (her_ratio_ < 0.0 || her_ratio_ > 1.0)
      throw std::invalid_argument("her ratio must be in [0,1]");
  }

  size_t size() const { return size_; }
  size_t n_episodes() const { return episodes_.size(); }
  bool empty() const { return size_ == 0; }
  int her_k() const { return her_k_; }
  double her_ratio() const { return her_ratio_; }
  const EnvSpec& spec() const { return spec_; }

  void store_episode(std::vector<TransitionRecord> ep) {
    if (ep.empty()) return;
    for (int i = 0; i < static_cast<int>(ep.size()); ++i) {
      ep[i].episode_id = next_episode_id_;
      ep[i].step_index = i;
    }
    ++next_episode_id_;
    size_ += ep.size();
    episodes_.push_back(std::move(ep));
    while (size_ > capacity_ && episodes_.size() > 1) {
      size_ -= episodes_.front().size();
      episodes_.pop_front();
    }
    cum_.resize(episodes_.size());
    size_t acc = 0;
    for (size_t i = 0; i < episodes_.size(); ++i) {
      acc += episodes_[i].size();
      cum_[i] = acc;
    }
  }

  // Uniform over stored transitions; with probability her_ratio the goal is
  // replaced by the projection of a state up to k steps ahead in the same
  // episode, and reward/reached are recomputed with the env's reward rule.
  std::vector<TransitionRecord> sample_batch(int n, std::mt19937_64& rng) const {
    if (empty()) throw std::runtime_error("sample_batch: buffer is empty");
    std::vector<TransitionRecord> out;
    out.reserve(n);
    std::uniform_int_distribution<size_t> pick(0, size_ - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      auto [ei, ti] = locate(pick(rng));
      TransitionRecord rec = episodes_[ei][ti];
      if (coin(rng) < her_ratio_) {
        int remaining = static_cast<int>(episodes_[ei].size()) - ti;
        std::uniform_int_distribution<int> doff(1, std::min(her_k_, remaining));
        int delta = doff(rng);
        rec.g = proj(spec_, episodes_[ei][ti + delta - 1].s_next);
        auto [r, reached] = reward_of(spec_, rec.s_next, rec.g);
        rec.r = r;
        rec.reached = reached;
      }
      out.push_back(std::move(rec));
    }
    return out;
  }

  // Uniform draw of stored states (the s of each transition): distinct
  // transitions when the buffer is big enough, with replacement otherwise.
  std::vector<State> presample_states(int m, std::mt19937_64& rng) const {
    if (empty()) throw std::runtime_error("presample: buffer is empty");
    if (m < 1) throw std::invalid_argument("presample: m must be >= 1");
    std::vector<State> out;
    out.reserve(m);
    std::uniform_int_distribution<size_t> pick(0, size_ - 1);
    if (size_ >= 2 * static_cast<size_t>(m)) {
      std::unordered_set<size_t> seen;
      while (static_cast<int>(out.size()) < m) {
        size_t idx = pick(rng);
        if (!seen.insert(idx).second) continue;
        auto [ei, ti] = locate(idx);
        out.push_back(episodes_[ei][ti].s);
      }
    } else if (size_ >= static_cast<size_t>(m)) {
      std::vector<size_t> idx(size_);
      for (size_t i = 0; i < size_; ++i) idx[i] = i;
      for (int i = 0; i < m; ++i) {
        std::uniform_int_distribution<size_t> swap_pick(i, size_ - 1);
        std::swap(idx[i], idx[swap_pick(rng)]);
        auto [ei, ti] = locate(idx[i]);
        out.push_back(episodes_[ei][ti].s);
      }
    } else {
      for (int i = 0; i < m; ++i) {
        auto [ei, ti] = locate(pick(rng));
        out.push_back(episodes_[ei][ti].s);
      }
    }
    return out;
  }

  const std::deque<std::vector<TransitionRecord>>& episodes() const { return episodes_; }

 private:
  std::pair<size_t, int> locate(size_t flat) const {
    auto it = std::upper_bound(cum_.begin(), cum_.end(), flat);
    size_t ei = static_cast<size_t>(it - cum_.begin());
    size_t before = ei == 0 ? 0 : cum_[ei - 1];
    return {ei, static_cast<int>(flat - before)};
  }

  EnvSpec spec_;
  size_t capacity_;
  int her_k_;
  double her_ratio_;
  size_t size_ = 0;
  std::int64_t next_episode_id_ = 0;
  std::deque<std::vector<TransitionRecord>> episodes_;
  std::vector<size_t> cum_;  // cumulative transition counts per episode
};

// Compact binary snapshot so eval/sweep runs can rebuild maps from a stored
// run: JSON header line (env + her params), then raw little-endian records.
inline void save_buffer(const ReplayBuffer& buf, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_buffer: cannot open " + path);
  nlohmann::json header{{"format", "goalmap-buffer-v1"},
                        {"env", buf.spec()},
                        {"her_k", buf.her_k()},
                        {"her_ratio", buf.her_ratio()},
                        {"n_episodes", buf.n_episodes()}};
  std::string h = header.dump();
  f << h << '\n';
  auto put_u64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_f64 = [&](double v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  for (const auto& ep : buf.episodes()) {
    put_u64(ep.size());
    for (const auto& r : ep) {
      for (int i = 0; i < r.s.v.size(); ++i) put_f64(r.s.v[i]);
      put_u64(static_cast<std::uint64_t>(r.a));
      put_f64(r.r);
      for (int i = 0; i < r.s_next.v.size(); ++i) put_f64(r.s_next.v[i]);
      for (int i = 0; i < r.g.v.size(); ++i) put_f64(r.g.v[i]);
      put_u64(r.reached ? 1 : 0);
    }
  }
  if (!f) throw std::runtime_error("save_buffer: write failed for " + path);
}

inline ReplayBuffer load_buffer(const std::string& path, size_t capacity = 0) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_buffer: cannot open " + path);
  std::string line;
  std::getline(f, line);
  nlohmann::json header = nlohmann::json::parse(line);
  if (header.at("format") != "goalmap-buffer-v1")
    throw std::runtime_error("load_buffer: bad format");
  EnvSpec spec = header.at("env").get<EnvSpec>();
  size_t n_episodes = header.at("n_episodes");
  if (capacity == 0) capacity = std::numeric_limits<size_t>::max();
  ReplayBuffer buf(spec, capacity, header.at("her_k"), header.at("her_ratio"));
  auto get_u64 = [&] {
    std::uint64_t v;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  auto get_f64 = [&] {
    double v;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  for (size_t e = 0; e < n_episodes; ++e) {
    size_t len = get_u64();
    std::vector<TransitionRecord> ep(len);
    for (auto& r : ep) {
      r.s.v.resize(spec.state_dim);
      for (int i = 0; i < spec.state_dim; ++i) r.s.v[i] = get_f64();
      r.a = static_cast<int>(get_u64());
      r.r = get_f64();
      r.s_next.v.resize(spec.state_dim);
      for (int i = 0; i < spec.state_dim; ++i) r.s_next.v[i] = get_f64();
      r.g.v.resize(spec.goal_dim);
      for (int i = 0; i < spec.goal_dim; ++i) r.g.v[i] = get_f64();
      r.reached = get_u64() != 0;
    }
    if (!f) throw std::runtime_error("load_buffer: truncated file");
    buf.store_episode(std::move(ep));
  }
  return buf;
}

}  // namespace goalmap
