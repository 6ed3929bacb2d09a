#pragma once

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "goalmap/core.hpp"

namespace goalmap {

// Plain fully-connected net: rectifier on hidden layers, identity output.
// Double precision throughout so finite-difference gradient checks stay tight.
struct Mlp {
  std::vector<Eigen::MatrixXd> W;  // layer i maps dims[i] -> dims[i+1]
  std::vector<Eigen::VectorXd> b;

  int n_layers() const { return static_cast<int>(W.size()); }
  int in_dim() const { return static_cast<int>(W.front().cols()); }
  int out_dim() const { return static_cast<int>(W.back().rows()); }

  size_t param_count() const {
    size_t n = 0;
    for (int i = 0; i < n_layers(); ++i) n += W[i].size() + b[i].size();
    return n;
  }
};

inline Mlp make_mlp(const std::vector<int>& dims, std::mt19937_64& rng) {
  if (dims.size() < 2) throw std::invalid_argument("mlp needs at least one layer");
  Mlp p;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    double scale = std::sqrt(2.0 / dims[i]);
    Eigen::MatrixXd w(dims[i + 1], dims[i]);
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) w(r, c) = scale * gauss(rng);
    p.W.push_back(std::move(w));
    p.b.push_back(Eigen::VectorXd::Zero(dims[i + 1]));
  }
  return p;
}

inline Mlp zeros_like(const Mlp& p) {
  Mlp z;
  for (int i = 0; i < p.n_layers(); ++i) {
    z.W.push_back(Eigen::MatrixXd::Zero(p.W[i].rows(), p.W[i].cols()));
    z.b.push_back(Eigen::VectorXd::Zero(p.b[i].size()));
  }
  return z;
}

// Activations kept from a forward pass, as needed by backward.
// acts[0] is the input batch (rows = samples); acts[i] is layer i's output
// after the rectifier (identity on the last layer).
struct ForwardCache {
  std::vector<Eigen::MatrixXd> acts;
  const Eigen::MatrixXd& output() const { return acts.back(); }
};

inline ForwardCache forward_batch(const Mlp& p, const Eigen::MatrixXd& X) {
  if (X.cols() != p.in_dim()) throw std::invalid_argument("forward: input dim mismatch");
  ForwardCache c;
  c.acts.reserve(p.n_layers() + 1);
  c.acts.push_back(X);
  for (int i = 0; i < p.n_layers(); ++i) {
    Eigen::MatrixXd z = (c.acts.back() * p.W[i].transpose()).rowwise() + p.b[i].transpose();
    if (i + 1 < p.n_layers()) z = z.cwiseMax(0.0);
    c.acts.push_back(std::move(z));
  }
  return c;
}

inline Eigen::VectorXd forward(const Mlp& p, const Eigen::VectorXd& x) {
  return forward_batch(p, x.transpose()).output().row(0).transpose();
}

struct Grads {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;
};

// Exact reverse-mode gradients of forward_batch w.r.t. parameters, for the
// scalar loss whose gradient w.r.t. the network output is grad_out.
inline Grads backward_batch(const Mlp& p, const ForwardCache& c,
                            const Eigen::MatrixXd& grad_out) {
  if (grad_out.rows() != c.acts[0].rows() || grad_out.cols() != p.out_dim())
    throw std::invalid_argument("backward: grad_out shape mismatch");
  Grads g;
  g.W.resize(p.n_layers());
  g.b.resize(p.n_layers());
  Eigen::MatrixXd delta = grad_out;
  for (int i = p.n_layers() - 1; i >= 0; --i) {
    g.W[i].noalias() = delta.transpose() * c.acts[i];
    g.b[i] = delta.colwise().sum().transpose();
    if (i > 0) {
      Eigen::MatrixXd mask = (c.acts[i].array() > 0.0).cast<double>();
      delta = (delta * p.W[i]).cwiseProduct(mask);
    }
  }
  return g;
}

inline Grads backward(const Mlp& p, const Eigen::VectorXd& x, const Eigen::VectorXd& grad_out) {
  return backward_batch(p, forward_batch(p, x.transpose()), grad_out.transpose());
}

struct AdamState {
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline AdamState make_adam(const Mlp& p, double lr = 1e-3) {
  AdamState st;
  st.lr = lr;
  for (int i = 0; i < p.n_layers(); ++i) {
    st.mW.push_back(Eigen::MatrixXd::Zero(p.W[i].rows(), p.W[i].cols()));
    st.vW.push_back(Eigen::MatrixXd::Zero(p.W[i].rows(), p.W[i].cols()));
    st.mb.push_back(Eigen::VectorXd::Zero(p.b[i].size()));
    st.vb.push_back(Eigen::VectorXd::Zero(p.b[i].size()));
  }
  return st;
}

// Standard bias-corrected Adam update, in place. Training halts loudly on
// non-finite gradients rather than silently corrupting the parameters.
inline void adam_step(Mlp& p, const Grads& g, AdamState& st) {
  for (int i = 0; i < p.n_layers(); ++i)
    if (!g.W[i].allFinite() || !g.b[i].allFinite())
      throw std::runtime_error("adam_step: non-finite gradient");
  st.step += 1;
  double c1 = 1.0 - std::pow(st.beta1, st.step);
  double c2 = 1.0 - std::pow(st.beta2, st.step);
  for (int i = 0; i < p.n_layers(); ++i) {
    st.mW[i] = st.beta1 * st.mW[i] + (1.0 - st.beta1) * g.W[i];
    st.vW[i] = st.beta2 * st.vW[i] + (1.0 - st.beta2) * g.W[i].cwiseProduct(g.W[i]);
    st.mb[i] = st.beta1 * st.mb[i] + (1.0 - st.beta1) * g.b[i];
    st.vb[i] = st.beta2 * st.vb[i] + (1.0 - st.beta2) * g.b[i].cwiseProduct(g.b[i]);
    p.W[i].array() -=
        st.lr * (st.mW[i].array() / c1) / ((st.vW[i].array() / c2).sqrt() + st.eps);
    p.b[i].array() -=
        st.lr * (st.mb[i].array() / c1) / ((st.vb[i].array() / c2).sqrt() + st.eps);
  }
}

inline nlohmann::json mlp_to_json(const Mlp& p) {
  nlohmann::json layers = nlohmann::json::array();
  for (int i = 0; i < p.n_layers(); ++i) {
    std::vector<double> w(p.W[i].data(), p.W[i].data() + p.W[i].size());
    std::vector<double> b(p.b[i].data(), p.b[i].data() + p.b[i].size());
    layers.push_back({{"rows", p.W[i].rows()}, {"cols", p.W[i].cols()}, {"w", w}, {"b", b}});
  }
  return nlohmann::json{{"format", "goalmap-mlp-v1"}, {"layers", layers}};
}

inline Mlp mlp_from_json(const nlohmann::json& j) {
  if (j.at("format") != "goalmap-mlp-v1") throw std::runtime_error("bad mlp checkpoint format");
  Mlp p;
  for (const auto& layer : j.at("layers")) {
    long rows = layer.at("rows"), cols = layer.at("cols");
    auto w = layer.at("w").get<std::vector<double>>();
    auto b = layer.at("b").get<std::vector<double>>();
    if (static_cast<long>(w.size()) != rows * cols || static_cast<long>(b.size()) != rows)
      throw std::runtime_error("mlp checkpoint shape mismatch");
    p.W.push_back(Eigen::Map<Eigen::MatrixXd>(w.data(), rows, cols));
    p.b.push_back(Eigen::Map<Eigen::VectorXd>(b.data(), rows));
  }
  if (p.W.empty()) throw std::runtime_error("mlp checkpoint has no layers");
  return p;
}

}  // namespace goalmap
