#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "relforge/errors.hpp"
#include "relforge/rng.hpp"
#include "relforge/tensor.hpp"

namespace relforge {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Numerically stable softmax; outputs sum to 1 within 1e-12.
inline std::vector<double> softmax(const std::vector<double>& z) {
  if (z.empty()) throw model_error("softmax of an empty vector");
  double mx = *std::max_element(z.begin(), z.end());
  std::vector<double> out(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

inline constexpr double kLogFloor = 1e-12;

inline double nll_loss(const std::vector<double>& dist, std::size_t target) {
  if (target >= dist.size())
    throw model_error("nll_loss target out of range: " + std::to_string(target));
  return -std::log(dist[target] + kLogFloor);
}

// Single-layer LSTM cell parameters. Gate order in the stacked matrices is
// input, forget, output, candidate.
struct LstmCellParams {
  std::size_t hidden = 0;  // H
  std::size_t input = 0;   // E
  Tensor w_x;              // 4H x E
  Tensor w_h;              // 4H x H
  Tensor b;                // 4H

  static LstmCellParams create(std::size_t hidden, std::size_t input) {
    LstmCellParams p;
    p.hidden = hidden;
    p.input = input;
    p.w_x = Tensor::matrix(4 * hidden, input);
    p.w_h = Tensor::matrix(4 * hidden, hidden);
    p.b = Tensor::vector(4 * hidden);
    return p;
  }

  void init(Rng& rng) {
    init_uniform(w_x, rng);
    init_uniform(w_h, rng);
    b.fill(0.0);
    // Forget-gate bias 1.0.
    for (std::size_t i = hidden; i < 2 * hidden; ++i) b.v[i] = 1.0;
  }
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;

  static LstmState zero(std::size_t hidden) {
    return {std::vector<double>(hidden, 0.0), std::vector<double>(hidden, 0.0)};
  }
};

inline LstmState lstm_step(const LstmCellParams& p, const std::vector<double>& x,
                           const LstmState& state) {
  if (x.size() != p.input)
    throw model_error("lstm_step: input length " + std::to_string(x.size()) +
                      " != " + std::to_string(p.input));
  if (state.h.size() != p.hidden || state.c.size() != p.hidden)
    throw model_error("lstm_step: state dimension mismatch");
  const std::size_t H = p.hidden;
  std::vector<double> gates = matvec(p.w_x, x);
  std::vector<double> rec = matvec(p.w_h, state.h);
  for (std::size_t i = 0; i < 4 * H; ++i) gates[i] += rec[i] + p.b.v[i];

  LstmState next;
  next.h.resize(H);
  next.c.resize(H);
  for (std::size_t i = 0; i < H; ++i) {
    double ig = sigmoid(gates[i]);
    double fg = sigmoid(gates[H + i]);
    double og = sigmoid(gates[2 * H + i]);
    double cand = std::tanh(gates[3 * H + i]);
    next.c[i] = fg * state.c[i] + ig * cand;
    next.h[i] = og * std::tanh(next.c[i]);
  }
  return next;
}

struct AttentionParams {
  Tensor w_h;  // A x De (encoder state dim)
  Tensor w_s;  // A x Ds (decoder state dim)
  Tensor b;    // A
  Tensor v;    // A
};

struct AttentionResult {
  std::vector<double> weights;  // over encoder positions
  std::vector<double> context;  // weighted sum of encoder states
};

// e_i = v' tanh(W_h h_i + W_s s_t + b_e); a = softmax(e); context = sum a_i h_i.
inline AttentionResult attention(const std::vector<std::vector<double>>& encoder_states,
                                 const std::vector<double>& decoder_state,
                                 const AttentionParams& p) {
  if (encoder_states.empty()) throw model_error("attention over zero encoder states");
  std::vector<double> ws = matvec(p.w_s, decoder_state);
  std::vector<double> scores(encoder_states.size());
  for (std::size_t i = 0; i < encoder_states.size(); ++i) {
    std::vector<double> pre = matvec(p.w_h, encoder_states[i]);
    double e = 0.0;
    for (std::size_t k = 0; k < pre.size(); ++k)
      e += p.v.v[k] * std::tanh(pre[k] + ws[k] + p.b.v[k]);
    scores[i] = e;
  }
  AttentionResult r;
  r.weights = softmax(scores);
  r.context.assign(encoder_states[0].size(), 0.0);
  for (std::size_t i = 0; i < encoder_states.size(); ++i)
    for (std::size_t k = 0; k < r.context.size(); ++k)
      r.context[k] += r.weights[i] * encoder_states[i][k];
  return r;
}

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-parameter moment estimates; shapes mirror the parameter list handed to
// the first update.
struct AdamState {
  AdamHyper hyper;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long step = 0;
};

inline void adam_update(const std::vector<ParamRef>& params,
                        const std::vector<Tensor>& grads, AdamState& state) {
  if (params.size() != grads.size())
    throw model_error("adam_update: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const auto& p : params) {
      Tensor z = *p.tensor;
      z.fill(0.0);
      state.m.push_back(z);
      state.v.push_back(z);
    }
  }
  ++state.step;
  const auto& hp = state.hyper;
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i].tensor;
    const Tensor& g = grads[i];
    if (!p.same_shape(g))
      throw model_error("adam_update: shape mismatch for " + params[i].name);
    if (!g.all_finite())
      throw model_error("adam_update: non-finite gradient for " + params[i].name);
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (std::size_t k = 0; k < p.v.size(); ++k) {
      m.v[k] = hp.beta1 * m.v[k] + (1.0 - hp.beta1) * g.v[k];
      v.v[k] = hp.beta2 * v.v[k] + (1.0 - hp.beta2) * g.v[k] * g.v[k];
      double mhat = m.v[k] / bc1;
      double vhat = v.v[k] / bc2;
      p.v[k] -= hp.lr * mhat / (std::sqrt(vhat) + hp.eps);
    }
  }
}

// Scale all gradients so their global L2 norm is at most max_norm.
inline double clip_global_norm(std::vector<Tensor>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads)
    for (double x : g.v) sq += x * x;
  double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    double s = max_norm / norm;
    for (auto& g : grads)
      for (double& x : g.v) x *= s;
  }
  return norm;
}

// Central-difference check of analytic gradients. loss_fn re-evaluates the
// loss at the current parameter values; parameters are probed in place and
// restored. Returns the max relative error over all coordinates.
inline double grad_check(const std::function<double()>& loss_fn,
                         const std::vector<ParamRef>& params,
                         const std::vector<Tensor>& analytic_grads,
                         double step = 1e-4) {
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i].tensor;
    for (std::size_t k = 0; k < p.v.size(); ++k) {
      const double saved = p.v[k];
      p.v[k] = saved + step;
      double up = loss_fn();
      p.v[k] = saved - step;
      double down = loss_fn();
      p.v[k] = saved;
      double numeric = (up - down) / (2.0 * step);
      double analytic = analytic_grads[i].v[k];
      double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  return worst;
}

}  // namespace relforge
