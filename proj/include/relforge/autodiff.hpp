#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "relforge/errors.hpp"
#include "relforge/neural.hpp"
#include "relforge/tensor.hpp"

namespace relforge::ad {

// Reverse-mode tape over flat double vectors. One tape is built per forward
// pass and discarded after backward(); leaf gradients accumulate into the
// caller's Tensor sinks, so batching is a plain sum over examples.
class Tape {
public:
  struct Var {
    int id = -1;
  };

  // Leaf fed from an external tensor. After backward(), d(loss)/d(leaf) is
  // added into *grad_sink when one is given.
  Var input(const Tensor& t, Tensor* grad_sink = nullptr) {
    Var v = fresh(t.v);
    nodes_[v.id].sink = grad_sink;
    return v;
  }

  Var constant(std::vector<double> vals) { return fresh(std::move(vals)); }

  const std::vector<double>& value(Var v) const { return nodes_[v.id].val; }
  double scalar(Var v) const { return nodes_[v.id].val[0]; }

  Var matvec(Var w, Var x, std::size_t rows, std::size_t cols) {
    const auto& wv = nodes_[w.id].val;
    const auto& xv = nodes_[x.id].val;
    std::vector<double> out(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < cols; ++c) s += wv[r * cols + c] * xv[c];
      out[r] = s;
    }
    Var y = fresh(std::move(out));
    nodes_[y.id].back = [this, w, x, y, rows, cols]() {
      const auto& g = nodes_[y.id].grad;
      const auto& wv = nodes_[w.id].val;
      const auto& xv = nodes_[x.id].val;
      auto& gw = nodes_[w.id].grad;
      auto& gx = nodes_[x.id].grad;
      for (std::size_t r = 0; r < rows; ++r) {
        const double gr = g[r];
        if (gr == 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) {
          gw[r * cols + c] += gr * xv[c];
          gx[c] += gr * wv[r * cols + c];
        }
      }
    };
    return y;
  }

  Var add(Var a, Var b) {
    const auto& av = nodes_[a.id].val;
    const auto& bv = nodes_[b.id].val;
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
    Var y = fresh(std::move(out));
    nodes_[y.id].back = [this, a, b, y]() {
      const auto& g = nodes_[y.id].grad;
      auto& ga = nodes_[a.id].grad;
      auto& gb = nodes_[b.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i];
        gb[i] += g[i];
      }
    };
    return y;
  }

  Var mul(Var a, Var b) {
    const auto& av = nodes_[a.id].val;
    const auto& bv = nodes_[b.id].val;
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
    Var y = fresh(std::move(out));
    nodes_[y.id].back = [this, a, b, y]() {
      const auto& g = nodes_[y.id].grad;
      const auto& av = nodes_[a.id].val;
      const auto& bv = nodes_[b.id].val;
      auto& ga = nodes_[a.id].grad;
      auto& gb = nodes_[b.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i] * bv[i];
        gb[i] += g[i] * av[i];
      }
    };
    return y;
  }

  Var affine(Var w, Var x, Var b, std::size_t rows, std::size_t cols) {
    return add(matvec(w, x, rows, cols), b);
  }

  Var sigmoid(Var a) {
    const auto& av = nodes_[a.id].val;
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = relforge::sigmoid(av[i]);
    Var y = fresh(std::move(out));
    nodes_[y.id].back = [this, a, y]() {
      const auto& g = nodes_[y.id].grad;
      const auto& yv = nodes_[y.id].val;
      auto& ga = nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * yv[i] * (1.0 - yv[i]);
    };
    return y;
  }

  Var tanh(Var a) {
    const auto& av = nodes_[a.id].val;
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = std::tanh(av[i]);
    Var y = fresh(std::move(out));
    nodes_[y.id].back = [this, a, y]() {
      const auto& g = nodes_[y.id].grad;
      const auto& yv = nodes_[y.id].val;
      auto& ga = nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - yv[i] * yv[i]);
    };
    return y;
  }

  Var slice(Var a, std::size_t offset, std::size_t len) {
    const auto& av = nodes_[a.id].val;
    std::vector<double> out(av.begin() + offset, av.begin() + offset + len);
    Var y = fresh(std::move(out));
    nodes_[y.id].back = [this, a, y, offset, len]() {
      const auto& g = nodes_[y.id].grad;
      auto& ga = nodes_[a.id].grad;
      for (std::size_t i = 0; i < len; ++i) ga[offset + i] += g[i];
    };
    return y;
  }

  Var concat(Var a, Var b) {
    const auto& av = nodes_[a.id].val;
    const auto& bv = nodes_[b.id].val;
    std::vector<double> out;
    out.reserve(av.size() + bv.size());
    out.insert(out.end(), av.begin(), av.end());
    out.insert(out.end(), bv.begin(), bv.end());
    Var y = fresh(std::move(out));
    const std::size_t na = av.size();
    nodes_[y.id].back = [this, a, b, y, na]() {
      const auto& g = nodes_[y.id].grad;
      auto& ga = nodes_[a.id].grad;
      auto& gb = nodes_[b.id].grad;
      for (std::size_t i = 0; i < na; ++i) ga[i] += g[i];
      for (std::size_t i = na; i < g.size(); ++i) gb[i - na] += g[i];
    };
    return y;
  }

  Var dot(Var a, Var b) {
    const auto& av = nodes_[a.id].val;
    const auto& bv = nodes_[b.id].val;
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    Var y = fresh({s});
    nodes_[y.id].back = [this, a, b, y]() {
      const double g = nodes_[y.id].grad[0];
      const auto& av = nodes_[a.id].val;
      const auto& bv = nodes_[b.id].val;
      auto& ga = nodes_[a.id].grad;
      auto& gb = nodes_[b.id].grad;
      for (std::size_t i = 0; i < av.size(); ++i) {
        ga[i] += g * bv[i];
        gb[i] += g * av[i];
      }
    };
    return y;
  }

  Var softmax(Var a) {
    Var y = fresh(relforge::softmax(nodes_[a.id].val));
    nodes_[y.id].back = [this, a, y]() {
      const auto& g = nodes_[y.id].grad;
      const auto& yv = nodes_[y.id].val;
      auto& ga = nodes_[a.id].grad;
      double inner = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) inner += g[i] * yv[i];
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += yv[i] * (g[i] - inner);
    };
    return y;
  }

  // n scalar nodes -> one length-n vector (attention scores).
  Var stack(const std::vector<Var>& scalars) {
    std::vector<double> out(scalars.size());
    for (std::size_t i = 0; i < scalars.size(); ++i) out[i] = nodes_[scalars[i].id].val[0];
    Var y = fresh(std::move(out));
    nodes_[y.id].back = [this, scalars, y]() {
      const auto& g = nodes_[y.id].grad;
      for (std::size_t i = 0; i < scalars.size(); ++i)
        nodes_[scalars[i].id].grad[0] += g[i];
    };
    return y;
  }

  // sum_i weights[i] * vectors[i]; the attention context.
  Var weighted_sum(Var weights, const std::vector<Var>& vectors) {
    const auto& wv = nodes_[weights.id].val;
    const std::size_t dim = nodes_[vectors[0].id].val.size();
    std::vector<double> out(dim, 0.0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      const auto& hv = nodes_[vectors[i].id].val;
      for (std::size_t k = 0; k < dim; ++k) out[k] += wv[i] * hv[k];
    }
    Var y = fresh(std::move(out));
    nodes_[y.id].back = [this, weights, vectors, y]() {
      const auto& g = nodes_[y.id].grad;
      const auto& wv = nodes_[weights.id].val;
      auto& gw = nodes_[weights.id].grad;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        const auto& hv = nodes_[vectors[i].id].val;
        auto& gh = nodes_[vectors[i].id].grad;
        double acc = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
          acc += g[k] * hv[k];
          gh[k] += g[k] * wv[i];
        }
        gw[i] += acc;
      }
    };
    return y;
  }

  // Pointer-generator mixture over the extended vocabulary:
  //   final[k] = p_gen * P_vocab[k]  (k < V)
  //            + (1 - p_gen) * sum_{i: src_ext[i] == k} attn[i]
  Var mix_copy(Var p_vocab, Var attn, Var p_gen, const std::vector<int>& src_ext_ids,
               std::size_t n_oov, std::size_t vocab_size) {
    const auto& pv = nodes_[p_vocab.id].val;
    const auto& av = nodes_[attn.id].val;
    const double pg = nodes_[p_gen.id].val[0];
    std::vector<double> out(vocab_size + n_oov, 0.0);
    for (std::size_t k = 0; k < vocab_size; ++k) out[k] = pg * pv[k];
    for (std::size_t i = 0; i < src_ext_ids.size(); ++i)
      out[static_cast<std::size_t>(src_ext_ids[i])] += (1.0 - pg) * av[i];
    Var y = fresh(std::move(out));
    nodes_[y.id].back = [this, p_vocab, attn, p_gen, y, src_ext_ids, vocab_size]() {
      const auto& g = nodes_[y.id].grad;
      const auto& pv = nodes_[p_vocab.id].val;
      const auto& av = nodes_[attn.id].val;
      const double pg = nodes_[p_gen.id].val[0];
      auto& gpv = nodes_[p_vocab.id].grad;
      auto& gav = nodes_[attn.id].grad;
      double gpg = 0.0;
      for (std::size_t k = 0; k < vocab_size; ++k) {
        gpv[k] += g[k] * pg;
        gpg += g[k] * pv[k];
      }
      for (std::size_t i = 0; i < src_ext_ids.size(); ++i) {
        const double gk = g[static_cast<std::size_t>(src_ext_ids[i])];
        gav[i] += gk * (1.0 - pg);
        gpg -= gk * av[i];
      }
      nodes_[p_gen.id].grad[0] += gpg;
    };
    return y;
  }

  // -log(dist[index] + floor), the per-token NLL.
  Var pick_neg_log(Var dist, int index) {
    const double p = nodes_[dist.id].val[static_cast<std::size_t>(index)];
    Var y = fresh({-std::log(p + kLogFloor)});
    nodes_[y.id].back = [this, dist, y, index, p]() {
      nodes_[dist.id].grad[static_cast<std::size_t>(index)] +=
          nodes_[y.id].grad[0] * (-1.0 / (p + kLogFloor));
    };
    return y;
  }

  Var mean(const std::vector<Var>& scalars) {
    double s = 0.0;
    for (Var v : scalars) s += nodes_[v.id].val[0];
    Var y = fresh({s / static_cast<double>(scalars.size())});
    nodes_[y.id].back = [this, scalars, y]() {
      const double g = nodes_[y.id].grad[0] / static_cast<double>(scalars.size());
      for (Var v : scalars) nodes_[v.id].grad[0] += g;
    };
    return y;
  }

  // Seeds d(loss)=1 and walks the tape in reverse. Leaf gradients are added
  // into their sinks, so repeated calls over different tapes accumulate.
  void backward(Var loss) {
    nodes_[loss.id].grad[0] = 1.0;
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i)
      if (nodes_[i].back) nodes_[i].back();
    for (auto& n : nodes_) {
      if (!n.sink) continue;
      for (std::size_t k = 0; k < n.grad.size(); ++k) n.sink->v[k] += n.grad[k];
    }
  }

  std::size_t node_count() const { return nodes_.size(); }

private:
  struct Node {
    std::vector<double> val;
    std::vector<double> grad;
    std::function<void()> back;
    Tensor* sink = nullptr;
  };

  Var fresh(std::vector<double> vals) {
    Node n;
    n.grad.assign(vals.size(), 0.0);
    n.val = std::move(vals);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  std::vector<Node> nodes_;
};

}  // namespace relforge::ad
