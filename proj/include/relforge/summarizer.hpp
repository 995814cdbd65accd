#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relforge/autodiff.hpp"
#include "relforge/checkpoint.hpp"
#include "relforge/errors.hpp"
#include "relforge/neural.hpp"
#include "relforge/preprocess.hpp"
#include "relforge/textproc.hpp"
#include "relforge/types.hpp"

namespace relforge {

struct SummarizerConfig {
  std::size_t embed_dim = 128;
  std::size_t hidden = 256;
  std::size_t vocab_cap = 30000;
  std::size_t batch = 8;
  std::size_t beam = 4;
  std::size_t max_src = kDefaultMaxSrcTokens;
  std::size_t max_tgt = kDefaultMaxTgtTokens;
  double lr = 1e-3;
  double clip_norm = 2.0;
  std::size_t epochs = 20;
  std::size_t patience = 3;
  std::uint64_t seed = 13;
};

// All learnable tensors of the pointer-generator. The attention dimension
// equals the decoder hidden size; encoder states are 2H (both directions).
struct SummarizerParams {
  std::size_t vocab = 0;   // V
  std::size_t embed = 0;   // E
  std::size_t hidden = 0;  // H

  Tensor embedding;  // V x E, shared by encoder and decoder
  LstmCellParams enc_fwd, enc_bwd;  // H, input E
  LstmCellParams dec;               // H, input E
  Tensor reduce_h_w, reduce_h_b;    // H x 2H, H  (bridge to the decoder)
  Tensor reduce_c_w, reduce_c_b;
  AttentionParams attn;             // w_h: H x 2H, w_s: H x H, b: H, v: H
  Tensor proj1_w, proj1_b;          // H x 3H, H   ([s_t ; h*_t] -> H)
  Tensor proj2_w, proj2_b;          // V x H, V
  Tensor pgen_wh, pgen_ws, pgen_wx, pgen_b;  // 2H, H, E, 1

  static SummarizerParams create(std::size_t vocab, std::size_t embed,
                                 std::size_t hidden) {
    SummarizerParams p;
    p.vocab = vocab;
    p.embed = embed;
    p.hidden = hidden;
    p.embedding = Tensor::matrix(vocab, embed);
    p.enc_fwd = LstmCellParams::create(hidden, embed);
    p.enc_bwd = LstmCellParams::create(hidden, embed);
    p.dec = LstmCellParams::create(hidden, embed);
    p.reduce_h_w = Tensor::matrix(hidden, 2 * hidden);
    p.reduce_h_b = Tensor::vector(hidden);
    p.reduce_c_w = Tensor::matrix(hidden, 2 * hidden);
    p.reduce_c_b = Tensor::vector(hidden);
    p.attn.w_h = Tensor::matrix(hidden, 2 * hidden);
    p.attn.w_s = Tensor::matrix(hidden, hidden);
    p.attn.b = Tensor::vector(hidden);
    p.attn.v = Tensor::vector(hidden);
    p.proj1_w = Tensor::matrix(hidden, 3 * hidden);
    p.proj1_b = Tensor::vector(hidden);
    p.proj2_w = Tensor::matrix(vocab, hidden);
    p.proj2_b = Tensor::vector(vocab);
    p.pgen_wh = Tensor::vector(2 * hidden);
    p.pgen_ws = Tensor::vector(hidden);
    p.pgen_wx = Tensor::vector(embed);
    p.pgen_b = Tensor::vector(1);
    return p;
  }

  void init(Rng& rng) {
    init_uniform(embedding, rng);
    enc_fwd.init(rng);
    enc_bwd.init(rng);
    dec.init(rng);
    init_uniform(reduce_h_w, rng);
    init_uniform(reduce_c_w, rng);
    init_uniform(attn.w_h, rng);
    init_uniform(attn.w_s, rng);
    init_uniform(attn.v, rng);
    init_uniform(proj1_w, rng);
    init_uniform(proj2_w, rng);
    init_uniform(pgen_wh, rng);
    init_uniform(pgen_ws, rng);
    init_uniform(pgen_wx, rng);
  }

  std::vector<ParamRef> params() {
    return {
        {"embedding", &embedding},
        {"enc_fwd.w_x", &enc_fwd.w_x},
        {"enc_fwd.w_h", &enc_fwd.w_h},
        {"enc_fwd.b", &enc_fwd.b},
        {"enc_bwd.w_x", &enc_bwd.w_x},
        {"enc_bwd.w_h", &enc_bwd.w_h},
        {"enc_bwd.b", &enc_bwd.b},
        {"dec.w_x", &dec.w_x},
        {"dec.w_h", &dec.w_h},
        {"dec.b", &dec.b},
        {"reduce_h_w", &reduce_h_w},
        {"reduce_h_b", &reduce_h_b},
        {"reduce_c_w", &reduce_c_w},
        {"reduce_c_b", &reduce_c_b},
        {"attn.w_h", &attn.w_h},
        {"attn.w_s", &attn.w_s},
        {"attn.b", &attn.b},
        {"attn.v", &attn.v},
        {"proj1_w", &proj1_w},
        {"proj1_b", &proj1_b},
        {"proj2_w", &proj2_w},
        {"proj2_b", &proj2_b},
        {"pgen_wh", &pgen_wh},
        {"pgen_ws", &pgen_ws},
        {"pgen_wx", &pgen_wx},
        {"pgen_b", &pgen_b},
    };
  }
};

inline std::vector<double> embed_token(const SummarizerParams& p, int token_id) {
  int id = token_id;
  if (id < 0 || static_cast<std::size_t>(id) >= p.vocab) id = kUnkId;
  const double* row = p.embedding.v.data() + static_cast<std::size_t>(id) * p.embed;
  return std::vector<double>(row, row + p.embed);
}

struct EncoderOutput {
  std::vector<std::vector<double>> states;  // one 2H state per source position
  LstmState dec_init;
};

// Bidirectional encoding; h_i is [forward_i ; backward_i] and the decoder
// start state is an affine reduction of the two final states.
inline EncoderOutput encode(const SummarizerParams& p, const std::vector<int>& src_ids,
                            std::size_t max_src = kDefaultMaxSrcTokens) {
  if (src_ids.empty()) throw data_error("encode: empty source sequence");
  if (src_ids.size() > max_src)
    throw data_error("encode: source longer than " + std::to_string(max_src) +
                     " tokens (truncate upstream)");
  const std::size_t n = src_ids.size();
  std::vector<LstmState> fwd(n), bwd(n);
  LstmState state = LstmState::zero(p.hidden);
  for (std::size_t i = 0; i < n; ++i) {
    state = lstm_step(p.enc_fwd, embed_token(p, src_ids[i]), state);
    fwd[i] = state;
  }
  state = LstmState::zero(p.hidden);
  for (std::size_t i = n; i-- > 0;) {
    state = lstm_step(p.enc_bwd, embed_token(p, src_ids[i]), state);
    bwd[i] = state;
  }
  EncoderOutput out;
  out.states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.states[i] = fwd[i].h;
    out.states[i].insert(out.states[i].end(), bwd[i].h.begin(), bwd[i].h.end());
  }
  std::vector<double> hcat = fwd[n - 1].h;
  hcat.insert(hcat.end(), bwd[0].h.begin(), bwd[0].h.end());
  std::vector<double> ccat = fwd[n - 1].c;
  ccat.insert(ccat.end(), bwd[0].c.begin(), bwd[0].c.end());
  out.dec_init.h = matvec(p.reduce_h_w, hcat);
  out.dec_init.c = matvec(p.reduce_c_w, ccat);
  for (std::size_t i = 0; i < p.hidden; ++i) {
    out.dec_init.h[i] += p.reduce_h_b.v[i];
    out.dec_init.c[i] += p.reduce_c_b.v[i];
  }
  return out;
}

struct DecoderStepOutput {
  std::vector<double> p_vocab;
  std::vector<double> attention;
  double p_gen = 0.0;
  LstmState state;
};

inline DecoderStepOutput decode_step(const SummarizerParams& p,
                                     const std::vector<double>& x_embed,
                                     const LstmState& state,
                                     const std::vector<std::vector<double>>& encoder_states) {
  DecoderStepOutput out;
  out.state = lstm_step(p.dec, x_embed, state);
  const std::vector<double>& s_t = out.state.h;
  AttentionResult att = attention(encoder_states, s_t, p.attn);
  out.attention = att.weights;

  std::vector<double> cat = s_t;
  cat.insert(cat.end(), att.context.begin(), att.context.end());
  std::vector<double> hid = matvec(p.proj1_w, cat);
  for (std::size_t i = 0; i < p.hidden; ++i) hid[i] += p.proj1_b.v[i];
  std::vector<double> logits = matvec(p.proj2_w, hid);
  for (std::size_t i = 0; i < p.vocab; ++i) logits[i] += p.proj2_b.v[i];
  out.p_vocab = softmax(logits);

  out.p_gen = sigmoid(dot(p.pgen_wh.v, att.context) + dot(p.pgen_ws.v, s_t) +
                      dot(p.pgen_wx.v, x_embed) + p.pgen_b.v[0]);
  return out;
}

// P(w) = p_gen * P_vocab(w) + (1 - p_gen) * sum_{i: x_i = w} a_i over the
// extended vocabulary; OOV slots receive mass only through the copy term.
inline std::vector<double> final_distribution(const std::vector<double>& p_vocab,
                                              const std::vector<double>& attention_weights,
                                              double p_gen,
                                              const std::vector<int>& src_ext_ids,
                                              std::size_t n_oov) {
  if (p_gen < 0.0 || p_gen > 1.0) throw model_error("p_gen outside [0, 1]");
  if (attention_weights.size() != src_ext_ids.size())
    throw model_error("final_distribution: attention/source length mismatch");
  const std::size_t v = p_vocab.size();
  std::vector<double> out(v + n_oov, 0.0);
  for (std::size_t k = 0; k < v; ++k) out[k] = p_gen * p_vocab[k];
  for (std::size_t i = 0; i < src_ext_ids.size(); ++i) {
    const int id = src_ext_ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= out.size())
      throw model_error("final_distribution: extended id out of range");
    out[static_cast<std::size_t>(id)] += (1.0 - p_gen) * attention_weights[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training (tape-built loss; the pure functions above are the inference route
// and the finite-difference reference).

struct GradientSet {
  std::vector<Tensor> grads;

  explicit GradientSet(const std::vector<ParamRef>& refs) {
    for (const auto& r : refs) {
      Tensor t = *r.tensor;
      t.fill(0.0);
      grads.push_back(std::move(t));
    }
  }

  void zero() {
    for (auto& g : grads) g.fill(0.0);
  }

  void scale(double s) {
    for (auto& g : grads)
      for (double& x : g.v) x *= s;
  }
};

// Binds every parameter tensor to a tape leaf and builds the teacher-forced
// sequence loss. One instance per tape (i.e. per example).
class SummarizerGraph {
public:
  SummarizerGraph(ad::Tape& tape, SummarizerParams& p, GradientSet* sinks)
      : tape_(tape), p_(p) {
    auto refs = p.params();
    for (std::size_t i = 0; i < refs.size(); ++i)
      vars_[refs[i].name] =
          tape_.input(*refs[i].tensor, sinks ? &sinks->grads[i] : nullptr);
  }

  // Mean NLL of [tgt_ext ; STOP] under the extended distribution, decoder
  // inputs [START ; tgt] with OOV inputs mapped to UNK.
  ad::Tape::Var loss(const EncodedExample& ex) {
    const std::size_t H = p_.hidden, E = p_.embed, V = p_.vocab;
    const std::size_t n = ex.src_ids.size();
    if (n == 0) throw data_error("training example with empty source");
    if (ex.tgt_ids.empty()) throw data_error("training example with empty target");

    using Var = ad::Tape::Var;
    Var emb = var("embedding");

    auto embed_of = [&](int id) {
      if (id < 0 || static_cast<std::size_t>(id) >= V) id = kUnkId;
      return tape_.slice(emb, static_cast<std::size_t>(id) * E, E);
    };

    // Encoder, both directions.
    std::vector<Var> src_embeds(n);
    for (std::size_t i = 0; i < n; ++i) src_embeds[i] = embed_of(ex.src_ids[i]);
    Var zero = tape_.constant(std::vector<double>(H, 0.0));
    std::vector<Var> fwd_h(n), bwd_h(n);
    Var h = zero, c = zero;
    for (std::size_t i = 0; i < n; ++i) {
      auto [h2, c2] = lstm("enc_fwd", src_embeds[i], h, c);
      fwd_h[i] = h = h2;
      c = c2;
    }
    Var fwd_c_last = c;
    h = zero;
    c = zero;
    for (std::size_t i = n; i-- > 0;) {
      auto [h2, c2] = lstm("enc_bwd", src_embeds[i], h, c);
      bwd_h[i] = h = h2;
      c = c2;
    }
    Var bwd_c_first = c;

    std::vector<Var> enc_states(n);
    for (std::size_t i = 0; i < n; ++i) enc_states[i] = tape_.concat(fwd_h[i], bwd_h[i]);

    Var dec_h = tape_.affine(var("reduce_h_w"), tape_.concat(fwd_h[n - 1], bwd_h[0]),
                             var("reduce_h_b"), H, 2 * H);
    Var dec_c = tape_.affine(var("reduce_c_w"), tape_.concat(fwd_c_last, bwd_c_first),
                             var("reduce_c_b"), H, 2 * H);

    // W_h h_i is constant across decoder steps.
    std::vector<Var> attn_pre(n);
    for (std::size_t i = 0; i < n; ++i)
      attn_pre[i] = tape_.add(tape_.matvec(var("attn.w_h"), enc_states[i], H, 2 * H),
                              var("attn.b"));

    std::vector<int> dec_inputs;
    dec_inputs.push_back(kStartId);
    dec_inputs.insert(dec_inputs.end(), ex.tgt_ids.begin(), ex.tgt_ids.end());
    std::vector<int> dec_targets = ex.tgt_ext_ids;
    dec_targets.push_back(kStopId);

    const std::size_t n_oov = ex.oov_tokens.size();
    std::vector<Var> step_losses;
    for (std::size_t t = 0; t < dec_inputs.size(); ++t) {
      Var x = embed_of(dec_inputs[t]);
      auto [h2, c2] = lstm("dec", x, dec_h, dec_c);
      dec_h = h2;
      dec_c = c2;
      Var s_t = dec_h;

      Var ws_s = tape_.matvec(var("attn.w_s"), s_t, H, H);
      std::vector<Var> scores(n);
      for (std::size_t i = 0; i < n; ++i)
        scores[i] = tape_.dot(var("attn.v"), tape_.tanh(tape_.add(attn_pre[i], ws_s)));
      Var a = tape_.softmax(tape_.stack(scores));
      Var ctx = tape_.weighted_sum(a, enc_states);

      Var hid = tape_.affine(var("proj1_w"), tape_.concat(s_t, ctx), var("proj1_b"),
                             H, 3 * H);
      Var p_vocab = tape_.softmax(tape_.affine(var("proj2_w"), hid, var("proj2_b"), V, H));

      Var pre = tape_.add(tape_.add(tape_.dot(var("pgen_wh"), ctx),
                                    tape_.dot(var("pgen_ws"), s_t)),
                          tape_.add(tape_.dot(var("pgen_wx"), x), var("pgen_b")));
      Var p_gen = tape_.sigmoid(pre);

      Var final = tape_.mix_copy(p_vocab, a, p_gen, ex.src_ext_ids, n_oov, V);
      step_losses.push_back(tape_.pick_neg_log(final, dec_targets[t]));
    }
    return tape_.mean(step_losses);
  }

private:
  using Var = ad::Tape::Var;

  Var var(const std::string& name) const { return vars_.at(name); }

  std::pair<Var, Var> lstm(const std::string& prefix, Var x, Var h, Var c) {
    const std::size_t H = p_.hidden;
    const std::size_t E = p_.embed;
    Var gates = tape_.add(tape_.add(tape_.matvec(var(prefix + ".w_x"), x, 4 * H, E),
                                    tape_.matvec(var(prefix + ".w_h"), h, 4 * H, H)),
                          var(prefix + ".b"));
    Var ig = tape_.sigmoid(tape_.slice(gates, 0, H));
    Var fg = tape_.sigmoid(tape_.slice(gates, H, H));
    Var og = tape_.sigmoid(tape_.slice(gates, 2 * H, H));
    Var cand = tape_.tanh(tape_.slice(gates, 3 * H, H));
    Var c2 = tape_.add(tape_.mul(fg, c), tape_.mul(ig, cand));
    Var h2 = tape_.mul(og, tape_.tanh(c2));
    return {h2, c2};
  }

  ad::Tape& tape_;
  SummarizerParams& p_;
  std::map<std::string, Var> vars_;
};

// The same loss along the pure inference route; the reference point for
// gradient checking and the tape/inference consistency tests.
inline double sequence_loss(const SummarizerParams& p, const EncodedExample& ex,
                            std::size_t max_src = kDefaultMaxSrcTokens) {
  EncoderOutput enc = encode(p, ex.src_ids, max_src);
  std::vector<int> dec_inputs;
  dec_inputs.push_back(kStartId);
  dec_inputs.insert(dec_inputs.end(), ex.tgt_ids.begin(), ex.tgt_ids.end());
  std::vector<int> dec_targets = ex.tgt_ext_ids;
  dec_targets.push_back(kStopId);

  LstmState state = enc.dec_init;
  double total = 0.0;
  for (std::size_t t = 0; t < dec_inputs.size(); ++t) {
    DecoderStepOutput step = decode_step(p, embed_token(p, dec_inputs[t]), state, enc.states);
    state = step.state;
    std::vector<double> final = final_distribution(step.p_vocab, step.attention, step.p_gen,
                                                   ex.src_ext_ids, ex.oov_tokens.size());
    total += nll_loss(final, static_cast<std::size_t>(dec_targets[t]));
  }
  return total / static_cast<double>(dec_inputs.size());
}

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> epochs;
  std::size_t best_epoch = 0;
};

// Teacher-forced Adam training with shuffled minibatches, global-norm
// clipping, and early stopping on validation loss. Deterministic under seed.
inline TrainResult train_summarizer(SummarizerParams& p,
                                    const std::vector<EncodedExample>& train_set,
                                    const std::vector<EncodedExample>& val_set,
                                    const SummarizerConfig& cfg,
                                    const std::function<void(const EpochMetrics&)>& on_epoch = {}) {
  if (train_set.empty()) throw data_error("train_summarizer: empty training set");
  auto refs = p.params();
  GradientSet grads(refs);
  AdamState adam;
  adam.hyper.lr = cfg.lr;
  Rng rng(cfg.seed);

  TrainResult result;
  double best_val = 0.0;
  bool have_best = false;
  SummarizerParams best_params = p;
  std::size_t since_best = 0;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      grads.zero();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        ad::Tape tape;
        SummarizerGraph graph(tape, p, &grads);
        ad::Tape::Var loss = graph.loss(train_set[order[k]]);
        tape.backward(loss);
        batch_loss += tape.scalar(loss);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      batch_loss *= inv;
      if (!std::isfinite(batch_loss))
        throw model_error("non-finite training loss in batch " + std::to_string(batches) +
                          " of epoch " + std::to_string(epoch));
      grads.scale(inv);
      clip_global_norm(grads.grads, cfg.clip_norm);
      adam_update(refs, grads.grads, adam);
      epoch_loss += batch_loss;
      ++batches;
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = epoch_loss / static_cast<double>(batches);
    if (!val_set.empty()) {
      double v = 0.0;
      for (const auto& ex : val_set) v += sequence_loss(p, ex, cfg.max_src);
      m.val_loss = v / static_cast<double>(val_set.size());
    }
    result.epochs.push_back(m);
    if (on_epoch) on_epoch(m);

    if (!val_set.empty()) {
      if (!have_best || m.val_loss < best_val) {
        best_val = m.val_loss;
        best_params = p;
        result.best_epoch = epoch;
        have_best = true;
        since_best = 0;
      } else if (++since_best > cfg.patience) {
        break;
      }
    }
  }
  if (have_best) p = best_params;
  return result;
}

// ---------------------------------------------------------------------------
// Beam search.

struct BeamConfig {
  std::size_t width = 4;
  std::size_t max_len = kDefaultMaxTgtTokens;
  // Test hook: clamp the generate/copy gate (0 forces pure copying).
  std::optional<double> force_p_gen;
};

struct Hypothesis {
  std::vector<int> tokens;  // extended ids, starts with START
  double log_prob = 0.0;
  LstmState state;

  bool terminated() const { return !tokens.empty() && tokens.back() == kStopId; }

  double normalized_score() const {
    const std::size_t len = tokens.size() > 1 ? tokens.size() - 1 : 1;
    return log_prob / static_cast<double>(len);
  }
};

// Length-normalized beam search over the extended distribution. Returns the
// best hypothesis's emitted extended ids (START/STOP stripped).
inline std::vector<int> beam_search(const SummarizerParams& p, const EncodedExample& ex,
                                    const BeamConfig& cfg = {}) {
  if (cfg.width < 1) throw usage_error("beam width must be >= 1");
  EncoderOutput enc = encode(p, ex.src_ids);
  const std::size_t n_oov = ex.oov_tokens.size();

  Hypothesis start;
  start.tokens = {kStartId};
  start.state = enc.dec_init;
  std::vector<Hypothesis> live = {start};
  std::vector<Hypothesis> finished;

  for (std::size_t step = 0; step < cfg.max_len && !live.empty(); ++step) {
    struct Candidate {
      double log_prob;
      std::size_t beam;
      int token;
    };
    std::vector<Candidate> candidates;
    std::vector<LstmState> next_states(live.size());
    for (std::size_t b = 0; b < live.size(); ++b) {
      const Hypothesis& hyp = live[b];
      DecoderStepOutput out =
          decode_step(p, embed_token(p, hyp.tokens.back()), hyp.state, enc.states);
      next_states[b] = out.state;
      const double p_gen = cfg.force_p_gen.value_or(out.p_gen);
      std::vector<double> dist =
          final_distribution(out.p_vocab, out.attention, p_gen, ex.src_ext_ids, n_oov);
      // Top `width` extensions of this beam suffice for the global top set.
      std::vector<int> idx(dist.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
      const std::size_t keep = std::min<std::size_t>(cfg.width, idx.size());
      std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep),
                        idx.end(), [&](int x, int y) {
                          if (dist[static_cast<std::size_t>(x)] !=
                              dist[static_cast<std::size_t>(y)])
                            return dist[static_cast<std::size_t>(x)] >
                                   dist[static_cast<std::size_t>(y)];
                          return x < y;
                        });
      for (std::size_t k = 0; k < keep; ++k) {
        const int tok = idx[k];
        candidates.push_back({hyp.log_prob +
                                  std::log(dist[static_cast<std::size_t>(tok)] + kLogFloor),
                              b, tok});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      if (a.beam != b.beam) return a.beam < b.beam;
      return a.token < b.token;
    });

    std::vector<Hypothesis> next_live;
    for (const Candidate& cand : candidates) {
      if (next_live.size() >= cfg.width) break;
      Hypothesis h = live[cand.beam];
      h.state = next_states[cand.beam];
      h.tokens.push_back(cand.token);
      h.log_prob = cand.log_prob;
      if (cand.token == kStopId)
        finished.push_back(std::move(h));
      else
        next_live.push_back(std::move(h));
    }
    live = std::move(next_live);
    if (finished.size() >= cfg.width) break;
  }

  const std::vector<Hypothesis>& pool = finished.empty() ? live : finished;
  if (pool.empty()) return {};
  const Hypothesis* best = &pool[0];
  for (const auto& h : pool)
    if (h.normalized_score() > best->normalized_score()) best = &h;

  std::vector<int> out(best->tokens.begin() + 1, best->tokens.end());
  if (!out.empty() && out.back() == kStopId) out.pop_back();
  return out;
}

// ---------------------------------------------------------------------------
// Model bundle: parameters plus the vocabulary they were trained against.

inline constexpr const char* kSummarizerTag = "summarizer/v1";

struct SummarizerModel {
  SummarizerConfig config;
  Vocabulary vocab;
  SummarizerParams params;
};

struct SummarizeInfo {
  std::size_t unk_tokens = 0;
};

inline std::string summarize(const PullRequest& pr, const SummarizerModel& model,
                             const std::optional<std::string>& tmpl = {},
                             SummarizeInfo* info = nullptr) {
  std::string input = build_summarizer_input(pr, tmpl);
  std::vector<std::string> src_tokens = tokenize(input);
  EncodedExample ex = encode_example(src_tokens, {}, model.vocab, model.config.max_src,
                                     model.config.max_tgt);
  BeamConfig bc;
  bc.width = model.config.beam;
  bc.max_len = model.config.max_tgt;
  std::vector<int> out_ids = beam_search(model.params, ex, bc);
  if (info)
    for (int id : out_ids)
      if (id == kUnkId) ++info->unk_tokens;
  return join_tokens(decode_extended(out_ids, model.vocab, ex.oov_tokens));
}

inline nlohmann::json summarizer_hyper_json(const SummarizerConfig& c, std::size_t vocab) {
  return nlohmann::json{{"embed_dim", c.embed_dim}, {"hidden", c.hidden},
                        {"vocab", vocab},           {"batch", c.batch},
                        {"beam", c.beam},           {"max_src", c.max_src},
                        {"max_tgt", c.max_tgt},     {"lr", c.lr},
                        {"patience", c.patience},   {"seed", c.seed}};
}

inline void save_summarizer(SummarizerModel& model, const std::string& path) {
  auto refs = model.params.params();
  save_checkpoint(path, kSummarizerTag,
                  summarizer_hyper_json(model.config, model.params.vocab), refs);
  model.vocab.save(path + ".vocab");
}

inline SummarizerModel load_summarizer(const std::string& path) {
  SummarizerModel model;
  model.vocab = Vocabulary::load(path + ".vocab");
  // Peek the header for dimensions, then allocate and load for real.
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw model_error("cannot open checkpoint: " + path);
    std::string magic, header_line;
    std::getline(in, magic);
    if (magic != kCheckpointMagic) throw model_error("not a checkpoint file: " + path);
    std::getline(in, header_line);
    nlohmann::json header = nlohmann::json::parse(header_line, nullptr, false);
    if (header.is_discarded()) throw model_error("corrupt checkpoint header: " + path);
    const auto& hyper = header.at("hyper");
    model.config.embed_dim = hyper.at("embed_dim").get<std::size_t>();
    model.config.hidden = hyper.at("hidden").get<std::size_t>();
    model.config.beam = hyper.at("beam").get<std::size_t>();
    model.config.max_src = hyper.at("max_src").get<std::size_t>();
    model.config.max_tgt = hyper.at("max_tgt").get<std::size_t>();
    const std::size_t vocab = hyper.at("vocab").get<std::size_t>();
    if (vocab != model.vocab.size())
      throw model_error("checkpoint/vocabulary size mismatch for " + path);
  }
  model.params = SummarizerParams::create(model.vocab.size(), model.config.embed_dim,
                                          model.config.hidden);
  auto refs = model.params.params();
  load_checkpoint(path, kSummarizerTag, refs);
  return model;
}

}  // namespace relforge
