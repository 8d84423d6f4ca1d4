#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roppt/corpus.hpp"
#include "roppt/denoise.hpp"
#include "roppt/encoder.hpp"
#include "roppt/error.hpp"
#include "roppt/metrics.hpp"
#include "roppt/rng.hpp"

namespace roppt {

// Classification head over three meaning representations:
//   v_s   pooled context meaning (average of retained hidden states)
//   v_st  contextual target meaning (hidden state of the target token)
//   v_t   literal target meaning (target encoded alone)
// The SPV branch contrasts the target with its context, the MIP branch
// contrasts contextual with literal meaning; a sigmoid over both yields the
// metaphoricity score.

struct ForwardTrace {
  Vec v_s, v_st, v_t;
  Vec h_spv, h_mip;
  double y_hat = 0.0;
};

// Trace plus every cached intermediate the backward pass needs.
struct ForwardWork {
  ForwardTrace trace;
  EncodeCache sent_cache;
  EncodeCache lit_cache;
  std::vector<int> pooled;  // positions pooled over, in encoded-sequence coordinates
  int target_pos = 0;       // target position in encoded-sequence coordinates
  Vec spv_in, mip_in, cat;  // cached concatenations
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace detail {

inline Vec concat(std::span<const double> a, std::span<const double> b) {
  Vec out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace detail

// Average of the hidden states selected by the mask. The sentinel state is
// never part of pooling.
inline Vec pool_context(const HiddenStates& states, const ContextMask& mask) {
  if (mask.indices.empty()) throw std::invalid_argument("pool_context: empty mask");
  Vec v(static_cast<std::size_t>(states.h.cols), 0.0);
  for (int i : mask.indices) {
    if (i < 0 || i >= states.h.rows)
      throw std::invalid_argument("pool_context: index out of bounds");
    const double* h = states.h.row(i);
    for (int j = 0; j < states.h.cols; ++j) v[static_cast<std::size_t>(j)] += h[j];
  }
  const double inv = 1.0 / static_cast<double>(mask.indices.size());
  for (double& x : v) x *= inv;
  return v;
}

inline ForwardWork run_forward(const Instance& ins, const Strategy& strategy,
                               const ModelParams& p, const EncoderConfig& cfg) {
  const int d = p.dim();
  ForwardWork w;
  ContextMask mask = apply_strategy(strategy, ins);

  std::vector<std::string> masked_forms;
  if (mask.mode == MaskMode::input_level) {
    // The retained tokens become the whole encoder input, in original order,
    // with renumbered positions. Pooling then covers every encoded token.
    masked_forms.reserve(mask.indices.size());
    for (int i : mask.indices) masked_forms.push_back(ins.forms[i]);
    w.sent_cache = encode_with_cache(masked_forms, cfg, p);
    w.pooled.resize(mask.indices.size());
    std::iota(w.pooled.begin(), w.pooled.end(), 0);
    w.target_pos = static_cast<int>(
        std::lower_bound(mask.indices.begin(), mask.indices.end(), ins.target_idx) -
        mask.indices.begin());
  } else {
    w.sent_cache = encode_with_cache(ins.forms, cfg, p);
    w.pooled = mask.indices;
    w.target_pos = ins.target_idx;
  }

  const Mat& out = w.sent_cache.output;  // row 0 is the sentinel, tokens from row 1
  w.trace.v_s.assign(d, 0.0);
  for (int i : w.pooled) {
    const double* h = out.row(i + 1);
    for (int j = 0; j < d; ++j) w.trace.v_s[j] += h[j];
  }
  const double inv = 1.0 / static_cast<double>(w.pooled.size());
  for (double& x : w.trace.v_s) x *= inv;
  w.trace.v_st.assign(out.row(w.target_pos + 1), out.row(w.target_pos + 1) + d);

  w.lit_cache = encode_with_cache(std::span(&ins.forms[ins.target_idx], 1), cfg, p);
  w.trace.v_t.assign(w.lit_cache.output.row(1), w.lit_cache.output.row(1) + d);

  w.spv_in = detail::concat(w.trace.v_s, w.trace.v_st);
  w.mip_in = detail::concat(w.trace.v_st, w.trace.v_t);
  w.trace.h_spv = matvec(p.f1_w, w.spv_in);
  for (int j = 0; j < d; ++j) w.trace.h_spv[j] = std::tanh(w.trace.h_spv[j] + p.f1_b[j]);
  w.trace.h_mip = matvec(p.f2_w, w.mip_in);
  for (int j = 0; j < d; ++j) w.trace.h_mip[j] = std::tanh(w.trace.h_mip[j] + p.f2_b[j]);

  w.cat = detail::concat(w.trace.h_mip, w.trace.h_spv);
  w.trace.y_hat = sigmoid(dot(w.cat, p.out_w) + p.out_b);
  return w;
}

inline ForwardTrace forward(const Instance& ins, const Strategy& strategy, const ModelParams& p,
                            const EncoderConfig& cfg) {
  return run_forward(ins, strategy, p, cfg).trace;
}

// Binary cross entropy. Predictions at exactly 0 or 1 are clamped to
// [eps, 1-eps]; the clamp is counted through `guard_events` when given.
inline double bce_loss(double y_hat, int label, long* guard_events = nullptr) {
  constexpr double eps = 1e-12;
  double yh = y_hat;
  if (yh < eps || yh > 1.0 - eps) {
    yh = std::clamp(yh, eps, 1.0 - eps);
    if (guard_events) ++*guard_events;
  }
  return label == 1 ? -std::log(yh) : -std::log(1.0 - yh);
}

namespace detail {

// Backward pass for one instance given its forward work. Adds the gradient
// of the (summed) BCE loss into `g`.
inline void backward_into(const ForwardWork& w, int label, const ModelParams& p,
                          ModelParams& g) {
  const int d = p.dim();
  // d(loss)/d(logit) for sigmoid + BCE
  const double dz = w.trace.y_hat - static_cast<double>(label);

  for (int j = 0; j < 2 * d; ++j) g.out_w[j] += dz * w.cat[j];
  g.out_b += dz;

  Vec dh_mip(d), dh_spv(d);
  for (int j = 0; j < d; ++j) {
    dh_mip[j] = dz * p.out_w[j];
    dh_spv[j] = dz * p.out_w[d + j];
  }

  // tanh heads
  Vec dpre_spv(d), dpre_mip(d);
  for (int j = 0; j < d; ++j) {
    dpre_spv[j] = dh_spv[j] * (1.0 - w.trace.h_spv[j] * w.trace.h_spv[j]);
    dpre_mip[j] = dh_mip[j] * (1.0 - w.trace.h_mip[j] * w.trace.h_mip[j]);
  }
  add_outer(g.f1_w, dpre_spv, w.spv_in);
  add_outer(g.f2_w, dpre_mip, w.mip_in);
  for (int j = 0; j < d; ++j) {
    g.f1_b[j] += dpre_spv[j];
    g.f2_b[j] += dpre_mip[j];
  }
  Vec dspv_in = matvec_t(p.f1_w, dpre_spv);  // [dv_s; dv_st]
  Vec dmip_in = matvec_t(p.f2_w, dpre_mip);  // [dv_st; dv_t]

  // Assemble d(loss)/d(hidden states) for the sentence encoding. The
  // sentinel row is emitted but nothing consumes it, so its slot stays zero.
  Mat d_sent(w.sent_cache.output.rows, d);
  const double inv = 1.0 / static_cast<double>(w.pooled.size());
  for (int i : w.pooled) {
    double* dst = d_sent.row(i + 1);
    for (int j = 0; j < d; ++j) dst[j] += dspv_in[j] * inv;
  }
  double* dtgt = d_sent.row(w.target_pos + 1);
  for (int j = 0; j < d; ++j) dtgt[j] += dspv_in[d + j] + dmip_in[j];
  encoder_backward(w.sent_cache, p, std::move(d_sent), g);

  Mat d_lit(2, d);
  for (int j = 0; j < d; ++j) d_lit(1, j) = dmip_in[d + j];
  encoder_backward(w.lit_cache, p, std::move(d_lit), g);
}

}  // namespace detail

// Exact analytic gradients of the summed BCE loss over a batch, shaped like
// the parameters. Also reports the summed loss when asked.
inline ModelParams gradients(std::span<const Instance> batch, const Strategy& strategy,
                             const ModelParams& p, const EncoderConfig& cfg,
                             double* loss_sum = nullptr, long* guard_events = nullptr) {
  if (batch.empty()) throw std::invalid_argument("gradients: empty batch");
  ModelParams g = zeros_like(p);
  double total = 0.0;
  for (const Instance& ins : batch) {
    ForwardWork w = run_forward(ins, strategy, p, cfg);
    total += bce_loss(w.trace.y_hat, ins.label, guard_events);
    detail::backward_into(w, ins.label, p, g);
  }
  if (loss_sum) *loss_sum = total;
  return g;
}

// 1 iff the prediction score reaches the threshold; ties go metaphorical.
inline int predict(const Instance& ins, const Strategy& strategy, const ModelParams& p,
                   const EncoderConfig& cfg, double threshold = 0.5) {
  return forward(ins, strategy, p, cfg).y_hat >= threshold ? 1 : 0;
}

inline std::vector<int> predict_all(const Corpus& corpus, const Strategy& strategy,
                                    const ModelParams& p, const EncoderConfig& cfg,
                                    double threshold = 0.5) {
  std::vector<int> out;
  out.reserve(corpus.instances.size());
  for (const Instance& ins : corpus.instances)
    out.push_back(predict(ins, strategy, p, cfg, threshold));
  return out;
}

struct TrainConfig {
  int epochs = 20;
  int batch_size = 16;
  double lr = 0.02;  // the loss is summed over the batch, so keep steps small
  std::uint64_t seed = 1;  // shuffling; the encoder seed drives initialization
  double threshold = 0.5;
  Strategy strategy = Strategy::tree(4);
  EncoderConfig encoder;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double f1 = 0.0;  // micro F1 of the training-pass predictions
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochStats> history;
  long guard_events = 0;
};

// Plain mini-batch gradient descent on the summed BCE loss. Deterministic in
// the seeds: fixed initialization, fixed shuffle order, fixed summation
// order. Throws TrainingDiverged on a non-finite batch loss.
inline TrainResult train(const Corpus& corpus, const TrainConfig& cfg) {
  if (corpus.instances.empty()) throw std::invalid_argument("train: empty corpus");
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (cfg.lr < 0.0) throw std::invalid_argument("train: learning rate must be >= 0");
  if (cfg.threshold <= 0.0 || cfg.threshold >= 1.0)
    throw std::invalid_argument("train: threshold must be in (0,1)");

  TrainResult res;
  res.params = init_params(cfg.encoder);
  ModelParams grads = zeros_like(res.params);
  std::mt19937_64 rng(cfg.seed);

  const int n = corpus.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_indices(order, rng);
    double loss_sum = 0.0;
    Confusion conf;
    int batch_index = 0;
    for (int start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const int end = std::min(n, start + cfg.batch_size);
      zero_params(grads);
      double batch_loss = 0.0;
      for (int k = start; k < end; ++k) {
        const Instance& ins = corpus.instances[order[k]];
        ForwardWork w = run_forward(ins, cfg.strategy, res.params, cfg.encoder);
        batch_loss += bce_loss(w.trace.y_hat, ins.label, &res.guard_events);
        conf.add(w.trace.y_hat >= cfg.threshold ? 1 : 0, ins.label);
        detail::backward_into(w, ins.label, res.params, grads);
      }
      if (!std::isfinite(batch_loss)) throw TrainingDiverged(epoch, batch_index);
      axpy_params(res.params, grads, -cfg.lr);
      loss_sum += batch_loss;
    }
    res.history.push_back({epoch, loss_sum / n, micro_prf(conf).f1});
  }
  return res;
}

}  // namespace roppt
