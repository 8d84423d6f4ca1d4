#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "roppt/matrix.hpp"
#include "roppt/params.hpp"

namespace roppt {

// Desk-scale contextual encoder: hashed embeddings + sinusoidal positions,
// a learned sentence-start sentinel row, then `layers` rounds of single-head
// scaled dot-product self-attention with a residual connection. No layer
// normalization; every output coordinate is smooth in every parameter.

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Embedding-table row for a surface form. Open vocabulary: every form maps
// somewhere, identical forms always to the same row.
inline int embedding_row(std::string_view form, int vocab_rows) {
  return static_cast<int>(fnv1a64(form) % static_cast<std::uint64_t>(vocab_rows));
}

inline Vec embed_token(std::string_view form, const ModelParams& p) {
  auto row = p.embedding.row_span(embedding_row(form, p.vocab_rows()));
  return Vec(row.begin(), row.end());
}

// Classic sinusoidal encoding: pairs (sin, cos) over a geometric frequency
// ladder. Parameter-free, so it adds nothing to the gradient surface.
inline Vec position_encoding(int pos, int dim) {
  Vec pe(dim);
  for (int i = 0; i + 1 < dim; i += 2) {
    double freq = std::pow(10000.0, -static_cast<double>(i) / dim);
    pe[i] = std::sin(pos * freq);
    pe[i + 1] = std::cos(pos * freq);
  }
  return pe;
}

struct HiddenStates {
  Vec h_cls;
  Mat h;  // one row per input token
};

struct LayerCache {
  Mat x;  // layer input
  Mat q, k, v;
  Mat attn;  // softmax rows
  Mat ctx;   // attn * v
};

// Everything the backward pass needs to replay one encoding.
struct EncodeCache {
  std::vector<int> emb_rows;  // embedding row per token
  Mat input;                  // (n+1) x dim; row 0 is the sentinel
  std::vector<LayerCache> layers;
  Mat output;
};

inline void softmax_rows_inplace(Mat& m) {
  for (int i = 0; i < m.rows; ++i) {
    double* r = m.row(i);
    double mx = r[0];
    for (int j = 1; j < m.cols; ++j) mx = std::max(mx, r[j]);
    double sum = 0.0;
    for (int j = 0; j < m.cols; ++j) {
      r[j] = std::exp(r[j] - mx);
      sum += r[j];
    }
    for (int j = 0; j < m.cols; ++j) r[j] /= sum;
  }
}

inline EncodeCache encode_with_cache(std::span<const std::string> forms,
                                     const EncoderConfig& cfg, const ModelParams& p) {
  if (forms.empty()) throw std::invalid_argument("encode_sentence: empty token list");
  if (p.dim() != cfg.dim || p.layers() != cfg.layers)
    throw std::invalid_argument("encode_sentence: params shaped for a different config");
  const int d = p.dim();
  const int m = static_cast<int>(forms.size()) + 1;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  EncodeCache c;
  c.emb_rows.resize(forms.size());
  c.input = Mat(m, d);
  // Row 0: the sentinel. It is a plain learned row and carries no position
  // term. Token i sits at row i+1 with position i.
  for (int j = 0; j < d; ++j) c.input(0, j) = p.cls[j];
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const int r = embedding_row(forms[i], p.vocab_rows());
    c.emb_rows[i] = r;
    const double* emb = p.embedding.row(r);
    double* dst = c.input.row(static_cast<int>(i) + 1);
    for (int j = 0; j < d; ++j) dst[j] = emb[j];
    if (cfg.use_positions) {
      Vec pe = position_encoding(static_cast<int>(i), d);
      for (int j = 0; j < d; ++j) dst[j] += pe[j];
    }
  }

  Mat x = c.input;
  c.layers.resize(p.layers());
  for (int l = 0; l < p.layers(); ++l) {
    LayerCache& lc = c.layers[l];
    const AttentionWeights& w = p.attn[l];
    lc.x = std::move(x);
    lc.q = matmul(lc.x, w.wq);
    lc.k = matmul(lc.x, w.wk);
    lc.v = matmul(lc.x, w.wv);
    lc.attn = matmul_nt(lc.q, lc.k);
    scale_inplace(lc.attn, inv_sqrt_d);
    softmax_rows_inplace(lc.attn);
    lc.ctx = matmul(lc.attn, lc.v);
    x = matmul(lc.ctx, w.wo);
    add_inplace(x, lc.x);  // residual
  }
  c.output = std::move(x);
  return c;
}

// Per-token hidden states plus the sentinel state. With layers = 0 the
// outputs equal the input rows exactly.
inline HiddenStates encode_sentence(std::span<const std::string> forms,
                                    const EncoderConfig& cfg, const ModelParams& p) {
  EncodeCache c = encode_with_cache(forms, cfg, p);
  HiddenStates hs;
  hs.h_cls.assign(c.output.row(0), c.output.row(0) + c.output.cols);
  hs.h = Mat(c.output.rows - 1, c.output.cols);
  for (int i = 1; i < c.output.rows; ++i)
    for (int j = 0; j < c.output.cols; ++j) hs.h(i - 1, j) = c.output(i, j);
  return hs;
}

// Literal meaning of a word: the hidden state of the sole token when the
// encoder runs on the one-token sequence [form].
inline Vec encode_literal_target(const std::string& form, const EncoderConfig& cfg,
                                 const ModelParams& p) {
  if (form.empty()) throw std::invalid_argument("encode_literal_target: empty form");
  EncodeCache c = encode_with_cache(std::span(&form, 1), cfg, p);
  return Vec(c.output.row(1), c.output.row(1) + c.output.cols);
}

// Accumulates d(loss)/d(parameters) for one encoding into `g`, given
// d(loss)/d(output rows). Walks the attention layers in reverse, then
// scatters the input-row gradient into the sentinel and the touched
// embedding rows.
inline void encoder_backward(const EncodeCache& c, const ModelParams& p, Mat d_out,
                             ModelParams& g) {
  const int d = p.dim();
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  Mat dy = std::move(d_out);
  for (int l = p.layers() - 1; l >= 0; --l) {
    const LayerCache& lc = c.layers[l];
    const AttentionWeights& w = p.attn[l];
    AttentionWeights& gw = g.attn[l];

    // y = x + (attn * v) * wo
    matmul_tn_acc(lc.ctx, dy, gw.wo);
    Mat dctx = matmul_nt(dy, w.wo);
    Mat dattn = matmul_nt(dctx, lc.v);
    Mat dv = matmul_tn(lc.attn, dctx);

    // softmax backward, folding in the 1/sqrt(d) score scale
    Mat ds(dattn.rows, dattn.cols);
    for (int i = 0; i < dattn.rows; ++i) {
      const double* a = lc.attn.row(i);
      const double* da = dattn.row(i);
      double inner = 0.0;
      for (int j = 0; j < dattn.cols; ++j) inner += da[j] * a[j];
      double* out = ds.row(i);
      for (int j = 0; j < dattn.cols; ++j) out[j] = a[j] * (da[j] - inner) * inv_sqrt_d;
    }

    Mat dq = matmul(ds, lc.k);
    Mat dk = matmul_tn(ds, lc.q);
    matmul_tn_acc(lc.x, dq, gw.wq);
    matmul_tn_acc(lc.x, dk, gw.wk);
    matmul_tn_acc(lc.x, dv, gw.wv);

    Mat dx = std::move(dy);  // residual path
    matmul_nt_acc(dq, w.wq, dx);
    matmul_nt_acc(dk, w.wk, dx);
    matmul_nt_acc(dv, w.wv, dx);
    dy = std::move(dx);
  }

  for (int j = 0; j < d; ++j) g.cls[j] += dy(0, j);
  for (std::size_t i = 0; i < c.emb_rows.size(); ++i) {
    double* grow = g.embedding.row(c.emb_rows[i]);
    const double* src = dy.row(static_cast<int>(i) + 1);
    for (int j = 0; j < d; ++j) grow[j] += src[j];
  }
}

}  // namespace roppt
