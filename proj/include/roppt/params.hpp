#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roppt/error.hpp"
#include "roppt/matrix.hpp"
#include "roppt/rng.hpp"

namespace roppt {

struct EncoderConfig {
  int dim = 32;              // embedding width; even, >= 2
  int layers = 1;            // self-attention layer count
  bool use_positions = true;
  std::uint64_t seed = 0;    // parameter initialization
  int vocab_rows = 4096;     // hashed embedding table size
};

inline void validate_config(const EncoderConfig& cfg) {
  if (cfg.dim < 2 || cfg.dim % 2 != 0)
    throw std::invalid_argument("encoder dim must be even and >= 2");
  if (cfg.layers < 0) throw std::invalid_argument("encoder layers must be >= 0");
  if (cfg.vocab_rows < 1) throw std::invalid_argument("vocab_rows must be >= 1");
}

struct AttentionWeights {
  Mat wq, wk, wv, wo;  // each dim x dim
};

// Every trainable tensor in the model. Shapes follow the encoder config the
// params were initialized with; dim()/vocab_rows()/layers() read them back.
struct ModelParams {
  Mat embedding;                      // vocab_rows x dim, row picked by hashing the form
  Vec cls;                            // sentence-start sentinel row
  std::vector<AttentionWeights> attn;
  Mat f1_w;                           // SPV head: dim x 2*dim, tanh
  Vec f1_b;
  Mat f2_w;                           // MIP head: dim x 2*dim, tanh
  Vec f2_b;
  Vec out_w;                          // 2*dim
  double out_b = 0.0;

  int dim() const { return embedding.cols; }
  int vocab_rows() const { return embedding.rows; }
  int layers() const { return static_cast<int>(attn.size()); }
};

namespace detail {

inline ModelParams shaped_params(const EncoderConfig& cfg) {
  ModelParams p;
  p.embedding = Mat(cfg.vocab_rows, cfg.dim);
  p.cls.assign(cfg.dim, 0.0);
  p.attn.resize(cfg.layers);
  for (auto& a : p.attn) {
    a.wq = Mat(cfg.dim, cfg.dim);
    a.wk = Mat(cfg.dim, cfg.dim);
    a.wv = Mat(cfg.dim, cfg.dim);
    a.wo = Mat(cfg.dim, cfg.dim);
  }
  p.f1_w = Mat(cfg.dim, 2 * cfg.dim);
  p.f1_b.assign(cfg.dim, 0.0);
  p.f2_w = Mat(cfg.dim, 2 * cfg.dim);
  p.f2_b.assign(cfg.dim, 0.0);
  p.out_w.assign(2 * cfg.dim, 0.0);
  p.out_b = 0.0;
  return p;
}

}  // namespace detail

// Weight entries uniform in [-0.1, 0.1] from the seeded generator, biases
// zero. The fill order is fixed and matches the serialization order.
inline ModelParams init_params(const EncoderConfig& cfg) {
  validate_config(cfg);
  ModelParams p = detail::shaped_params(cfg);
  std::mt19937_64 rng(cfg.seed);
  auto fill = [&](auto& range) {
    for (double& x : range) x = uniform_sym(rng, 0.1);
  };
  fill(p.embedding.data);
  fill(p.cls);
  for (auto& a : p.attn) {
    fill(a.wq.data);
    fill(a.wk.data);
    fill(a.wv.data);
    fill(a.wo.data);
  }
  fill(p.f1_w.data);
  fill(p.f2_w.data);
  fill(p.out_w);
  return p;
}

// Visits every parameter group as a flat span, in serialization order.
template <typename Params, typename F>
void for_each_param_group(Params& p, F&& f) {
  f("embedding", std::span(p.embedding.data));
  f("cls", std::span(p.cls));
  for (std::size_t l = 0; l < p.attn.size(); ++l) {
    const std::string tag = "attn" + std::to_string(l) + ".";
    f(tag + "wq", std::span(p.attn[l].wq.data));
    f(tag + "wk", std::span(p.attn[l].wk.data));
    f(tag + "wv", std::span(p.attn[l].wv.data));
    f(tag + "wo", std::span(p.attn[l].wo.data));
  }
  f("f1_w", std::span(p.f1_w.data));
  f("f1_b", std::span(p.f1_b));
  f("f2_w", std::span(p.f2_w.data));
  f("f2_b", std::span(p.f2_b));
  f("out_w", std::span(p.out_w));
  f("out_b", std::span(&p.out_b, 1));
}

inline ModelParams zeros_like(const ModelParams& p) {
  EncoderConfig cfg;
  cfg.dim = p.dim();
  cfg.layers = p.layers();
  cfg.vocab_rows = p.vocab_rows();
  return detail::shaped_params(cfg);
}

inline void zero_params(ModelParams& p) {
  for_each_param_group(p, [](const std::string&, std::span<double> s) {
    for (double& x : s) x = 0.0;
  });
}

// p += alpha * g, group by group.
inline void axpy_params(ModelParams& p, const ModelParams& g, double alpha) {
  std::vector<std::span<double>> dst;
  for_each_param_group(p, [&](const std::string&, std::span<double> s) { dst.push_back(s); });
  std::size_t k = 0;
  for_each_param_group(const_cast<ModelParams&>(g), [&](const std::string&, std::span<double> s) {
    std::span<double> d = dst[k++];
    for (std::size_t i = 0; i < s.size(); ++i) d[i] += alpha * s[i];
  });
}

// ---------------------------------------------------------------------------
// Flat binary parameter file. Layout:
//   bytes 0..5   magic "ROPPT1"
//   u32 LE       vocab_rows, dim, layers, use_positions
//   f64 LE       parameter groups in for_each_param_group order
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr char kParamsMagic[6] = {'R', 'O', 'P', 'P', 'T', '1'};

inline void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_f64(std::ostream& os, double d) {
  std::uint64_t v = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

inline double read_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace detail

inline void save_params(const std::string& path, const ModelParams& p,
                        const EncoderConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out.write(detail::kParamsMagic, 6);
  detail::write_u32(out, static_cast<std::uint32_t>(p.vocab_rows()));
  detail::write_u32(out, static_cast<std::uint32_t>(p.dim()));
  detail::write_u32(out, static_cast<std::uint32_t>(p.layers()));
  detail::write_u32(out, cfg.use_positions ? 1 : 0);
  for_each_param_group(const_cast<ModelParams&>(p),
                       [&](const std::string&, std::span<double> s) {
                         for (double x : s) detail::write_f64(out, x);
                       });
  if (!out) throw ParseError(path + ": write failed");
}

inline std::pair<ModelParams, EncoderConfig> load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  char magic[6];
  in.read(magic, 6);
  if (!in || std::string_view(magic, 6) != std::string_view(detail::kParamsMagic, 6))
    throw ParseError(path + ": not a parameter file (bad magic)");
  EncoderConfig cfg;
  cfg.vocab_rows = static_cast<int>(detail::read_u32(in));
  cfg.dim = static_cast<int>(detail::read_u32(in));
  cfg.layers = static_cast<int>(detail::read_u32(in));
  cfg.use_positions = detail::read_u32(in) != 0;
  if (!in) throw ParseError(path + ": truncated header");
  validate_config(cfg);
  ModelParams p = detail::shaped_params(cfg);
  for_each_param_group(p, [&](const std::string& name, std::span<double> s) {
    for (double& x : s) x = detail::read_f64(in);
    if (!in) throw ParseError(path + ": truncated at group " + name);
  });
  in.peek();
  if (!in.eof()) throw ParseError(path + ": trailing bytes after parameters");
  return {std::move(p), cfg};
}

}  // namespace roppt
