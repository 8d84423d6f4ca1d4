#pragma once

#include <charconv>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

#include "roppt/corpus.hpp"
#include "roppt/tree.hpp"

namespace roppt {

enum class StrategyKind {
  tree_prune,     // keep tokens within neighbor range of the target in the parse tree
  input_mask,     // same retained set, but applied to the encoder input sequence
  comma_chunk,    // keep the comma-delimited span containing the target
  window,         // keep a symmetric positional window around the target
  full_sentence,  // keep everything
};

struct Strategy {
  StrategyKind kind = StrategyKind::tree_prune;
  int param = 4;  // neighbor range (tree_prune/input_mask) or half-width (window)

  static Strategy tree(int con) { return {StrategyKind::tree_prune, con}; }
  static Strategy input_mask(int con) { return {StrategyKind::input_mask, con}; }
  static Strategy chunk() { return {StrategyKind::comma_chunk, 0}; }
  static Strategy window(int k) { return {StrategyKind::window, k}; }
  static Strategy full() { return {StrategyKind::full_sentence, 0}; }

  bool operator==(const Strategy&) const = default;
};

// Parses the command-line form: "tree:4", "im:4", "chunk", "window:4", "full".
inline Strategy parse_strategy(std::string_view s) {
  std::string_view head = s;
  std::string_view arg;
  if (auto colon = s.find(':'); colon != std::string_view::npos) {
    head = s.substr(0, colon);
    arg = s.substr(colon + 1);
  }
  auto parse_int = [&](std::string_view what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
    if (ec != std::errc() || ptr != arg.data() + arg.size())
      throw std::invalid_argument("strategy '" + std::string(s) + "': expected integer " +
                                  std::string(what));
    if (v < 0)
      throw std::invalid_argument("strategy '" + std::string(s) + "': " + std::string(what) +
                                  " must be non-negative");
    return v;
  };
  if (head == "tree") return Strategy::tree(parse_int("neighbor range"));
  if (head == "im") return Strategy::input_mask(parse_int("neighbor range"));
  if (head == "window") return Strategy::window(parse_int("window size"));
  if (head == "chunk" || head == "full") {
    if (!arg.empty())
      throw std::invalid_argument("strategy '" + std::string(s) + "' takes no parameter");
    return head == "chunk" ? Strategy::chunk() : Strategy::full();
  }
  throw std::invalid_argument("unknown strategy '" + std::string(s) +
                              "' (expected tree:N, im:N, chunk, window:N or full)");
}

inline std::string to_string(const Strategy& s) {
  switch (s.kind) {
    case StrategyKind::tree_prune: return "tree:" + std::to_string(s.param);
    case StrategyKind::input_mask: return "im:" + std::to_string(s.param);
    case StrategyKind::comma_chunk: return "chunk";
    case StrategyKind::window: return "window:" + std::to_string(s.param);
    case StrategyKind::full_sentence: return "full";
  }
  return "?";
}

// Where a mask acts: pool_only masks restrict average pooling over the
// full-context hidden states; input_level masks shorten the encoder input.
enum class MaskMode { pool_only, input_level };

// Token indices retained by a denoising strategy. Always contains the target.
struct ContextMask {
  std::vector<int> indices;  // ascending
  MaskMode mode = MaskMode::pool_only;
};

inline ContextMask apply_strategy(const Strategy& strategy, const Instance& ins) {
  const int n = ins.size();
  const int t = ins.target_idx;
  ContextMask mask;
  switch (strategy.kind) {
    case StrategyKind::tree_prune:
    case StrategyKind::input_mask: {
      mask.indices = prune(build_tree(ins), t, strategy.param).indices;
      mask.mode = strategy.kind == StrategyKind::input_mask ? MaskMode::input_level
                                                            : MaskMode::pool_only;
      break;
    }
    case StrategyKind::comma_chunk: {
      // Maximal comma-free span containing the target; the commas themselves
      // carry no content and are dropped. The target stays in even when it is
      // itself a comma.
      int left = -1, right = n;
      for (int i = 0; i < t; ++i)
        if (ins.forms[i] == ",") left = i;
      for (int i = n - 1; i > t; --i)
        if (ins.forms[i] == ",") right = i;
      for (int i = left + 1; i < right; ++i)
        if (i == t || ins.forms[i] != ",") mask.indices.push_back(i);
      break;
    }
    case StrategyKind::window: {
      int lo = std::max(0, t - strategy.param);
      int hi = std::min(n - 1, t + strategy.param);
      for (int i = lo; i <= hi; ++i) mask.indices.push_back(i);
      break;
    }
    case StrategyKind::full_sentence: {
      mask.indices.resize(n);
      std::iota(mask.indices.begin(), mask.indices.end(), 0);
      break;
    }
  }
  return mask;
}

// Retained fraction of the sentence, in (0, 1].
inline double compression(const ContextMask& mask, const Instance& ins) {
  return static_cast<double>(mask.indices.size()) / static_cast<double>(ins.size());
}

}  // namespace roppt
