#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "roppt/corpus.hpp"
#include "roppt/rng.hpp"
#include "roppt/tree.hpp"

namespace roppt {

// Form planted into positive instances. The regular pseudo-vocabulary
// ("w0".."w199") never produces it, so the label rule stays a pure function
// of the instance.
inline constexpr const char* kMarkerForm = "marker";

struct SyntheticSpec {
  std::uint64_t seed = 0;
  int count = 0;
  int min_len = 5;
  int max_len = 30;
  int marker_range = 2;  // tree distance within which the marker decides the label
  // When > 0, the marker is only planted at positional distance strictly
  // greater than this from the target, while staying within marker_range in
  // the tree. Produces corpora where positional windows cannot see the signal.
  int min_linear_offset = 0;
  std::string name = "synthetic";
};

namespace detail {

// Uniformly random labeled tree on n >= 3 nodes via a Prufer sequence,
// returned as an undirected adjacency list. Smallest-leaf decoding with the
// usual moving pointer.
inline std::vector<std::vector<int>> random_tree_adj(std::mt19937_64& rng, int n) {
  std::vector<int> prufer(n - 2);
  for (int& x : prufer) x = bounded(rng, n);
  std::vector<int> degree(n, 1);
  for (int x : prufer) ++degree[x];
  std::vector<std::vector<int>> adj(n);
  auto link = [&](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  int ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int x : prufer) {
    link(leaf, x);
    if (--degree[x] == 1 && x < ptr) {
      leaf = x;
    } else {
      ++ptr;
      while (ptr < n && degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  link(leaf, n - 1);
  return adj;
}

// Orients an undirected tree from `root`, producing head links.
inline std::vector<int> heads_from_adj(const std::vector<std::vector<int>>& adj, int root) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> heads(n, kRootHead);
  std::vector<char> seen(n, 0);
  std::vector<int> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        heads[v] = u;
        stack.push_back(v);
      }
    }
  }
  return heads;
}

}  // namespace detail

// Deterministic-in-seed corpus of uniformly random labeled trees over
// pseudo-words. Each instance gets one designated target; with probability
// 1/2 the marker form is planted at tree distance in [1, marker_range] of
// the target, and the label records exactly that event.
inline Corpus gen_synthetic(const SyntheticSpec& spec) {
  if (spec.min_len < 3) throw std::invalid_argument("gen_synthetic: min_len must be >= 3");
  if (spec.max_len < spec.min_len)
    throw std::invalid_argument("gen_synthetic: max_len must be >= min_len");
  if (spec.marker_range < 1)
    throw std::invalid_argument("gen_synthetic: marker_range must be >= 1");
  if (spec.count < 0) throw std::invalid_argument("gen_synthetic: count must be >= 0");
  if (spec.min_linear_offset < 0)
    throw std::invalid_argument("gen_synthetic: min_linear_offset must be >= 0");

  std::mt19937_64 rng(spec.seed);
  Corpus corpus;
  corpus.name = spec.name;
  corpus.instances.reserve(spec.count);

  for (int k = 0; k < spec.count; ++k) {
    const bool plant = bounded(rng, 2) == 1;
    Instance ins;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000)
        throw std::invalid_argument(
            "gen_synthetic: cannot place a marker under min_linear_offset=" +
            std::to_string(spec.min_linear_offset) + " with the given length range");
      const int n = spec.min_len + bounded(rng, spec.max_len - spec.min_len + 1);
      auto adj = detail::random_tree_adj(rng, n);
      ins = Instance{};
      ins.heads = detail::heads_from_adj(adj, bounded(rng, n));
      ins.forms.resize(n);
      for (auto& f : ins.forms) f = "w" + std::to_string(bounded(rng, 200));
      ins.target_idx = bounded(rng, n);
      if (!plant) {
        ins.label = 0;
        break;
      }
      std::vector<int> dist = distances_from(build_tree(ins), ins.target_idx);
      std::vector<int> spots;
      for (int i = 0; i < n; ++i) {
        if (i == ins.target_idx || dist[i] > spec.marker_range) continue;
        if (std::abs(i - ins.target_idx) <= spec.min_linear_offset) continue;
        spots.push_back(i);
      }
      if (spots.empty()) continue;  // redraw the tree, keep the coin
      ins.forms[spots[bounded(rng, static_cast<int>(spots.size()))]] = kMarkerForm;
      ins.label = 1;
      break;
    }
    corpus.instances.push_back(std::move(ins));
  }
  return corpus;
}

inline Corpus gen_synthetic(std::uint64_t seed, int count, int min_len, int max_len,
                            int marker_range) {
  SyntheticSpec spec;
  spec.seed = seed;
  spec.count = count;
  spec.min_len = min_len;
  spec.max_len = max_len;
  spec.marker_range = marker_range;
  return gen_synthetic(spec);
}

}  // namespace roppt
