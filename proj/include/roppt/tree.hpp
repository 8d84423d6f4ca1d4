#pragma once

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <vector>

#include "roppt/corpus.hpp"

namespace roppt {

// Undirected view of a sentence's dependency edges. Direction and relation
// labels play no further role once the tree is built; pruning depends only
// on topology.
struct DepTree {
  int n = 0;
  std::vector<std::vector<int>> adj;  // neighbor lists, ascending
};

inline DepTree build_tree(const Instance& ins) {
  DepTree t;
  t.n = ins.size();
  t.adj.resize(t.n);
  for (int i = 0; i < t.n; ++i) {
    int h = ins.heads[i];
    if (h == kRootHead) continue;
    t.adj[i].push_back(h);
    t.adj[h].push_back(i);
  }
  for (auto& nb : t.adj) std::sort(nb.begin(), nb.end());
  return t;
}

// Edge-count distance of every token from `root`, breadth-first. Re-rooting
// the tree at a token is realized entirely through this map.
inline std::vector<int> distances_from(const DepTree& t, int root) {
  if (root < 0 || root >= t.n) throw std::invalid_argument("distances_from: root out of range");
  std::vector<int> dist(t.n, -1);
  dist[root] = 0;
  std::queue<int> q;
  q.push(root);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : t.adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

// Token indices within neighbor range `con` of the target, ascending.
struct RetainedSet {
  std::vector<int> indices;
  int con = 0;

  bool contains(int i) const {
    return std::binary_search(indices.begin(), indices.end(), i);
  }
};

// Keeps every token at tree distance <= con from the target. The target
// itself (distance 0) is always retained.
inline RetainedSet prune(const DepTree& t, int target, int con) {
  if (target < 0 || target >= t.n) throw std::invalid_argument("prune: target out of range");
  if (con < 0) throw std::invalid_argument("prune: con must be non-negative");
  std::vector<int> dist = distances_from(t, target);
  RetainedSet r;
  r.con = con;
  for (int i = 0; i < t.n; ++i)
    if (dist[i] <= con) r.indices.push_back(i);
  return r;
}

// Maximum pairwise edge distance, by double breadth-first sweep.
inline int diameter(const DepTree& t) {
  if (t.n <= 1) return 0;
  std::vector<int> d0 = distances_from(t, 0);
  int far = 0;
  for (int i = 1; i < t.n; ++i)
    if (d0[i] > d0[far]) far = i;
  std::vector<int> d1 = distances_from(t, far);
  return *std::max_element(d1.begin(), d1.end());
}

}  // namespace roppt
