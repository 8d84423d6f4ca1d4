#pragma once

#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace roppt {

// Head value marking the root token of a sentence.
inline constexpr int kRootHead = -1;

// One classification example: a dependency-parsed sentence, a target token
// and a binary label (1 = metaphorical, 0 = literal). Token i has surface
// form forms[i] and syntactic head heads[i] (kRootHead for the root).
struct Instance {
  std::vector<std::string> forms;
  std::vector<int> heads;
  int target_idx = 0;
  int label = 0;

  int size() const { return static_cast<int>(forms.size()); }
  bool operator==(const Instance&) const = default;
};

struct Corpus {
  std::vector<Instance> instances;
  std::string name;

  int size() const { return static_cast<int>(instances.size()); }
};

// Returns a description of the first violated invariant, or nullopt if the
// instance is well-formed. Checked: forms/heads alignment, exactly one root,
// head indices in range and not self-referential, head links forming a single
// connected tree, target in bounds, binary label.
inline std::optional<std::string> check_instance(const Instance& ins) {
  const int n = ins.size();
  if (ins.heads.size() != ins.forms.size())
    return "tokens/heads length mismatch (" + std::to_string(ins.forms.size()) + " vs " +
           std::to_string(ins.heads.size()) + ")";
  if (n == 0) return std::optional<std::string>("empty sentence");

  int root = -1;
  int root_count = 0;
  for (int i = 0; i < n; ++i) {
    int h = ins.heads[i];
    if (h == kRootHead) {
      root = i;
      ++root_count;
      continue;
    }
    if (h < 0 || h >= n)
      return "head out of range at token " + std::to_string(i) + " (head=" + std::to_string(h) + ")";
    if (h == i) return "token " + std::to_string(i) + " is its own head";
  }
  if (root_count == 0) return std::optional<std::string>("not a tree: no root token");
  if (root_count > 1)
    return "not a tree: " + std::to_string(root_count) + " root tokens";

  // n-1 head links plus a single root: connected iff acyclic. Breadth-first
  // over the undirected edges induced by the head links.
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    if (ins.heads[i] == kRootHead) continue;
    adj[i].push_back(ins.heads[i]);
    adj[ins.heads[i]].push_back(i);
  }
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(root);
  seen[root] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  if (reached < n) {
    for (int i = 0; i < n; ++i)
      if (!seen[i])
        return "not a tree: token " + std::to_string(i) + " unreachable from the root";
  }

  if (ins.target_idx < 0 || ins.target_idx >= n)
    return "target_idx out of range (" + std::to_string(ins.target_idx) + " of " +
           std::to_string(n) + " tokens)";
  if (ins.label != 0 && ins.label != 1)
    return "label must be 0 or 1 (got " + std::to_string(ins.label) + ")";
  return std::nullopt;
}

inline void validate_instance(const Instance& ins) {
  if (auto err = check_instance(ins)) throw std::invalid_argument(*err);
}

}  // namespace roppt
