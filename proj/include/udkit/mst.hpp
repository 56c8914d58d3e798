#pragma once

// Maximum spanning arborescence decoding (Chu-Liu/Edmonds).

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "udkit/error.hpp"

namespace udkit {

// Dense arc scores: scores[h][d] for head h in [0, n] and dependent d in [1, n].
// Node 0 is the virtual root. Missing arcs are -infinity.
using ScoreMatrix = std::vector<std::vector<double>>;

inline constexpr double kNoArc = -std::numeric_limits<double>::infinity();

namespace detail {

inline std::vector<int> chu_liu_edmonds(const ScoreMatrix& s) {
  const int m = static_cast<int>(s.size());
  std::vector<int> heads(m, -1);
  for (int d = 1; d < m; ++d) {
    double best = kNoArc;
    for (int h = 0; h < m; ++h) {
      if (h == d || s[h][d] == kNoArc) continue;
      // strict comparison keeps the leftmost head on ties
      if (heads[d] < 0 || s[h][d] > best) {
        best = s[h][d];
        heads[d] = h;
      }
    }
    if (heads[d] < 0) throw DataError("node " + std::to_string(d) + " has no incoming arc");
  }

  // First cycle among the greedy choices, if any.
  std::vector<int> cycle;
  {
    std::vector<int> mark(m, 0);
    for (int start = 1; start < m && cycle.empty(); ++start) {
      int v = start;
      while (v != 0 && mark[v] == 0) {
        mark[v] = start;
        v = heads[v];
      }
      if (v != 0 && mark[v] == start) {
        int u = v;
        do {
          cycle.push_back(u);
          u = heads[u];
        } while (u != v);
      }
    }
  }
  if (cycle.empty()) return heads;
  std::sort(cycle.begin(), cycle.end());

  std::vector<bool> in_cycle(m, false);
  for (int v : cycle) in_cycle[v] = true;

  // Contract the cycle into a single node placed last.
  std::vector<int> new_index(m, -1), old_index;
  for (int v = 0; v < m; ++v) {
    if (in_cycle[v]) continue;
    new_index[v] = static_cast<int>(old_index.size());
    old_index.push_back(v);
  }
  const int c = static_cast<int>(old_index.size());
  const int mm = c + 1;
  ScoreMatrix t(mm, std::vector<double>(mm, kNoArc));
  std::vector<int> enter(m, -1), leave(m, -1);
  for (int u : old_index) {
    for (int w : old_index) {
      if (u != w && w != 0) t[new_index[u]][new_index[w]] = s[u][w];
    }
    // best arc from u into the cycle, relative to the arc it replaces
    double best = kNoArc;
    for (int v : cycle) {
      if (s[u][v] == kNoArc) continue;
      double adj = s[u][v] - s[heads[v]][v];
      if (enter[u] < 0 || adj > best) {
        best = adj;
        enter[u] = v;
      }
    }
    t[new_index[u]][c] = best;
    if (u != 0) {
      double out_best = kNoArc;
      for (int v : cycle) {
        if (s[v][u] == kNoArc) continue;
        if (leave[u] < 0 || s[v][u] > out_best) {
          out_best = s[v][u];
          leave[u] = v;
        }
      }
      t[c][new_index[u]] = out_best;
    }
  }

  std::vector<int> sub = chu_liu_edmonds(t);
  std::vector<int> result = heads;  // cycle arcs kept except the broken one
  for (int w : old_index) {
    if (w == 0) continue;
    int h = sub[new_index[w]];
    result[w] = (h == c) ? leave[w] : old_index[h];
  }
  int entering_from = old_index[sub[c]];
  result[enter[entering_from]] = entering_from;
  return result;
}

}  // namespace detail

// Heads (index d -> head of d, entry 0 unused and set to -1) of the maximum
// spanning arborescence rooted at node 0. Every node needs at least one
// finite-scored incoming arc and must be reachable from the root.
inline std::vector<int> max_arborescence(const ScoreMatrix& scores) {
  if (scores.size() < 2) throw DataError("cannot decode an empty graph");
  for (const auto& row : scores)
    if (row.size() != scores.size()) throw DataError("score matrix must be square");
  auto heads = detail::chu_liu_edmonds(scores);
  heads[0] = -1;
  return heads;
}

inline double arborescence_weight(const ScoreMatrix& scores, const std::vector<int>& heads) {
  double w = 0;
  for (std::size_t d = 1; d < heads.size(); ++d) w += scores[heads[d]][d];
  return w;
}

struct WeightedArc {
  int head = 0;
  int dep = 0;
  double weight = 0;
  friend bool operator==(const WeightedArc&, const WeightedArc&) = default;
};

// Candidate arcs over an n-token target sentence; node 0 is the virtual root.
// At most one arc per (head, dep); weights accumulate.
class WeightedDigraph {
 public:
  explicit WeightedDigraph(int n = 0) : n_(n) {
    if (n < 0) throw DataError("negative node count");
  }

  int size() const { return n_; }

  void add_weight(int head, int dep, double w) {
    if (head < 0 || head > n_ || dep < 1 || dep > n_) throw DataError("arc endpoint out of range");
    if (head == dep) throw DataError("self-arcs are not allowed");
    if (!(w >= 0)) throw DataError("arc weights must be non-negative");
    arcs_[{head, dep}] += w;
  }

  bool has_arc(int head, int dep) const { return arcs_.count({head, dep}) > 0; }

  double weight(int head, int dep) const {
    auto it = arcs_.find({head, dep});
    return it == arcs_.end() ? 0.0 : it->second;
  }

  std::vector<WeightedArc> arcs() const {
    std::vector<WeightedArc> out;
    for (const auto& [k, w] : arcs_) out.push_back({k.first, k.second, w});
    return out;
  }

  std::size_t arc_count() const { return arcs_.size(); }

 private:
  int n_;
  std::map<std::pair<int, int>, double> arcs_;
};

inline constexpr double kReachabilityEpsilon = 1e-6;

// Adds root arcs of weight epsilon, leftmost unreachable node first, until
// every node is reachable from the root.
inline WeightedDigraph ensure_reachable(WeightedDigraph g, double epsilon = kReachabilityEpsilon) {
  const int n = g.size();
  std::vector<std::vector<int>> children(n + 1);
  for (const auto& a : g.arcs()) children[a.head].push_back(a.dep);
  while (true) {
    std::vector<bool> seen(n + 1, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int c : children[v])
        if (!seen[c]) {
          seen[c] = true;
          stack.push_back(c);
        }
    }
    int missing = -1;
    for (int d = 1; d <= n && missing < 0; ++d)
      if (!seen[d]) missing = d;
    if (missing < 0) return g;
    g.add_weight(0, missing, epsilon);
    children[0].push_back(missing);
  }
}

// Decodes the maximum arborescence of `g` as (head, dep) pairs ordered by dep.
inline std::vector<std::pair<int, int>> decode_mst(const WeightedDigraph& graph) {
  if (graph.size() == 0) throw DataError("cannot decode a graph with no tokens");
  WeightedDigraph g = ensure_reachable(graph);
  const int n = g.size();
  ScoreMatrix s(n + 1, std::vector<double>(n + 1, kNoArc));
  for (const auto& a : g.arcs()) s[a.head][a.dep] = a.weight;
  auto heads = max_arborescence(s);
  std::vector<std::pair<int, int>> out;
  for (int d = 1; d <= n; ++d) out.emplace_back(heads[d], d);
  return out;
}

}  // namespace udkit
