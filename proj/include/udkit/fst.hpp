#pragma once

// A small unweighted finite-state transducer: construction, composition,
// inversion, trimming and exhaustive string application.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "udkit/error.hpp"

namespace udkit::fst {

using Symbol = int;
inline constexpr Symbol kEpsilon = 0;

struct Arc {
  Symbol in = kEpsilon;
  Symbol out = kEpsilon;
  int target = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

class Transducer {
 public:
  int add_state() {
    arcs_.emplace_back();
    final_.push_back(false);
    return static_cast<int>(arcs_.size()) - 1;
  }

  void add_arc(int from, Symbol in, Symbol out, int to) { arcs_.at(from).push_back({in, out, to}); }
  void set_final(int s, bool f = true) { final_.at(s) = f; }
  void set_start(int s) { start_ = s; }

  int start() const { return start_; }
  int num_states() const { return static_cast<int>(arcs_.size()); }
  bool is_final(int s) const { return final_[s]; }
  const std::vector<Arc>& arcs(int s) const { return arcs_[s]; }
  std::size_t num_arcs() const {
    std::size_t n = 0;
    for (const auto& a : arcs_) n += a.size();
    return n;
  }

  // Swaps the input and output side of every arc.
  Transducer inverted() const {
    Transducer t = *this;
    for (auto& row : t.arcs_)
      for (auto& a : row) std::swap(a.in, a.out);
    return t;
  }

  // Copies `other` into this machine; returns the state offset.
  int absorb(const Transducer& other) {
    const int offset = num_states();
    for (int s = 0; s < other.num_states(); ++s) {
      add_state();
      set_final(offset + s, other.is_final(s));
    }
    for (int s = 0; s < other.num_states(); ++s)
      for (const auto& a : other.arcs(s)) add_arc(offset + s, a.in, a.out, offset + a.target);
    return offset;
  }

  // Removes states that are unreachable from the start or cannot reach a
  // final state. Surviving states keep their relative order.
  Transducer trimmed() const {
    const int n = num_states();
    if (n == 0) return *this;
    std::vector<bool> fwd(n, false), bwd(n, false);
    std::vector<int> stack{start_};
    fwd[start_] = true;
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (const auto& a : arcs_[s])
        if (!fwd[a.target]) {
          fwd[a.target] = true;
          stack.push_back(a.target);
        }
    }
    std::vector<std::vector<int>> rev(n);
    for (int s = 0; s < n; ++s)
      for (const auto& a : arcs_[s]) rev[a.target].push_back(s);
    for (int s = 0; s < n; ++s)
      if (final_[s]) {
        bwd[s] = true;
        stack.push_back(s);
      }
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (int p : rev[s])
        if (!bwd[p]) {
          bwd[p] = true;
          stack.push_back(p);
        }
    }
    Transducer t;
    std::vector<int> remap(n, -1);
    for (int s = 0; s < n; ++s)
      if ((fwd[s] && bwd[s]) || s == start_) remap[s] = t.add_state();
    t.set_start(remap[start_]);
    for (int s = 0; s < n; ++s) {
      if (remap[s] < 0) continue;
      t.set_final(remap[s], final_[s]);
      for (const auto& a : arcs_[s])
        if (remap[a.target] >= 0 && fwd[a.target] && bwd[a.target]) t.add_arc(remap[s], a.in, a.out, remap[a.target]);
    }
    return t;
  }

  // Relation composition: (x, z) such that this maps x to some y and `b` maps y to z.
  Transducer compose(const Transducer& b) const {
    const Transducer& a = *this;
    Transducer out;
    std::map<std::pair<int, int>, int> ids;
    std::vector<std::pair<int, int>> queue;
    auto get = [&](int qa, int qb) {
      auto [it, inserted] = ids.emplace(std::make_pair(qa, qb), 0);
      if (inserted) {
        it->second = out.add_state();
        out.set_final(it->second, a.is_final(qa) && b.is_final(qb));
        queue.emplace_back(qa, qb);
      }
      return it->second;
    };
    out.set_start(get(a.start(), b.start()));
    for (std::size_t k = 0; k < queue.size(); ++k) {
      auto [qa, qb] = queue[k];
      int from = ids[{qa, qb}];
      for (const auto& x : a.arcs(qa)) {
        if (x.out == kEpsilon) {
          int to = get(x.target, qb);
          out.add_arc(from, x.in, kEpsilon, to);
          continue;
        }
        for (const auto& y : b.arcs(qb))
          if (y.in == x.out) {
            int to = get(x.target, y.target);
            out.add_arc(from, x.in, y.out, to);
          }
      }
      for (const auto& y : b.arcs(qb))
        if (y.in == kEpsilon) {
          int to = get(qa, y.target);
          out.add_arc(from, kEpsilon, y.out, to);
        }
    }
    return out.trimmed();
  }

  // All output strings for `input`, deduplicated and sorted. Epsilon-input
  // runs are capped at the state count.
  std::vector<std::vector<Symbol>> apply(const std::vector<Symbol>& input) const {
    std::set<std::vector<Symbol>> results;
    if (num_states() == 0) return {};
    std::vector<Symbol> output;
    const int eps_cap = num_states();
    struct Walker {
      const Transducer& t;
      const std::vector<Symbol>& input;
      std::set<std::vector<Symbol>>& results;
      std::vector<Symbol>& output;
      int eps_cap;
      void walk(int state, std::size_t pos, int eps_run) {
        if (pos == input.size() && t.is_final(state)) results.insert(output);
        for (const auto& a : t.arcs(state)) {
          if (a.in == kEpsilon) {
            if (eps_run >= eps_cap) continue;
            push(a.out);
            walk(a.target, pos, eps_run + 1);
            pop(a.out);
          } else if (pos < input.size() && input[pos] == a.in) {
            push(a.out);
            walk(a.target, pos + 1, 0);
            pop(a.out);
          }
        }
      }
      void push(Symbol s) {
        if (s != kEpsilon) output.push_back(s);
      }
      void pop(Symbol s) {
        if (s != kEpsilon) output.pop_back();
      }
    };
    Walker{*this, input, results, output, eps_cap}.walk(start_, 0, 0);
    return {results.begin(), results.end()};
  }

  friend bool operator==(const Transducer&, const Transducer&) = default;

 private:
  std::vector<std::vector<Arc>> arcs_;
  std::vector<bool> final_;
  int start_ = 0;
};

// Maps symbol names (single characters as UTF-8, or multi-character tags) to ids.
class SymbolTable {
 public:
  SymbolTable() { names_.push_back("<eps>"); }

  Symbol intern(const std::string& name) {
    auto [it, inserted] = ids_.emplace(name, static_cast<Symbol>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }

  Symbol find(const std::string& name) const {
    auto it = ids_.find(name);
    return it == ids_.end() ? -1 : it->second;
  }

  const std::string& name(Symbol s) const { return names_.at(s); }
  std::size_t size() const { return names_.size(); }

  friend bool operator==(const SymbolTable& a, const SymbolTable& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, Symbol> ids_;
};

}  // namespace udkit::fst
