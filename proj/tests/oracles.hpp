#pragma once

// Independent reference implementations the library is checked against.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "udkit/conllu.hpp"
#include "udkit/evaluator.hpp"
#include "udkit/mst.hpp"
#include "udkit/morph.hpp"
#include "udkit/projection.hpp"
#include "udkit/rng.hpp"

namespace oracle {

// ---- arborescences ---------------------------------------------------------

// Best total weight over every head assignment that forms an arborescence
// rooted at node 0; -inf when none exists.
inline double best_arborescence_weight(const udkit::ScoreMatrix& s) {
  const int n = static_cast<int>(s.size()) - 1;
  std::vector<int> heads(n + 1, 0);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(int, double)> go = [&](int d, double acc) {
    if (d > n) {
      for (int v = 1; v <= n; ++v) {
        int cur = v, steps = 0;
        while (cur != 0 && steps <= n) {
          cur = heads[cur];
          ++steps;
        }
        if (cur != 0) return;
      }
      best = std::max(best, acc);
      return;
    }
    for (int h = 0; h <= n; ++h) {
      if (h == d || std::isinf(s[h][d])) continue;
      heads[d] = h;
      go(d + 1, acc + s[h][d]);
    }
  };
  go(1, 0.0);
  return best;
}

inline udkit::WeightedDigraph random_digraph(udkit::Rng& rng, int n) {
  udkit::WeightedDigraph g(n);
  for (int h = 0; h <= n; ++h)
    for (int d = 1; d <= n; ++d) {
      if (h == d || rng.index(10) < 3) continue;
      // Small integer weights make ties common.
      g.add_weight(h, d, static_cast<double>(rng.index(6)));
    }
  return g;
}

inline udkit::ScoreMatrix matrix_of(const udkit::WeightedDigraph& g) {
  const int n = g.size();
  udkit::ScoreMatrix s(n + 1, std::vector<double>(n + 1, udkit::kNoArc));
  for (const auto& a : g.arcs()) s[a.head][a.dep] = a.weight;
  return s;
}

inline double weight_of(const udkit::ScoreMatrix& s, const std::vector<std::pair<int, int>>& arcs) {
  double w = 0;
  for (auto [h, d] : arcs) w += s[h][d];
  return w;
}

inline bool is_arborescence(int n, const std::vector<std::pair<int, int>>& arcs) {
  if (static_cast<int>(arcs.size()) != n) return false;
  std::vector<int> heads(n + 1, -1);
  for (auto [h, d] : arcs) {
    if (d < 1 || d > n || heads[d] != -1 || h < 0 || h > n || h == d) return false;
    heads[d] = h;
  }
  for (int v = 1; v <= n; ++v) {
    int cur = v, steps = 0;
    while (cur != 0 && steps <= n) {
      cur = heads[cur];
      ++steps;
    }
    if (cur != 0) return false;
  }
  return true;
}

// ---- morphology by string surgery ----------------------------------------

inline bool vowel(char c) { return std::string("aeiou").find(c) != std::string::npos; }

// Applies one starter-pack rule to an ASCII stem; nullopt when it does not apply.
inline std::optional<std::string> apply_rule(const udkit::morph::MorphRule& r, const std::string& w) {
  using udkit::morph::Context;
  using udkit::morph::Pattern;
  switch (r.pattern) {
    case Pattern::kPrefix:
      return r.affix + w;
    case Pattern::kSuffix: {
      if (w.empty()) return std::nullopt;
      bool v = vowel(w.back());
      if (r.context == Context::kAfterVowel && !v) return std::nullopt;
      if (r.context == Context::kAfterConsonant && v) return std::nullopt;
      return w + r.affix;
    }
    case Pattern::kInfix: {
      std::size_t k = 0;
      while (k < w.size() && !vowel(w[k])) ++k;
      if (k == w.size()) return std::nullopt;
      return w.substr(0, k) + r.affix + w.substr(k);
    }
    case Pattern::kRedup: {
      std::size_t k = 0;
      while (k < w.size() && !vowel(w[k])) ++k;
      if (k == w.size()) return std::nullopt;
      std::string copy = k > 0 ? std::string(1, w[0]) : std::string();
      copy += w[k];
      return copy + w;
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> surface(const udkit::morph::RuleSet& rs, const std::string& lemma,
                                          const std::vector<int>& seq) {
  std::optional<std::string> w = lemma;
  for (int r : seq) {
    w = apply_rule(rs.rules[r], *w);
    if (!w) return std::nullopt;
  }
  return w;
}

inline const std::vector<std::string>& lexicon20() {
  static const std::vector<std::string> words = {"bili", "basa",  "sulat", "kain", "inom",  "luto",  "takbo",
                                                 "sayaw", "gawa", "kuha",  "lakad", "linis", "upo",  "awit",
                                                 "bigay", "dala", "tapos", "sama", "turo", "hiram"};
  return words;
}

// ---- POS voting ------------------------------------------------------------

inline std::optional<std::string> vote(const std::vector<std::pair<std::string, double>>& links) {
  std::map<std::string, double> sums;
  for (const auto& [tag, c] : links) sums[tag] += c;
  std::optional<std::string> best;
  double top = -1;
  for (const auto& [tag, s] : sums)
    if (s > top) {
      top = s;
      best = tag;
    }
  // Among exact ties the alphabetically first tag was kept above.
  return best;
}

// ---- identity projection ---------------------------------------------------

struct ProjectionDiff {
  std::size_t tags = 0;
  std::size_t heads = 0;
};

inline ProjectionDiff identity_projection(const udkit::AnnotatedSentence& s) {
  namespace pj = udkit::project;
  ProjectionDiff diff;
  std::vector<std::string> forms;
  for (const auto& t : s.tokens) forms.push_back(t.form);
  pj::ProjectionGroup g;
  g.pair = {forms, forms, "self"};
  for (std::size_t j = 0; j < forms.size(); ++j)
    g.links.push_back({static_cast<int>(j), static_cast<int>(j), 1.0});
  g.annotation = pj::source_annotation(s);
  auto tags = pj::project_pos({g});
  for (std::size_t j = 0; j < forms.size(); ++j)
    if (tags[j] != s.tokens[j].upos) ++diff.tags;
  if (s.all_heads_set()) {
    auto arcs = udkit::decode_mst(pj::build_edge_graph({g}));
    for (auto [h, d] : arcs)
      if (s.tokens[d - 1].head != h) ++diff.heads;
  }
  return diff;
}

// ---- evaluator corruptions ------------------------------------------------

struct Corruption {
  std::size_t metric = 0;  // index into eval::kMetricNames
};

// Changes one annotation field of one word to a value differing from both the
// current and the gold value.
inline Corruption corrupt(udkit::Treebank& sys, const udkit::Treebank& gold, udkit::Rng& rng) {
  for (;;) {
    auto si = rng.index(sys.size());
    auto& s = sys.sentences[si];
    if (s.tokens.empty()) continue;
    auto ti = rng.index(s.size());
    auto& t = s.tokens[ti];
    const auto& g = gold.sentences[si].tokens[ti];
    const int n = static_cast<int>(s.size());
    switch (rng.index(5)) {
      case 0: {
        static const char* tags[] = {"NOUN", "VERB", "ADJ", "ADV", "ADP", "X"};
        std::string v = tags[rng.index(6)];
        if (v == t.upos || v == g.upos) continue;
        t.upos = v;
        return {3};
      }
      case 1: {
        udkit::Features f = t.feats;
        f.set("Corrupt", std::to_string(rng.index(1000)));
        if (f == t.feats || f == g.feats) continue;
        t.feats = f;
        return {4};
      }
      case 2: {
        std::string v = "lemma" + std::to_string(rng.index(1000));
        if (v == t.lemma || v == g.lemma) continue;
        t.lemma = v;
        return {5};
      }
      case 3: {
        int h = static_cast<int>(rng.index(static_cast<std::size_t>(n) + 1));
        if (h == t.head || h == g.head) continue;
        t.head = h;
        return {6};
      }
      default: {
        static const char* rels[] = {"nsubj", "obj", "obl", "case", "det", "dep"};
        std::string v = rels[rng.index(6)];
        if (v == t.deprel || (g.deprel && udkit::universal_deprel(v) == udkit::universal_deprel(*g.deprel))) continue;
        if (t.deprel && udkit::universal_deprel(v) == udkit::universal_deprel(*t.deprel)) continue;
        t.deprel = v;
        return {7};
      }
    }
  }
}

}  // namespace oracle
