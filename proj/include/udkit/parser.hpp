#pragma once

// Arc-factored dependency parser: structured averaged perceptron over
// MST decoding, with deprels from the delexicalized labeler.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "udkit/conllu.hpp"
#include "udkit/delex.hpp"
#include "udkit/error.hpp"
#include "udkit/mst.hpp"
#include "udkit/perceptron.hpp"
#include "udkit/rng.hpp"
#include "udkit/text.hpp"

namespace udkit::parser {

struct ParserOptions {
  int epochs = 10;
  std::uint64_t seed = 1;
  int labeler_trees = 50;
};

namespace detail {

inline std::string distance_bin(int d) {
  if (d <= 1) return "1";
  if (d == 2) return "2";
  if (d <= 5) return "3-5";
  if (d <= 10) return "6-10";
  return ">10";
}

struct View {
  std::vector<std::string> upos;   // index 0 is the root
  std::vector<std::string> forms;  // lowercased
};

inline View view_of(const AnnotatedSentence& s) {
  View v;
  v.upos.push_back("ROOT");
  v.forms.push_back("<root>");
  for (const auto& t : s.tokens) {
    v.upos.push_back(t.upos.value_or("X"));
    v.forms.push_back(text::lower(t.form));
  }
  return v;
}

inline std::vector<std::string> arc_features(const View& v, int h, int d) {
  const std::string pair = v.upos[h] + "|" + v.upos[d];
  return {
      "hp,dp=" + pair,
      "hp,dp,dir=" + pair + (h < d ? "|R" : "|L"),
      "hp,dp,dist=" + pair + "|" + distance_bin(std::abs(h - d)),
      "hw,dp=" + v.forms[h] + "|" + v.upos[d],
      "hp,dw=" + v.upos[h] + "|" + v.forms[d],
  };
}

template <class Weight>
ScoreMatrix score_matrix(const View& v, Weight&& weight) {
  const int n = static_cast<int>(v.upos.size()) - 1;
  ScoreMatrix s(n + 1, std::vector<double>(n + 1, kNoArc));
  double lo = 0, hi = 0;
  for (int h = 0; h <= n; ++h)
    for (int d = 1; d <= n; ++d) {
      if (h == d) continue;
      double x = 0;
      for (const auto& f : arc_features(v, h, d)) x += weight(f);
      s[h][d] = x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  // Root arcs penalized: exactly one root.
  const double penalty = 1.0 + static_cast<double>(n) * (hi - lo);
  for (int d = 1; d <= n; ++d) s[0][d] -= penalty;
  return s;
}

}  // namespace detail

class ParserModel {
 public:
  std::map<std::string, double> weights;
  delex::Labeler labeler;

  double weight(const std::string& f) const {
    auto it = weights.find(f);
    return it == weights.end() ? 0.0 : it->second;
  }

  // heads[i] for token i+1
  std::vector<int> predict_heads(const AnnotatedSentence& s) const {
    if (s.tokens.empty()) return {};
    auto v = detail::view_of(s);
    auto heads = max_arborescence(detail::score_matrix(v, [&](const std::string& f) { return weight(f); }));
    return std::vector<int>(heads.begin() + 1, heads.end());
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "udkit-parser\t1\n";
    for (const auto& [f, w] : weights) os << "w\t" << f << '\t' << text::format_double(w) << '\n';
    os << "labeler\n" << labeler.serialize();
    return os.str();
  }

  static ParserModel deserialize(std::string_view input) {
    ParserModel m;
    auto ls = text::lines(input);
    if (ls.empty() || ls[0] != "udkit-parser\t1") throw ParseError(1, "not a udkit parser model (version 1)");
    std::size_t i = 1;
    for (; i < ls.size() && ls[i] != "labeler"; ++i) {
      auto c = text::split(ls[i], '\t');
      if (c.size() != 3 || c[0] != "w") throw ParseError(i + 1, "expected w<TAB>feature<TAB>weight");
      auto v = text::parse_double(c[2]);
      if (!v || !std::isfinite(*v)) throw ParseError(i + 1, "bad weight");
      m.weights[std::string(c[1])] = *v;
    }
    if (i == ls.size()) throw ParseError(i, "missing labeler section");
    std::string rest;
    for (++i; i < ls.size(); ++i) rest += ls[i] + "\n";
    m.labeler = delex::Labeler::deserialize(rest);
    return m;
  }

  friend bool operator==(const ParserModel&, const ParserModel&) = default;
};

inline ParserModel train_parser(const Treebank& tb, const ParserOptions& opts = {}) {
  if (tb.sentences.empty() || tb.word_count() == 0) throw DataError("cannot train a parser on an empty treebank");
  if (opts.epochs < 1) throw DataError("epochs must be at least 1");
  for (std::size_t si = 0; si < tb.size(); ++si) {
    const auto& s = tb.sentences[si];
    auto bad = validate_tree(s);
    if (!bad.empty()) throw DataError("sentence " + std::to_string(si + 1) + ": " + bad.front().message);
  }

  std::vector<detail::View> views;
  for (const auto& s : tb.sentences) views.push_back(detail::view_of(s));

  AveragedWeights w;
  auto lookup = [&](const std::string& f) { return w.get(f); };
  std::vector<std::size_t> order(tb.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(opts.seed);
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(order);
    for (auto si : order) {
      const auto& s = tb.sentences[si];
      const auto& v = views[si];
      if (s.tokens.empty()) continue;
      auto pred = max_arborescence(detail::score_matrix(v, lookup));
      for (std::size_t k = 0; k < s.tokens.size(); ++k) {
        const int d = static_cast<int>(k) + 1;
        const int gh = *s.tokens[k].head;
        const int ph = pred[d];
        if (gh == ph) continue;
        for (const auto& f : detail::arc_features(v, gh, d)) w.update(f, 1.0);
        for (const auto& f : detail::arc_features(v, ph, d)) w.update(f, -1.0);
      }
      w.tick();
    }
  }

  ParserModel m;
  m.weights = w.averaged();
  delex::LabelerOptions lo;
  lo.n_trees = opts.labeler_trees;
  lo.seed = opts.seed;
  m.labeler = delex::train_labeler(delex::extract_examples(tb), lo);
  return m;
}

inline AnnotatedSentence parse(const AnnotatedSentence& s, const ParserModel& m, const delex::Labeler& labeler) {
  AnnotatedSentence out = s;
  auto heads = m.predict_heads(s);
  for (std::size_t k = 0; k < out.tokens.size(); ++k) {
    auto& t = out.tokens[k];
    t.head = heads[k];
    if (heads[k] == 0) {
      t.deprel = "root";
    } else {
      const auto& h = out.tokens[static_cast<std::size_t>(heads[k]) - 1];
      t.deprel = labeler.predict(t.upos.value_or("X"), h.upos.value_or("X"));
    }
  }
  return out;
}

inline AnnotatedSentence parse(const AnnotatedSentence& s, const ParserModel& m) { return parse(s, m, m.labeler); }

inline Treebank parse_treebank(const Treebank& tb, const ParserModel& m) {
  Treebank out;
  out.source_name = tb.source_name;
  for (const auto& s : tb.sentences) out.sentences.push_back(parse(s, m));
  return out;
}

}  // namespace udkit::parser
