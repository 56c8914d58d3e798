#pragma once

// Greedy left-to-right averaged-perceptron POS tagger.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "udkit/conllu.hpp"
#include "udkit/error.hpp"
#include "udkit/perceptron.hpp"
#include "udkit/rng.hpp"
#include "udkit/text.hpp"

namespace udkit::tagger {

struct TaggerOptions {
  int epochs = 10;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string affix(const std::vector<char32_t>& cps, std::size_t n, bool prefix) {
  n = std::min(n, cps.size());
  std::vector<char32_t> part = prefix ? std::vector<char32_t>(cps.begin(), cps.begin() + static_cast<long>(n))
                                      : std::vector<char32_t>(cps.end() - static_cast<long>(n), cps.end());
  return text::encode(part);
}

// Features of token i given the previously predicted tag.
inline std::vector<std::string> features(const std::vector<std::string>& lower_forms, std::size_t i,
                                         const std::string& prev_tag) {
  const std::string& w = lower_forms[i];
  auto cps = text::decode(w);
  std::vector<std::string> f;
  f.reserve(14);
  f.push_back("bias");
  f.push_back("w=" + w);
  for (std::size_t k = 1; k <= 3; ++k) {
    f.push_back("p" + std::to_string(k) + "=" + affix(cps, k, true));
    f.push_back("s" + std::to_string(k) + "=" + affix(cps, k, false));
  }
  if (std::any_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; })) f.push_back("digit");
  if (w.find('-') != std::string::npos) f.push_back("hyphen");
  f.push_back("t-1=" + prev_tag);
  f.push_back("w-1=" + (i == 0 ? std::string("<s>") : lower_forms[i - 1]));
  f.push_back("w+1=" + (i + 1 == lower_forms.size() ? std::string("</s>") : lower_forms[i + 1]));
  return f;
}

inline std::vector<std::string> lower_forms(const AnnotatedSentence& s) {
  std::vector<std::string> out;
  for (const auto& t : s.tokens) out.push_back(text::lower(t.form));
  return out;
}

}  // namespace detail

class TaggerModel {
 public:
  std::vector<std::string> tagset;                                     // sorted
  std::map<std::string, std::map<std::string, double>> weights;        // feature -> tag -> weight

  // Highest-scoring tag; ties go to the alphabetically first tag.
  template <class Lookup>
  static std::string best(const std::vector<std::string>& tagset, const std::vector<std::string>& feats,
                          Lookup&& weight) {
    std::string best_tag;
    double best_score = 0;
    bool first = true;
    for (const auto& tag : tagset) {
      double s = 0;
      for (const auto& f : feats) s += weight(f, tag);
      if (first || s > best_score) {
        best_score = s;
        best_tag = tag;
        first = false;
      }
    }
    return best_tag;
  }

  double weight(const std::string& feat, const std::string& tag) const {
    auto it = weights.find(feat);
    if (it == weights.end()) return 0.0;
    auto jt = it->second.find(tag);
    return jt == it->second.end() ? 0.0 : jt->second;
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "udkit-tagger\t1\ntags";
    for (const auto& t : tagset) os << '\t' << t;
    os << '\n';
    for (const auto& [f, row] : weights)
      for (const auto& [t, w] : row) os << "w\t" << f << '\t' << t << '\t' << text::format_double(w) << '\n';
    return os.str();
  }

  static TaggerModel deserialize(std::string_view input) {
    TaggerModel m;
    auto ls = text::lines(input);
    if (ls.size() < 2 || ls[0] != "udkit-tagger\t1") throw ParseError(1, "not a udkit tagger model (version 1)");
    auto head = text::split(ls[1], '\t');
    if (head.empty() || head[0] != "tags") throw ParseError(2, "expected the tag list");
    for (std::size_t k = 1; k < head.size(); ++k) m.tagset.emplace_back(head[k]);
    if (m.tagset.empty()) throw ParseError(2, "empty tag list");
    for (std::size_t i = 2; i < ls.size(); ++i) {
      auto c = text::split(ls[i], '\t');
      if (c.size() != 4 || c[0] != "w") throw ParseError(i + 1, "expected w<TAB>feature<TAB>tag<TAB>weight");
      auto v = text::parse_double(c[3]);
      if (!v || !std::isfinite(*v)) throw ParseError(i + 1, "bad weight");
      m.weights[std::string(c[1])][std::string(c[2])] = *v;
    }
    return m;
  }

  friend bool operator==(const TaggerModel&, const TaggerModel&) = default;
};

inline TaggerModel train_tagger(const Treebank& tb, const TaggerOptions& opts = {}) {
  std::set<std::string> tags;
  for (const auto& s : tb.sentences)
    for (const auto& t : s.tokens)
      if (t.upos) tags.insert(*t.upos);
  if (tb.sentences.empty() || tags.empty()) throw DataError("cannot train a tagger on an empty treebank");
  if (opts.epochs < 1) throw DataError("epochs must be at least 1");

  TaggerModel m;
  m.tagset.assign(tags.begin(), tags.end());
  AveragedWeights w;
  auto key = [](const std::string& f, const std::string& t) { return f + '\t' + t; };
  auto lookup = [&](const std::string& f, const std::string& t) { return w.get(key(f, t)); };

  std::vector<std::size_t> order(tb.sentences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(opts.seed);
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(order);
    for (auto si : order) {
      const auto& s = tb.sentences[si];
      auto forms = detail::lower_forms(s);
      std::string prev = "<s>";
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        auto feats = detail::features(forms, i, prev);
        auto guess = TaggerModel::best(m.tagset, feats, lookup);
        const auto& gold = s.tokens[i].upos;
        if (gold) {
          if (guess != *gold)
            for (const auto& f : feats) {
              w.update(key(f, *gold), 1.0);
              w.update(key(f, guess), -1.0);
            }
          w.tick();
        }
        prev = guess;
      }
    }
  }
  for (const auto& [k, v] : w.averaged()) {
    auto tab = k.rfind('\t');
    m.weights[k.substr(0, tab)][k.substr(tab + 1)] = v;
  }
  return m;
}

inline AnnotatedSentence tag(const AnnotatedSentence& s, const TaggerModel& m) {
  AnnotatedSentence out = s;
  auto forms = detail::lower_forms(s);
  std::string prev = "<s>";
  auto lookup = [&](const std::string& f, const std::string& t) { return m.weight(f, t); };
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    auto guess = TaggerModel::best(m.tagset, detail::features(forms, i, prev), lookup);
    out.tokens[i].upos = guess;
    prev = guess;
  }
  return out;
}

inline Treebank tag_treebank(const Treebank& tb, const TaggerModel& m) {
  Treebank out;
  out.source_name = tb.source_name;
  for (const auto& s : tb.sentences) out.sentences.push_back(tag(s, m));
  return out;
}

}  // namespace udkit::tagger
