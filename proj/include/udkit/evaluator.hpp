#pragma once

// CoNLL 2018 style scoring of a system treebank against gold, plus k-fold
// cross-validation.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "udkit/conllu.hpp"
#include "udkit/error.hpp"
#include "udkit/rng.hpp"
#include "udkit/text.hpp"

namespace udkit::eval {

struct Range {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Range&, const Range&) = default;
  friend auto operator<=>(const Range&, const Range&) = default;
};

// A syntactic word located in the whitespace-free character stream.
struct WordRef {
  std::size_t sentence = 0;
  std::size_t token = 0;  // index into sentence.tokens
  Range range;            // range of the surface token it belongs to
  int part = 0;           // position inside a multiword token
  int parts = 1;
};

struct Located {
  std::vector<Range> tokens;     // surface tokens
  std::vector<Range> sentences;
  std::vector<WordRef> words;
  std::string stream;
};

inline Located locate(const Treebank& tb) {
  Located out;
  std::size_t pos = 0;
  for (std::size_t si = 0; si < tb.size(); ++si) {
    const auto& s = tb.sentences[si];
    const std::size_t sent_start = pos;
    std::size_t k = 0;
    while (k < s.tokens.size()) {
      const MultiwordSpan* span = nullptr;
      for (const auto& sp : s.spans)
        if (sp.start == s.tokens[k].id) span = &sp;
      if (span) {
        auto surf = text::strip_whitespace(span->surface);
        Range r{pos, pos + surf.size()};
        out.stream += surf;
        pos = r.end;
        out.tokens.push_back(r);
        const int parts = span->end - span->start + 1;
        for (int p = 0; p < parts && k < s.tokens.size(); ++p, ++k) out.words.push_back({si, k, r, p, parts});
      } else {
        auto surf = text::strip_whitespace(s.tokens[k].form);
        Range r{pos, pos + surf.size()};
        out.stream += surf;
        pos = r.end;
        out.tokens.push_back(r);
        out.words.push_back({si, k, r, 0, 1});
        ++k;
      }
    }
    if (!s.tokens.empty()) out.sentences.push_back({sent_start, pos});
  }
  return out;
}

// Matched word pairs as (gold word index, system word index) into Located::words.
struct Alignment {
  Located gold;
  Located sys;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::optional<std::size_t>> gold_to_sys;
};

inline Alignment align_words(const Treebank& gold, const Treebank& sys) {
  Alignment a;
  a.gold = locate(gold);
  a.sys = locate(sys);
  if (a.gold.stream != a.sys.stream) throw DataError("text mismatch between gold and system");
  a.gold_to_sys.assign(a.gold.words.size(), std::nullopt);
  std::size_t i = 0, j = 0;
  const auto& gw = a.gold.words;
  const auto& sw = a.sys.words;
  while (i < gw.size() && j < sw.size()) {
    const auto& g = gw[i];
    const auto& s = sw[j];
    if (g.range == s.range && g.parts == s.parts && g.part == s.part) {
      a.pairs.emplace_back(i, j);
      a.gold_to_sys[i] = j;
      ++i;
      ++j;
    } else if (g.range < s.range || (g.range == s.range && g.part < s.part)) {
      ++i;
    } else {
      ++j;
    }
  }
  return a;
}

struct Metric {
  std::string name;
  std::size_t correct = 0;
  std::size_t gold = 0;
  std::size_t system = 0;

  double precision() const { return system == 0 ? (gold == 0 ? 100.0 : 0.0) : 100.0 * correct / system; }
  double recall() const { return gold == 0 ? (system == 0 ? 100.0 : 0.0) : 100.0 * correct / gold; }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
  }
};

inline constexpr std::array<std::string_view, 8> kMetricNames = {"Tokens", "Words", "Sentences", "UPOS",
                                                                  "Feats",  "Lemmas", "UAS",      "LAS"};

struct MetricsReport {
  std::array<Metric, 8> metrics;

  const Metric& get(std::string_view name) const {
    for (const auto& m : metrics)
      if (m.name == name) return m;
    throw DataError("unknown metric " + std::string(name));
  }
  const Metric& token() const { return metrics[0]; }
  const Metric& word() const { return metrics[1]; }
  const Metric& sentence() const { return metrics[2]; }
  const Metric& upos() const { return metrics[3]; }
  const Metric& feats() const { return metrics[4]; }
  const Metric& lemma() const { return metrics[5]; }
  const Metric& uas() const { return metrics[6]; }
  const Metric& las() const { return metrics[7]; }

  std::string to_tsv() const {
    std::ostringstream os;
    os << "metric\tprecision\trecall\tf1\n";
    for (const auto& m : metrics)
      os << m.name << '\t' << text::format_fixed(m.precision(), 2) << '\t' << text::format_fixed(m.recall(), 2) << '\t'
         << text::format_fixed(m.f1(), 2) << '\n';
    return os.str();
  }
};

struct ScoreOptions {
  bool no_punct = false;  // drop PUNCT words from UAS/LAS
};

namespace detail {

inline std::size_t count_matches(const std::vector<Range>& a, const std::vector<Range>& b) {
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++n;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return n;
}

inline void set_counts(Metric& m, std::size_t correct, std::size_t gold, std::size_t sys) {
  m.correct = correct;
  m.gold = gold;
  m.system = sys;
}

}  // namespace detail

inline MetricsReport score(const Treebank& gold, const Treebank& sys, const ScoreOptions& opts = {}) {
  auto a = align_words(gold, sys);
  MetricsReport r;
  for (std::size_t k = 0; k < r.metrics.size(); ++k) r.metrics[k].name = std::string(kMetricNames[k]);

  auto tok = [](const Treebank& tb, const WordRef& w) -> const Token& { return tb.sentences[w.sentence].tokens[w.token]; };
  // Word index of a head within the same sentence (-1 for the root).
  auto head_word = [](const Located& loc, const Treebank& tb, std::size_t wi) -> long long {
    const auto& w = loc.words[wi];
    const auto& t = tb.sentences[w.sentence].tokens[w.token];
    if (!t.head || *t.head == 0) return -1;
    long long target = static_cast<long long>(wi) - static_cast<long long>(w.token) + (*t.head - 1);
    return target;
  };

  const auto nw_g = a.gold.words.size(), nw_s = a.sys.words.size();
  detail::set_counts(r.metrics[0], detail::count_matches(a.gold.tokens, a.sys.tokens), a.gold.tokens.size(),
                     a.sys.tokens.size());
  detail::set_counts(r.metrics[1], a.pairs.size(), nw_g, nw_s);
  detail::set_counts(r.metrics[2], detail::count_matches(a.gold.sentences, a.sys.sentences), a.gold.sentences.size(),
                     a.sys.sentences.size());

  std::size_t upos = 0, feats = 0, lemma = 0, uas = 0, las = 0;
  std::size_t att_gold = 0, att_sys = 0;
  auto is_punct = [](const Token& t) { return t.upos && *t.upos == "PUNCT"; };
  std::vector<bool> sys_matched(nw_s, false);
  for (auto [gi, si] : a.pairs) sys_matched[si] = true;
  for (std::size_t gi = 0; gi < nw_g; ++gi)
    if (!opts.no_punct || !is_punct(tok(gold, a.gold.words[gi]))) ++att_gold;
  for (std::size_t si = 0; si < nw_s; ++si) {
    if (!opts.no_punct) {
      ++att_sys;
      continue;
    }
    if (!sys_matched[si] && !is_punct(tok(sys, a.sys.words[si]))) ++att_sys;
  }

  for (auto [gi, si] : a.pairs) {
    const auto& g = tok(gold, a.gold.words[gi]);
    const auto& s = tok(sys, a.sys.words[si]);
    if (g.upos == s.upos) ++upos;
    if (g.feats.str() == s.feats.str()) ++feats;
    if (g.lemma == s.lemma) ++lemma;
    if (opts.no_punct && is_punct(g)) continue;
    if (opts.no_punct) ++att_sys;
    if (!g.head || !s.head) continue;
    long long gh = head_word(a.gold, gold, gi);
    long long sh = head_word(a.sys, sys, si);
    bool head_ok = (gh < 0 && sh < 0) ||
                   (gh >= 0 && sh >= 0 && a.gold_to_sys[static_cast<std::size_t>(gh)] == static_cast<std::size_t>(sh));
    if (!head_ok) continue;
    ++uas;
    if (g.deprel && s.deprel && universal_deprel(*g.deprel) == universal_deprel(*s.deprel)) ++las;
  }
  detail::set_counts(r.metrics[3], upos, nw_g, nw_s);
  detail::set_counts(r.metrics[4], feats, nw_g, nw_s);
  detail::set_counts(r.metrics[5], lemma, nw_g, nw_s);
  detail::set_counts(r.metrics[6], uas, att_gold, att_sys);
  detail::set_counts(r.metrics[7], las, att_gold, att_sys);
  return r;
}

// ---- folds ----------------------------------------------------------------

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // sentence index -> fold id

  std::vector<std::size_t> members(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i] == fold) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(k), 0);
    for (int f : assignments) ++out[static_cast<std::size_t>(f)];
    return out;
  }
};

inline FoldPlan make_folds(const Treebank& tb, int k, std::uint64_t seed) {
  if (k < 2) throw DataError("k must be at least 2");
  if (static_cast<std::size_t>(k) > tb.size())
    throw DataError("k = " + std::to_string(k) + " exceeds the " + std::to_string(tb.size()) + " sentences");
  std::vector<std::size_t> order(tb.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  FoldPlan p;
  p.k = k;
  p.assignments.assign(tb.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) p.assignments[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return p;
}

struct Summary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

// Quantiles by linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.q1 = quantile(v, 0.25);
  s.median = quantile(v, 0.5);
  s.q3 = quantile(v, 0.75);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

struct CvResult {
  FoldPlan plan;
  std::vector<MetricsReport> folds;
  std::array<double, 8> mean_f1{};
  Summary las;

  std::string to_tsv() const {
    std::ostringstream os;
    os << "fold\tmetric\tprecision\trecall\tf1\n";
    for (std::size_t f = 0; f < folds.size(); ++f)
      for (const auto& m : folds[f].metrics)
        os << (f + 1) << '\t' << m.name << '\t' << text::format_fixed(m.precision(), 2) << '\t'
           << text::format_fixed(m.recall(), 2) << '\t' << text::format_fixed(m.f1(), 2) << '\n';
    for (std::size_t k = 0; k < mean_f1.size(); ++k)
      os << "mean\t" << kMetricNames[k] << "\t\t\t" << text::format_fixed(mean_f1[k], 2) << '\n';
    os << "\nstat\tlas_f1\n";
    os << "min\t" << text::format_fixed(las.min, 2) << '\n';
    os << "q1\t" << text::format_fixed(las.q1, 2) << '\n';
    os << "median\t" << text::format_fixed(las.median, 2) << '\n';
    os << "q3\t" << text::format_fixed(las.q3, 2) << '\n';
    os << "max\t" << text::format_fixed(las.max, 2) << '\n';
    os << "mean\t" << text::format_fixed(las.mean, 2) << '\n';
    return os.str();
  }
};

// train(train_set) returns a model; annotate(model, gold_fold) returns the
// system treebank for the held-out fold.
template <class Train, class Annotate>
CvResult cross_validate(const Treebank& tb, int k, std::uint64_t seed, Train&& train, Annotate&& annotate,
                        const ScoreOptions& opts = {}) {
  CvResult r;
  r.plan = make_folds(tb, k, seed);
  std::vector<double> las;
  for (int f = 0; f < k; ++f) {
    Treebank train_set, held;
    train_set.source_name = held.source_name = tb.source_name;
    for (std::size_t i = 0; i < tb.size(); ++i)
      (r.plan.assignments[i] == f ? held : train_set).sentences.push_back(tb.sentences[i]);
    auto model = train(train_set);
    Treebank sys = annotate(model, held);
    r.folds.push_back(score(held, sys, opts));
    las.push_back(r.folds.back().las().f1());
  }
  for (std::size_t m = 0; m < 8; ++m) {
    double sum = 0;
    for (const auto& rep : r.folds) sum += rep.metrics[m].f1();
    r.mean_f1[m] = sum / static_cast<double>(r.folds.size());
  }
  r.las = summarize(las);
  return r;
}

// Copy of a treebank with everything but forms, spans and comments removed.
inline Treebank strip_annotations(const Treebank& tb) {
  Treebank out;
  out.source_name = tb.source_name;
  for (const auto& s : tb.sentences) {
    AnnotatedSentence c;
    c.spans = s.spans;
    c.comments = s.comments;
    for (const auto& t : s.tokens) {
      Token n;
      n.id = t.id;
      n.form = t.form;
      n.misc = t.misc;
      c.tokens.push_back(std::move(n));
    }
    out.sentences.push_back(std::move(c));
  }
  return out;
}

}  // namespace udkit::eval
