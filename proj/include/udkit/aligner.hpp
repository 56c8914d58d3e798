#pragma once

// IBM Model 1 word alignment with a NULL source word, trained by EM, plus
// per-word posterior link extraction.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "udkit/error.hpp"
#include "udkit/text.hpp"

namespace udkit::align {

inline constexpr std::string_view kNullWord = "<NULL>";

struct ParallelPair {
  std::vector<std::string> source_tokens;
  std::vector<std::string> target_tokens;
  std::string source_lang;
  friend bool operator==(const ParallelPair&, const ParallelPair&) = default;
};

// Translation probabilities t(target | source); the source side includes kNullWord.
class LexTable {
 public:
  double prob(std::string_view source, std::string_view target) const {
    auto it = table_.find(std::string(source));
    if (it == table_.end()) return 0.0;
    auto jt = it->second.find(std::string(target));
    return jt == it->second.end() ? 0.0 : jt->second;
  }

  void set(const std::string& source, const std::string& target, double p) { table_[source][target] = p; }

  const std::map<std::string, std::map<std::string, double>>& entries() const { return table_; }

  std::string serialize() const {
    std::ostringstream os;
    os << "udkit-lex\t1\n";
    for (const auto& [s, row] : table_)
      for (const auto& [t, p] : row) os << s << '\t' << t << '\t' << text::format_double(p) << '\n';
    return os.str();
  }

  static LexTable deserialize(std::string_view input) {
    LexTable lt;
    auto ls = text::lines(input);
    if (ls.empty() || ls[0] != "udkit-lex\t1") throw ParseError(1, "not a udkit lexical table (version 1)");
    for (std::size_t i = 1; i < ls.size(); ++i) {
      auto cols = text::split(ls[i], '\t');
      if (cols.size() != 3) throw ParseError(i + 1, "expected source, target, probability");
      auto p = text::parse_double(cols[2]);
      if (!p) throw ParseError(i + 1, "bad probability");
      lt.set(std::string(cols[0]), std::string(cols[1]), *p);
    }
    return lt;
  }

  friend bool operator==(const LexTable&, const LexTable&) = default;

 private:
  std::map<std::string, std::map<std::string, double>> table_;
};

struct TrainResult {
  LexTable table;
  // Corpus log-likelihood of the initial table followed by one entry per iteration.
  std::vector<double> log_likelihood;
};

namespace detail {

struct IdCorpus {
  std::vector<std::string> src_vocab{std::string(kNullWord)};
  std::vector<std::string> tgt_vocab;
  std::vector<std::vector<std::uint32_t>> src;  // each starts with the NULL id 0
  std::vector<std::vector<std::uint32_t>> tgt;
};

inline IdCorpus encode(const std::vector<ParallelPair>& corpus) {
  IdCorpus c;
  std::unordered_map<std::string, std::uint32_t> sv{{std::string(kNullWord), 0}}, tv;
  for (const auto& p : corpus) {
    std::vector<std::uint32_t> s{0}, t;
    for (const auto& w : p.source_tokens) {
      auto [it, ins] = sv.emplace(w, static_cast<std::uint32_t>(c.src_vocab.size()));
      if (ins) c.src_vocab.push_back(w);
      s.push_back(it->second);
    }
    for (const auto& w : p.target_tokens) {
      auto [it, ins] = tv.emplace(w, static_cast<std::uint32_t>(c.tgt_vocab.size()));
      if (ins) c.tgt_vocab.push_back(w);
      t.push_back(it->second);
    }
    c.src.push_back(std::move(s));
    c.tgt.push_back(std::move(t));
  }
  return c;
}

inline std::uint64_t key(std::uint32_t s, std::uint32_t t) { return (static_cast<std::uint64_t>(s) << 32) | t; }

using Table = std::unordered_map<std::uint64_t, double>;

inline double log_likelihood(const IdCorpus& c, const Table& t) {
  double ll = 0;
  for (std::size_t k = 0; k < c.src.size(); ++k) {
    const double norm = static_cast<double>(c.src[k].size());
    for (auto f : c.tgt[k]) {
      double sum = 0;
      for (auto e : c.src[k]) {
        auto it = t.find(key(e, f));
        if (it != t.end()) sum += it->second;
      }
      ll += std::log(sum / norm);
    }
  }
  return ll;
}

}  // namespace detail

// EM training. t starts uniform over the targets co-occurring with each
// source word; each iteration collects expected counts normalized per target
// token and renormalizes per source word.
inline TrainResult train_aligner(const std::vector<ParallelPair>& corpus, int iterations) {
  if (corpus.empty()) throw DataError("cannot train an aligner on an empty corpus");
  if (iterations < 1) throw DataError("iterations must be at least 1");
  for (std::size_t k = 0; k < corpus.size(); ++k)
    if (corpus[k].source_tokens.empty() || corpus[k].target_tokens.empty())
      throw DataError("parallel pair " + std::to_string(k + 1) + " has an empty side");

  auto c = detail::encode(corpus);
  detail::Table t;
  {
    std::vector<std::unordered_set<std::uint32_t>> cooc(c.src_vocab.size());
    for (std::size_t k = 0; k < c.src.size(); ++k)
      for (auto e : c.src[k])
        for (auto f : c.tgt[k]) cooc[e].insert(f);
    for (std::uint32_t e = 0; e < cooc.size(); ++e)
      for (auto f : cooc[e]) t[detail::key(e, f)] = 1.0 / static_cast<double>(cooc[e].size());
  }

  TrainResult result;
  result.log_likelihood.push_back(detail::log_likelihood(c, t));
  for (int it = 0; it < iterations; ++it) {
    detail::Table counts;
    std::vector<double> totals(c.src_vocab.size(), 0.0);
    for (std::size_t k = 0; k < c.src.size(); ++k) {
      for (auto f : c.tgt[k]) {
        double denom = 0;
        for (auto e : c.src[k]) denom += t[detail::key(e, f)];
        for (auto e : c.src[k]) {
          double r = t[detail::key(e, f)] / denom;
          counts[detail::key(e, f)] += r;
          totals[e] += r;
        }
      }
    }
    for (auto& [k, v] : t) {
      auto e = static_cast<std::uint32_t>(k >> 32);
      v = totals[e] > 0 ? counts[k] / totals[e] : 0.0;
    }
    result.log_likelihood.push_back(detail::log_likelihood(c, t));
  }
  for (const auto& [k, v] : t) {
    auto e = static_cast<std::uint32_t>(k >> 32);
    auto f = static_cast<std::uint32_t>(k & 0xFFFFFFFFu);
    result.table.set(c.src_vocab[e], c.tgt_vocab[f], v);
  }
  return result;
}

// Corpus log-likelihood under a table: sum over target tokens of
// log((1 / (l + 1)) * sum_i t(f | e_i)), NULL included.
inline double corpus_log_likelihood(const std::vector<ParallelPair>& corpus, const LexTable& table) {
  double ll = 0;
  for (const auto& p : corpus) {
    const double norm = static_cast<double>(p.source_tokens.size() + 1);
    for (const auto& f : p.target_tokens) {
      double sum = table.prob(kNullWord, f);
      for (const auto& e : p.source_tokens) sum += table.prob(e, f);
      ll += std::log(sum / norm);
    }
  }
  return ll;
}

struct AlignmentLink {
  int src_index = 0;  // 0-based source token
  int tgt_index = 0;  // 0-based target token
  double prob = 0;    // posterior of src_index for tgt_index
  friend bool operator==(const AlignmentLink&, const AlignmentLink&) = default;
};

inline constexpr double kDefaultLinkFloor = 0.1;

// For each target token, the posterior over source positions and NULL; a link
// to the best source position is emitted when it is at least as likely as
// NULL and its posterior reaches `floor`. Ties among source positions go to
// the leftmost.
inline std::vector<AlignmentLink> align(const ParallelPair& pair, const LexTable& table,
                                        double floor = kDefaultLinkFloor) {
  std::vector<AlignmentLink> links;
  for (std::size_t j = 0; j < pair.target_tokens.size(); ++j) {
    const auto& f = pair.target_tokens[j];
    double null_score = table.prob(kNullWord, f);
    double total = null_score;
    int best = -1;
    double best_score = 0;
    for (std::size_t i = 0; i < pair.source_tokens.size(); ++i) {
      double s = table.prob(pair.source_tokens[i], f);
      total += s;
      if (s > best_score) {
        best_score = s;
        best = static_cast<int>(i);
      }
    }
    if (best < 0 || total <= 0 || best_score < null_score) continue;
    double post = best_score / total;
    if (post >= floor) links.push_back({best, static_cast<int>(j), post});
  }
  return links;
}

// Whitespace tokenization of one line of a parallel corpus file.
inline std::vector<std::string> tokenize_line(std::string_view line) {
  std::vector<std::string> out;
  for (auto w : text::split_ws(line)) out.emplace_back(w);
  return out;
}

// Line i of `source_text` is parallel to line i of `target_text`.
inline std::vector<ParallelPair> read_parallel(std::string_view source_text, std::string_view target_text,
                                               const std::string& source_lang = {}) {
  auto s = text::lines(source_text), t = text::lines(target_text);
  if (s.size() != t.size())
    throw DataError("parallel files differ in line count (" + std::to_string(s.size()) + " vs " +
                    std::to_string(t.size()) + ")");
  std::vector<ParallelPair> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back({tokenize_line(s[i]), tokenize_line(t[i]), source_lang});
  return out;
}

}  // namespace udkit::align
