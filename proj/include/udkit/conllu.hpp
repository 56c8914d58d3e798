#pragma once

// Universal Dependencies data model and CoNLL-U reading/writing.
//
// The writer is canonical: parse_conllu followed by write_conllu reproduces any
// input that is already in canonical form (sorted FEATS, "# " comments, one
// blank line after every sentence) byte for byte.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "udkit/error.hpp"
#include "udkit/text.hpp"

namespace udkit {

inline constexpr std::array<std::string_view, 17> kUposTags = {
    "ADJ", "ADP",   "ADV",   "AUX",   "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

inline bool is_upos(std::string_view tag) {
  return std::binary_search(kUposTags.begin(), kUposTags.end(), tag);
}

// Universal part of a dependency relation ("nsubj:pass" -> "nsubj").
inline std::string_view universal_deprel(std::string_view rel) {
  return rel.substr(0, rel.find(':'));
}

using Feature = std::pair<std::string, std::string>;

// FEATS are kept in canonical order: case-insensitive by key.
class Features {
 public:
  Features() = default;

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const std::vector<Feature>& items() const { return items_; }

  // Inserts or replaces the value for `key`.
  void set(const std::string& key, const std::string& value) {
    for (auto& kv : items_) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    items_.emplace_back(key, value);
    sort();
  }

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& kv : items_)
      if (kv.first == key) return kv.second;
    return std::nullopt;
  }

  std::string str() const {
    if (items_.empty()) return "_";
    std::string out;
    for (const auto& [k, v] : items_) {
      if (!out.empty()) out += '|';
      out += k;
      out += '=';
      out += v;
    }
    return out;
  }

  // Parses "A=1|B=2" or "_". Throws DataError on malformed or duplicate keys.
  static Features parse(std::string_view s) {
    Features f;
    if (s == "_" || s.empty()) return f;
    for (auto piece : text::split(s, '|')) {
      auto eq = piece.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == piece.size())
        throw DataError("malformed feature '" + std::string(piece) + "'");
      std::string key(piece.substr(0, eq));
      if (f.get(key)) throw DataError("duplicate feature key '" + key + "'");
      f.items_.emplace_back(key, std::string(piece.substr(eq + 1)));
    }
    f.sort();
    return f;
  }

  friend bool operator==(const Features&, const Features&) = default;

 private:
  void sort() {
    std::stable_sort(items_.begin(), items_.end(), [](const Feature& a, const Feature& b) {
      auto la = text::lower(a.first), lb = text::lower(b.first);
      if (la != lb) return la < lb;
      return a.first < b.first;
    });
  }

  std::vector<Feature> items_;
};

struct Token {
  int id = 0;
  std::string form;
  std::optional<std::string> lemma;
  std::optional<std::string> upos;
  std::optional<std::string> xpos;
  Features feats;
  std::optional<int> head;
  std::optional<std::string> deprel;
  std::optional<std::string> deps;  // carried opaquely
  std::optional<std::string> misc;

  friend bool operator==(const Token&, const Token&) = default;
};

struct MultiwordSpan {
  int start = 0;
  int end = 0;
  std::string surface;
  std::optional<std::string> misc;

  friend bool operator==(const MultiwordSpan&, const MultiwordSpan&) = default;
};

struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct AnnotatedSentence {
  std::vector<Token> tokens;
  std::vector<MultiwordSpan> spans;
  std::vector<std::string> comments;  // without the leading "# "
  // Byte offsets into the source document; only set by the segmenter.
  std::optional<std::vector<CharSpan>> char_offsets;

  std::size_t size() const { return tokens.size(); }
  bool all_heads_set() const {
    return std::all_of(tokens.begin(), tokens.end(), [](const Token& t) { return t.head.has_value(); });
  }

  // Value of a "key = value" comment, if present.
  std::optional<std::string> metadata(std::string_view key) const {
    for (const auto& c : comments) {
      auto eq = c.find('=');
      if (eq == std::string::npos) continue;
      if (text::trim(std::string_view(c).substr(0, eq)) == key)
        return std::string(text::trim(std::string_view(c).substr(eq + 1)));
    }
    return std::nullopt;
  }

  void set_metadata(std::string_view key, std::string_view value) {
    std::string line = std::string(key) + " = " + std::string(value);
    for (auto& c : comments) {
      auto eq = c.find('=');
      if (eq != std::string::npos && text::trim(std::string_view(c).substr(0, eq)) == key) {
        c = line;
        return;
      }
    }
    comments.push_back(line);
  }

  friend bool operator==(const AnnotatedSentence&, const AnnotatedSentence&) = default;
};

struct Treebank {
  std::vector<AnnotatedSentence> sentences;
  std::string source_name;

  std::size_t size() const { return sentences.size(); }
  std::size_t word_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }

  friend bool operator==(const Treebank& a, const Treebank& b) { return a.sentences == b.sentences; }
};

// --- tree validation -----------------------------------------------------

enum class ViolationKind { kMissingHead, kHeadOutOfRange, kSelfLoop, kCycle, kNoRoot, kMultipleRoots };

struct Violation {
  ViolationKind kind;
  std::vector<int> tokens;  // token ids involved
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

inline std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out += ',';
    out += std::to_string(id);
  }
  return out;
}

// Returns the cycles of the head graph, each as ascending token ids.
// Only considers heads that are set and in range.
inline std::vector<std::vector<int>> find_cycles(const std::vector<int>& heads) {
  // heads[i] for token i (1-based); heads[0] unused. -1 means unset/invalid.
  const int n = static_cast<int>(heads.size()) - 1;
  std::vector<int> state(n + 1, 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::vector<int>> cycles;
  for (int start = 1; start <= n; ++start) {
    if (state[start]) continue;
    std::vector<int> path;
    int v = start;
    while (v > 0 && v <= n && state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = heads[v];
    }
    if (v > 0 && v <= n && state[v] == 1) {
      std::vector<int> cyc;
      auto it = std::find(path.begin(), path.end(), v);
      cyc.assign(it, path.end());
      std::sort(cyc.begin(), cyc.end());
      cycles.push_back(cyc);
    }
    for (int p : path) state[p] = 2;
  }
  return cycles;
}

}  // namespace detail

// Empty iff every head is set, in range, not a self-loop, the graph is acyclic
// and exactly one token attaches to the virtual root.
inline std::vector<Violation> validate_tree(const AnnotatedSentence& s) {
  std::vector<Violation> out;
  const int n = static_cast<int>(s.size());
  std::vector<int> heads(n + 1, -1);
  std::vector<int> roots;
  for (int i = 0; i < n; ++i) {
    const auto& t = s.tokens[i];
    int id = i + 1;
    if (!t.head) {
      out.push_back({ViolationKind::kMissingHead, {id}, "missing head at token " + std::to_string(id)});
      continue;
    }
    int h = *t.head;
    if (h < 0 || h > n) {
      out.push_back({ViolationKind::kHeadOutOfRange, {id}, "head out of range at token " + std::to_string(id)});
      continue;
    }
    if (h == id) {
      out.push_back({ViolationKind::kSelfLoop, {id}, "self-loop at token " + std::to_string(id)});
      continue;
    }
    heads[id] = h;
    if (h == 0) roots.push_back(id);
  }
  auto cycles = detail::find_cycles(heads);
  for (auto& c : cycles)
    out.push_back({ViolationKind::kCycle, c, "cycle at tokens " + detail::join_ids(c)});
  if (roots.size() > 1)
    out.push_back({ViolationKind::kMultipleRoots, roots, "multiple roots at tokens " + detail::join_ids(roots)});
  // A cycle already explains a missing root.
  if (roots.empty() && cycles.empty() && n > 0 && out.empty())
    out.push_back({ViolationKind::kNoRoot, {}, "no root"});
  return out;
}

inline bool is_valid_tree(const AnnotatedSentence& s) { return validate_tree(s).empty(); }

// --- reading -------------------------------------------------------------

namespace detail {

inline std::optional<std::string> opt_field(std::string_view f) {
  if (f == "_") return std::nullopt;
  return std::string(f);
}

inline int parse_id(std::string_view f, std::size_t line) {
  auto v = text::parse_int(f);
  if (!v || *v < 1) throw ParseError(line, "invalid token id '" + std::string(f) + "'");
  return static_cast<int>(*v);
}

struct SentenceBuilder {
  AnnotatedSentence sent;
  std::vector<std::size_t> token_lines;
  std::size_t first_line = 0;
  bool started = false;

  void finish(Treebank& tb) {
    if (!started) return;
    const int n = static_cast<int>(sent.tokens.size());
    if (n == 0 && !sent.spans.empty()) throw ParseError(first_line, "multiword range without words");
    for (const auto& sp : sent.spans)
      if (sp.end > n) throw ParseError(first_line, "multiword range beyond sentence end");
    std::vector<int> heads(n + 1, -1);
    for (int i = 0; i < n; ++i) {
      const auto& t = sent.tokens[i];
      if (!t.head) continue;
      if (*t.head < 0 || *t.head > n) throw ParseError(token_lines[i], "head out of range");
      if (*t.head == i + 1) throw ParseError(token_lines[i], "cycle detected (self-loop)");
      heads[i + 1] = *t.head;
    }
    auto cycles = find_cycles(heads);
    if (!cycles.empty())
      throw ParseError(token_lines[cycles.front().front() - 1],
                       "cycle detected at tokens " + join_ids(cycles.front()));
    tb.sentences.push_back(std::move(sent));
    *this = SentenceBuilder{};
  }
};

}  // namespace detail

// Parses CoNLL-U text. Errors carry the 1-based line number.
inline Treebank parse_conllu(std::string_view input, std::string source_name = {}) {
  Treebank tb;
  tb.source_name = std::move(source_name);
  detail::SentenceBuilder cur;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < input.size()) {
    std::size_t nl = input.find('\n', pos);
    std::string_view line = input.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? input.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      cur.finish(tb);
      continue;
    }
    if (!cur.started) {
      cur.started = true;
      cur.first_line = line_no;
    }
    if (line.front() == '#') {
      std::string_view c = line.substr(1);
      if (!c.empty() && c.front() == ' ') c.remove_prefix(1);
      cur.sent.comments.emplace_back(c);
      continue;
    }
    auto cols = text::split(line, '\t');
    if (cols.size() != 10)
      throw ParseError(line_no, "expected 10 columns, found " + std::to_string(cols.size()));
    std::string_view id = cols[0];
    if (id.find('.') != std::string_view::npos) throw ParseError(line_no, "empty nodes are not supported");
    const int expected = static_cast<int>(cur.sent.tokens.size()) + 1;
    if (auto dash = id.find('-'); dash != std::string_view::npos) {
      int a = detail::parse_id(id.substr(0, dash), line_no);
      int b = detail::parse_id(id.substr(dash + 1), line_no);
      if (b < a) throw ParseError(line_no, "invalid multiword range '" + std::string(id) + "'");
      if (a != expected) throw ParseError(line_no, "non-consecutive id: range starts at " + std::to_string(a) +
                                                       ", expected " + std::to_string(expected));
      if (!cur.sent.spans.empty() && cur.sent.spans.back().end >= a)
        throw ParseError(line_no, "overlapping multiword ranges");
      cur.sent.spans.push_back({a, b, std::string(cols[1]), detail::opt_field(cols[9])});
      continue;
    }
    Token t;
    t.id = detail::parse_id(id, line_no);
    if (t.id != expected)
      throw ParseError(line_no, "non-consecutive id " + std::to_string(t.id) + ", expected " + std::to_string(expected));
    t.form = std::string(cols[1]);
    t.lemma = detail::opt_field(cols[2]);
    t.upos = detail::opt_field(cols[3]);
    t.xpos = detail::opt_field(cols[4]);
    try {
      t.feats = Features::parse(cols[5]);
    } catch (const DataError& e) {
      throw ParseError(line_no, e.what());
    }
    if (cols[6] != "_") {
      auto h = text::parse_int(cols[6]);
      if (!h) throw ParseError(line_no, "invalid head '" + std::string(cols[6]) + "'");
      t.head = static_cast<int>(*h);
    }
    t.deprel = detail::opt_field(cols[7]);
    t.deps = detail::opt_field(cols[8]);
    t.misc = detail::opt_field(cols[9]);
    cur.sent.tokens.push_back(std::move(t));
    cur.token_lines.push_back(line_no);
  }
  cur.finish(tb);
  return tb;
}

// --- writing -------------------------------------------------------------

inline void write_sentence(std::string& out, const AnnotatedSentence& s) {
  auto col = [&out](const std::optional<std::string>& v) {
    out += '\t';
    out += v ? *v : std::string("_");
  };
  for (const auto& c : s.comments) {
    out += "# ";
    out += c;
    out += '\n';
  }
  std::size_t span_idx = 0;
  for (const auto& t : s.tokens) {
    while (span_idx < s.spans.size() && s.spans[span_idx].start == t.id) {
      const auto& sp = s.spans[span_idx++];
      out += std::to_string(sp.start) + "-" + std::to_string(sp.end) + "\t" + sp.surface;
      out += "\t_\t_\t_\t_\t_\t_\t_";
      col(sp.misc);
      out += '\n';
    }
    out += std::to_string(t.id);
    out += '\t';
    out += t.form;
    col(t.lemma);
    col(t.upos);
    col(t.xpos);
    out += '\t';
    out += t.feats.str();
    out += '\t';
    out += t.head ? std::to_string(*t.head) : std::string("_");
    col(t.deprel);
    col(t.deps);
    col(t.misc);
    out += '\n';
  }
  out += '\n';
}

inline std::string write_conllu(const Treebank& tb) {
  std::string out;
  for (const auto& s : tb.sentences) write_sentence(out, s);
  return out;
}

// --- reordering ----------------------------------------------------------

// Builds a sentence from the tokens `old_ids` (1-based) in the given order,
// rewriting heads to the new positions. Every kept token's head must be kept
// or be the root. Multiword spans survive only if their words stay adjacent
// and in order; character offsets are dropped.
inline AnnotatedSentence reorder_tokens(const AnnotatedSentence& s, const std::vector<int>& old_ids) {
  const int n = static_cast<int>(s.size());
  std::vector<int> new_pos(n + 1, 0);
  for (std::size_t k = 0; k < old_ids.size(); ++k) {
    int id = old_ids[k];
    if (id < 1 || id > n) throw DataError("token id " + std::to_string(id) + " out of range");
    if (new_pos[id]) throw DataError("token id " + std::to_string(id) + " listed twice");
    new_pos[id] = static_cast<int>(k) + 1;
  }
  AnnotatedSentence out;
  out.comments = s.comments;
  for (std::size_t k = 0; k < old_ids.size(); ++k) {
    Token t = s.tokens[old_ids[k] - 1];
    t.id = static_cast<int>(k) + 1;
    if (t.head && *t.head != 0) {
      int h = *t.head;
      if (h < 1 || h > n || new_pos[h] == 0)
        throw DataError("token " + std::to_string(old_ids[k]) + " keeps a head outside the selection");
      t.head = new_pos[h];
    }
    out.tokens.push_back(std::move(t));
  }
  for (const auto& sp : s.spans) {
    int first = new_pos[sp.start];
    bool ok = first != 0;
    for (int id = sp.start; ok && id <= sp.end; ++id) ok = new_pos[id] == first + (id - sp.start);
    if (ok) out.spans.push_back({first, first + (sp.end - sp.start), sp.surface, sp.misc});
  }
  std::sort(out.spans.begin(), out.spans.end(),
            [](const MultiwordSpan& a, const MultiwordSpan& b) { return a.start < b.start; });
  return out;
}

// Reorders the sentence; `permutation` lists old ids in their new order and
// must be a bijection over 1..n.
inline AnnotatedSentence renumber(const AnnotatedSentence& s, const std::vector<int>& permutation) {
  if (permutation.size() != s.size()) throw DataError("permutation is not a bijection over the sentence");
  std::vector<bool> seen(s.size() + 1, false);
  for (int id : permutation) {
    if (id < 1 || id > static_cast<int>(s.size()) || seen[id])
      throw DataError("permutation is not a bijection over the sentence");
    seen[id] = true;
  }
  return reorder_tokens(s, permutation);
}

// --- helpers used across modules ----------------------------------------

// (head form, dependent form, deprel) triple; the head form of a root is "ROOT".
using DependencyTriple = std::tuple<std::string, std::string, std::string>;

inline std::multiset<DependencyTriple> dependency_triples(const AnnotatedSentence& s) {
  std::multiset<DependencyTriple> out;
  for (const auto& t : s.tokens) {
    std::string head_form = "ROOT";
    if (t.head && *t.head > 0 && *t.head <= static_cast<int>(s.size())) head_form = s.tokens[*t.head - 1].form;
    out.emplace(head_form, t.form, t.deprel.value_or("_"));
  }
  return out;
}

inline bool space_after(const std::optional<std::string>& misc) {
  if (!misc) return true;
  for (auto piece : text::split(*misc, '|'))
    if (piece == "SpaceAfter=No") return false;
  return true;
}

// Surface text of a sentence: the "text" comment if present, otherwise forms
// (and multiword surfaces) joined according to SpaceAfter=No.
inline std::string sentence_text(const AnnotatedSentence& s) {
  if (auto t = s.metadata("text")) return *t;
  std::string out;
  std::size_t span_idx = 0;
  for (std::size_t i = 0; i < s.tokens.size();) {
    const Token& t = s.tokens[i];
    std::string piece;
    bool space = true;
    if (span_idx < s.spans.size() && s.spans[span_idx].start == t.id) {
      const auto& sp = s.spans[span_idx++];
      piece = sp.surface;
      space = space_after(sp.misc);
      i = static_cast<std::size_t>(sp.end);
    } else {
      piece = t.form;
      space = space_after(t.misc);
      ++i;
    }
    out += piece;
    if (space && i < s.tokens.size()) out += ' ';
  }
  return out;
}

// Copy of the sentence keeping only forms (and structure-free metadata).
inline AnnotatedSentence strip_annotations(const AnnotatedSentence& s) {
  AnnotatedSentence out = s;
  for (auto& t : out.tokens) {
    t.lemma.reset();
    t.upos.reset();
    t.xpos.reset();
    t.feats = Features{};
    t.head.reset();
    t.deprel.reset();
    t.deps.reset();
  }
  return out;
}

}  // namespace udkit
