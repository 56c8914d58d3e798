#pragma once

// Rule-based morphology. A line-oriented rule file is compiled into a
// transducer mapping lemma + rule tags (upper side) to surface forms.
//
//   VERSION v1
//   LEXICON basa sulat ...
//   RULE um INFIX um AFTER_ONSET EMIT Voice=Act POS VERB
//   RULE an SUFFIX an AFTER_CONSONANT
//   RULE redup REDUP CV
//   COMPOSE redup um EMIT Aspect=Imp      (redup applies first, then um)

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "udkit/conllu.hpp"
#include "udkit/error.hpp"
#include "udkit/fst.hpp"
#include "udkit/text.hpp"

namespace udkit::morph {

enum class Pattern { kPrefix, kSuffix, kInfix, kRedup };
enum class Context { kAny, kAfterVowel, kAfterConsonant };

inline std::string_view pattern_name(Pattern p) {
  switch (p) {
    case Pattern::kPrefix: return "PREFIX";
    case Pattern::kSuffix: return "SUFFIX";
    case Pattern::kInfix: return "INFIX";
    case Pattern::kRedup: return "REDUP";
  }
  return "?";
}

inline std::string_view context_name(Context c) {
  switch (c) {
    case Context::kAny: return "ANY";
    case Context::kAfterVowel: return "AFTER_VOWEL";
    case Context::kAfterConsonant: return "AFTER_CONSONANT";
  }
  return "?";
}

struct MorphRule {
  std::string name;
  Pattern pattern = Pattern::kPrefix;
  std::string affix;  // "CV" for reduplication
  Context context = Context::kAny;
  Features emit;
  std::optional<std::string> applies_to;
  friend bool operator==(const MorphRule&, const MorphRule&) = default;
};

struct Composition {
  std::string first;
  std::string second;
  Features emit;
  friend bool operator==(const Composition&, const Composition&) = default;
};

struct RuleSet {
  std::string version_tag;
  std::vector<MorphRule> rules;
  std::vector<Composition> compositions;
  std::optional<std::vector<std::string>> lexicon;

  int index_of(std::string_view name) const {
    for (std::size_t i = 0; i < rules.size(); ++i)
      if (rules[i].name == name) return static_cast<int>(i);
    return -1;
  }
  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

struct Analysis {
  std::string lemma;
  Features feats;
  std::vector<std::string> rule_trace;
  friend bool operator==(const Analysis&, const Analysis&) = default;
};

namespace detail {

inline bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

inline bool is_vowel(char32_t c) {
  static const std::u32string vowels = U"aeiouáéíóúàèìòùâêîôû";
  return vowels.find(c) != std::u32string::npos;
}

inline bool is_consonant(char32_t c) { return text::is_alpha(c) && !is_vowel(c); }

inline std::string tag_symbol(const std::string& rule) { return "[" + rule + "]"; }

}  // namespace detail

// Parses the rule language. Throws ParseError with the offending line.
inline RuleSet parse_rules(std::string_view input) {
  RuleSet rs;
  auto ls = text::lines(input);
  std::set<std::string> names;
  for (std::size_t ln = 0; ln < ls.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    std::string_view line = ls[ln];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto w = text::split_ws(line);
    if (w.empty()) continue;

    // Trailing EMIT k=v ... and POS X clauses, shared by RULE and COMPOSE.
    auto tail = [&](std::size_t from, Features& emit, std::optional<std::string>* pos) {
      for (std::size_t i = from; i < w.size();) {
        if (w[i] == "EMIT") {
          ++i;
          if (i >= w.size() || w[i].find('=') == std::string_view::npos)
            throw ParseError(line_no, "EMIT needs at least one Key=Value");
          for (; i < w.size() && w[i].find('=') != std::string_view::npos; ++i) {
            Features f;
            try {
              f = Features::parse(w[i]);
            } catch (const DataError& e) {
              throw ParseError(line_no, e.what());
            }
            for (const auto& [k, v] : f.items()) emit.set(k, v);
          }
        } else if (w[i] == "POS" && pos) {
          if (i + 1 >= w.size() || !is_upos(w[i + 1])) throw ParseError(line_no, "POS needs a UPOS tag");
          *pos = std::string(w[i + 1]);
          i += 2;
        } else {
          throw ParseError(line_no, "syntax error near '" + std::string(w[i]) + "'");
        }
      }
    };

    if (w[0] == "VERSION") {
      if (w.size() != 2) throw ParseError(line_no, "VERSION takes one tag");
      rs.version_tag = std::string(w[1]);
    } else if (w[0] == "LEXICON") {
      if (!rs.lexicon) rs.lexicon.emplace();
      for (std::size_t i = 1; i < w.size(); ++i) rs.lexicon->push_back(text::lower(w[i]));
    } else if (w[0] == "RULE") {
      if (w.size() < 4) throw ParseError(line_no, "RULE needs a name, a pattern and an argument");
      MorphRule r;
      r.name = std::string(w[1]);
      if (!detail::valid_name(r.name)) throw ParseError(line_no, "bad rule name '" + r.name + "'");
      if (!names.insert(r.name).second) throw ParseError(line_no, "duplicate rule name '" + r.name + "'");
      if (w[2] == "PREFIX")
        r.pattern = Pattern::kPrefix;
      else if (w[2] == "SUFFIX")
        r.pattern = Pattern::kSuffix;
      else if (w[2] == "INFIX")
        r.pattern = Pattern::kInfix;
      else if (w[2] == "REDUP")
        r.pattern = Pattern::kRedup;
      else
        throw ParseError(line_no, "unknown pattern '" + std::string(w[2]) + "'");
      r.affix = text::lower(w[3]);
      if (r.pattern == Pattern::kRedup && w[3] != "CV") throw ParseError(line_no, "only REDUP CV is supported");
      std::size_t i = 4;
      if (i < w.size()) {
        if (w[i] == "AFTER_ONSET") {
          if (r.pattern != Pattern::kInfix) throw ParseError(line_no, "AFTER_ONSET applies to INFIX only");
          ++i;
        } else if (w[i] == "AFTER_VOWEL" || w[i] == "AFTER_CONSONANT") {
          if (r.pattern != Pattern::kSuffix) throw ParseError(line_no, std::string(w[i]) + " applies to SUFFIX only");
          r.context = w[i] == "AFTER_VOWEL" ? Context::kAfterVowel : Context::kAfterConsonant;
          ++i;
        }
      }
      tail(i, r.emit, &r.applies_to);
      rs.rules.push_back(std::move(r));
    } else if (w[0] == "COMPOSE") {
      if (w.size() < 3) throw ParseError(line_no, "COMPOSE needs two rule names");
      Composition c{std::string(w[1]), std::string(w[2]), {}};
      if (rs.index_of(c.first) < 0) throw ParseError(line_no, "unknown rule '" + c.first + "'");
      if (rs.index_of(c.second) < 0) throw ParseError(line_no, "unknown rule '" + c.second + "'");
      tail(3, c.emit, nullptr);
      rs.compositions.push_back(std::move(c));
    } else {
      throw ParseError(line_no, "syntax error: unknown directive '" + std::string(w[0]) + "'");
    }
  }
  return rs;
}

// Every licensed rule sequence in application order: each rule alone, then
// chains following COMPOSE edges. The empty sequence comes first. Throws on
// a COMPOSE cycle.
inline std::vector<std::vector<int>> licensed_sequences(const RuleSet& rs) {
  const int n = static_cast<int>(rs.rules.size());
  std::vector<std::vector<int>> next(n);
  for (const auto& c : rs.compositions) next[rs.index_of(c.first)].push_back(rs.index_of(c.second));

  std::vector<int> color(n, 0);
  std::vector<int> path;
  std::function<void(int)> visit = [&](int v) {
    color[v] = 1;
    path.push_back(v);
    for (int u : next[v]) {
      if (color[u] == 1) {
        std::string msg = "composition cycle:";
        auto it = std::find(path.begin(), path.end(), u);
        for (; it != path.end(); ++it) msg += " " + rs.rules[*it].name + " ->";
        msg += " " + rs.rules[u].name;
        throw DataError(msg);
      }
      if (color[u] == 0) visit(u);
    }
    path.pop_back();
    color[v] = 2;
  };
  for (int v = 0; v < n; ++v)
    if (color[v] == 0) visit(v);

  std::vector<std::vector<int>> out{{}};
  std::vector<int> seq;
  std::function<void(int)> extend = [&](int v) {
    seq.push_back(v);
    out.push_back(seq);
    for (int u : next[v]) extend(u);
    seq.pop_back();
  };
  for (int v = 0; v < n; ++v) extend(v);
  return out;
}

class Morphology {
 public:
  const RuleSet& rules() const { return rules_; }
  const fst::SymbolTable& symbols() const { return symbols_; }
  const fst::Transducer& generator() const { return generator_; }
  const fst::Transducer& analyzer() const { return analyzer_; }

  // Analyses whose generation reproduces `word` (lowercased), with at least
  // one rule applied. Sorted by rule-file order of the trace, then lemma.
  std::vector<Analysis> analyze(std::string_view word) const {
    auto input = to_symbols(text::lower(word));
    if (!input) return {};
    struct Keyed {
      std::vector<int> order;
      Analysis a;
    };
    std::vector<Keyed> found;
    for (const auto& path : analyzer_.apply(*input)) {
      Keyed k;
      for (auto sym : path) {
        auto it = tag_rule_.find(sym);
        if (it == tag_rule_.end()) {
          k.a.lemma += symbols_.name(sym);
        } else {
          k.order.push_back(it->second);
          k.a.rule_trace.push_back(rules_.rules[it->second].name);
        }
      }
      if (k.order.empty()) continue;
      k.a.feats = features_for(k.order);
      found.push_back(std::move(k));
    }
    std::sort(found.begin(), found.end(), [](const Keyed& x, const Keyed& y) {
      if (x.order != y.order) return x.order < y.order;
      return x.a.lemma < y.a.lemma;
    });
    std::vector<Analysis> out;
    for (auto& k : found) out.push_back(std::move(k.a));
    return out;
  }

  // Surface forms for `lemma` with `trace` applied in order.
  std::vector<std::string> generate(std::string_view lemma, const std::vector<std::string>& trace) const {
    auto input = to_symbols(text::lower(lemma));
    if (!input) return {};
    for (const auto& r : trace) {
      auto s = symbols_.find(detail::tag_symbol(r));
      if (s < 0) return {};
      input->push_back(s);
    }
    std::vector<std::string> out;
    for (const auto& path : generator_.apply(*input)) {
      std::string w;
      for (auto sym : path) w += symbols_.name(sym);
      out.push_back(std::move(w));
    }
    return out;
  }

  // True if every gated rule in the trace accepts `upos`.
  bool passes_gate(const Analysis& a, const std::optional<std::string>& upos) const {
    for (const auto& r : a.rule_trace) {
      int i = rules_.index_of(r);
      if (i >= 0 && rules_.rules[i].applies_to && rules_.rules[i].applies_to != upos) return false;
    }
    return true;
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "udkit-fst\t1\n";
    os << "version\t" << (rules_.version_tag.empty() ? "_" : rules_.version_tag) << '\n';
    for (const auto& r : rules_.rules)
      os << "rule\t" << r.name << '\t' << pattern_name(r.pattern) << '\t' << r.affix << '\t'
         << context_name(r.context) << '\t' << r.applies_to.value_or("_") << '\t' << r.emit.str() << '\n';
    for (const auto& c : rules_.compositions)
      os << "compose\t" << c.first << '\t' << c.second << '\t' << c.emit.str() << '\n';
    if (rules_.lexicon) {
      os << "lexicon";
      for (const auto& w : *rules_.lexicon) os << '\t' << w;
      os << '\n';
    }
    for (std::size_t s = 1; s < symbols_.size(); ++s) os << "symbol\t" << s << '\t' << symbols_.name(static_cast<int>(s)) << '\n';
    os << "start\t" << generator_.start() << '\n';
    for (int s = 0; s < generator_.num_states(); ++s) os << "state\t" << s << '\t' << (generator_.is_final(s) ? 1 : 0) << '\n';
    for (int s = 0; s < generator_.num_states(); ++s)
      for (const auto& a : generator_.arcs(s)) os << "arc\t" << s << '\t' << a.in << '\t' << a.out << '\t' << a.target << '\n';
    return os.str();
  }

  static Morphology deserialize(std::string_view input);

  friend Morphology compile_rules(const RuleSet& rs);

  friend bool operator==(const Morphology& a, const Morphology& b) {
    return a.rules_ == b.rules_ && a.symbols_ == b.symbols_ && a.generator_ == b.generator_;
  }

 private:
  std::optional<std::vector<fst::Symbol>> to_symbols(std::string_view word) const {
    std::vector<fst::Symbol> out;
    for (char32_t c : text::decode(word)) {
      std::string ch;
      text::append_utf8(ch, c);
      auto s = symbols_.find(ch);
      if (s <= 0 || tag_rule_.count(s)) return std::nullopt;
      out.push_back(s);
    }
    return out;
  }

  Features features_for(const std::vector<int>& order) const {
    Features f;
    for (int r : order)
      for (const auto& [k, v] : rules_.rules[r].emit.items()) f.set(k, v);
    for (std::size_t i = 1; i < order.size(); ++i)
      for (const auto& c : rules_.compositions)
        if (c.first == rules_.rules[order[i - 1]].name && c.second == rules_.rules[order[i]].name)
          for (const auto& [k, v] : c.emit.items()) f.set(k, v);
    return f;
  }

  void index_tags() {
    tag_rule_.clear();
    for (std::size_t r = 0; r < rules_.rules.size(); ++r) {
      auto s = symbols_.find(detail::tag_symbol(rules_.rules[r].name));
      if (s > 0) tag_rule_[s] = static_cast<int>(r);
    }
    analyzer_ = generator_.inverted();
  }

  RuleSet rules_;
  fst::SymbolTable symbols_;
  fst::Transducer generator_;
  fst::Transducer analyzer_;
  std::map<fst::Symbol, int> tag_rule_;
};

namespace detail {

struct Alphabet {
  std::vector<fst::Symbol> all, vowels, consonants;
  std::map<fst::Symbol, char32_t> code;
};

inline Alphabet build_alphabet(const RuleSet& rs, fst::SymbolTable& symbols) {
  std::set<char32_t> chars;
  for (char32_t c = 'a'; c <= 'z'; ++c) chars.insert(c);
  for (char32_t c : std::u32string(U"ñáéíóúàèìòùâêîôû-'")) chars.insert(c);
  for (const auto& r : rs.rules)
    if (r.pattern != Pattern::kRedup)
      for (char32_t c : text::decode(r.affix)) chars.insert(c);
  if (rs.lexicon)
    for (const auto& w : *rs.lexicon)
      for (char32_t c : text::decode(w)) chars.insert(c);
  Alphabet a;
  for (char32_t c : chars) {
    std::string s;
    text::append_utf8(s, c);
    auto sym = symbols.intern(s);
    a.all.push_back(sym);
    a.code[sym] = c;
    if (is_vowel(c)) a.vowels.push_back(sym);
    if (is_consonant(c)) a.consonants.push_back(sym);
  }
  return a;
}

inline std::vector<fst::Symbol> symbols_of(std::string_view s, fst::SymbolTable& symbols) {
  std::vector<fst::Symbol> out;
  for (char32_t c : text::decode(s)) {
    std::string ch;
    text::append_utf8(ch, c);
    out.push_back(symbols.intern(ch));
  }
  return out;
}

inline void identity_loop(fst::Transducer& t, int s, const std::vector<fst::Symbol>& set) {
  for (auto x : set) t.add_arc(s, x, x, s);
}

inline void identity_step(fst::Transducer& t, int from, const std::vector<fst::Symbol>& set, int to) {
  for (auto x : set) t.add_arc(from, x, x, to);
}

// Emits `syms` as a chain of epsilon-input arcs from `from`; returns the end state.
inline int insert_chain(fst::Transducer& t, int from, const std::vector<fst::Symbol>& syms) {
  int cur = from;
  for (auto x : syms) {
    int nxt = t.add_state();
    t.add_arc(cur, fst::kEpsilon, x, nxt);
    cur = nxt;
  }
  return cur;
}

// Identity acceptor for stems: lexicon words, or any string of length >= 2.
inline fst::Transducer stem_acceptor(const RuleSet& rs, const Alphabet& a, fst::SymbolTable& symbols) {
  fst::Transducer t;
  int start = t.add_state();
  t.set_start(start);
  if (!rs.lexicon) {
    int one = t.add_state(), two = t.add_state();
    identity_step(t, start, a.all, one);
    identity_step(t, one, a.all, two);
    identity_loop(t, two, a.all);
    t.set_final(two);
    return t;
  }
  std::map<std::pair<int, fst::Symbol>, int> trie;
  for (const auto& w : *rs.lexicon) {
    int cur = start;
    for (auto x : symbols_of(w, symbols)) {
      auto [it, ins] = trie.emplace(std::make_pair(cur, x), 0);
      if (ins) {
        it->second = t.add_state();
        t.add_arc(cur, x, x, it->second);
      }
      cur = it->second;
    }
    if (cur != start) t.set_final(cur);
  }
  return t;
}

inline fst::Transducer rule_machine(const MorphRule& r, const Alphabet& a, fst::SymbolTable& symbols) {
  fst::Transducer t;
  int start = t.add_state();
  t.set_start(start);
  switch (r.pattern) {
    case Pattern::kPrefix: {
      int body = insert_chain(t, start, symbols_of(r.affix, symbols));
      int rest = t.add_state();
      identity_step(t, body, a.all, rest);
      identity_loop(t, rest, a.all);
      t.set_final(rest);
      break;
    }
    case Pattern::kSuffix: {
      int body = t.add_state();
      identity_step(t, start, a.all, body);
      identity_loop(t, body, a.all);
      int before = body;
      if (r.context != Context::kAny) {
        // The stem's last symbol must be a vowel (or consonant).
        before = t.add_state();
        const auto& cls = r.context == Context::kAfterVowel ? a.vowels : a.consonants;
        identity_step(t, start, cls, before);
        identity_step(t, body, cls, before);
      }
      t.set_final(insert_chain(t, before, symbols_of(r.affix, symbols)));
      break;
    }
    case Pattern::kInfix: {
      // Onset is the maximal initial consonant cluster; the next symbol must be a vowel.
      identity_loop(t, start, a.consonants);
      int after = insert_chain(t, start, symbols_of(r.affix, symbols));
      int rest = t.add_state();
      identity_step(t, after, a.vowels, rest);
      identity_loop(t, rest, a.all);
      t.set_final(rest);
      break;
    }
    case Pattern::kRedup: {
      // Copies the first consonant (if any) and the first vowel.
      int rest = t.add_state();
      identity_loop(t, rest, a.all);
      t.set_final(rest);
      for (auto v : a.vowels) {
        int q = t.add_state();
        t.add_arc(start, fst::kEpsilon, v, q);
        t.add_arc(q, v, v, rest);
      }
      for (auto c : a.consonants) {
        int pc = t.add_state();
        t.add_arc(start, fst::kEpsilon, c, pc);
        for (auto v : a.vowels) {
          int q = t.add_state(), cluster = t.add_state();
          t.add_arc(pc, fst::kEpsilon, v, q);
          t.add_arc(q, c, c, cluster);
          identity_loop(t, cluster, a.consonants);
          t.add_arc(cluster, v, v, rest);
        }
      }
      break;
    }
  }
  return t;
}

}  // namespace detail

inline Morphology compile_rules(const RuleSet& rs) {
  Morphology m;
  m.rules_ = rs;
  auto sequences = licensed_sequences(rs);
  auto alphabet = detail::build_alphabet(rs, m.symbols_);
  std::vector<fst::Transducer> machines;
  for (const auto& r : rs.rules) machines.push_back(detail::rule_machine(r, alphabet, m.symbols_));
  std::vector<fst::Symbol> tags;
  for (const auto& r : rs.rules) tags.push_back(m.symbols_.intern(detail::tag_symbol(r.name)));
  auto stems = detail::stem_acceptor(rs, alphabet, m.symbols_);

  fst::Transducer& g = m.generator_;
  int start = g.add_state();
  g.set_start(start);
  for (const auto& seq : sequences) {
    fst::Transducer path = stems;
    for (int r : seq) path = path.compose(machines[r]);
    if (!seq.empty()) {
      // Rule tags follow the lemma on the upper side.
      int tail = path.add_state();
      for (int s = 0; s + 1 < path.num_states(); ++s)
        if (path.is_final(s)) {
          path.set_final(s, false);
          path.add_arc(s, fst::kEpsilon, fst::kEpsilon, tail);
        }
      int cur = tail;
      for (int r : seq) {
        int nxt = path.add_state();
        path.add_arc(cur, tags[r], fst::kEpsilon, nxt);
        cur = nxt;
      }
      path.set_final(cur);
      path = path.trimmed();
    }
    int offset = g.absorb(path);
    g.add_arc(start, fst::kEpsilon, fst::kEpsilon, offset + path.start());
  }
  m.index_tags();
  return m;
}

inline Morphology compile_rules(std::string_view ruleset_text) { return compile_rules(parse_rules(ruleset_text)); }

inline Morphology Morphology::deserialize(std::string_view input) {
  Morphology m;
  auto ls = text::lines(input);
  if (ls.empty() || ls[0] != "udkit-fst\t1") throw ParseError(1, "not a udkit transducer (version 1)");
  auto num = [](std::string_view s, std::size_t line) {
    auto v = text::parse_int(s);
    if (!v || *v < 0) throw ParseError(line, "bad number '" + std::string(s) + "'");
    return static_cast<int>(*v);
  };
  int start = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const std::size_t line = i + 1;
    auto c = text::split(ls[i], '\t');
    const auto& kind = c[0];
    if (kind == "version" && c.size() == 2) {
      m.rules_.version_tag = c[1] == "_" ? "" : std::string(c[1]);
    } else if (kind == "rule" && c.size() == 7) {
      MorphRule r;
      r.name = std::string(c[1]);
      if (c[2] == "PREFIX") r.pattern = Pattern::kPrefix;
      else if (c[2] == "SUFFIX") r.pattern = Pattern::kSuffix;
      else if (c[2] == "INFIX") r.pattern = Pattern::kInfix;
      else if (c[2] == "REDUP") r.pattern = Pattern::kRedup;
      else throw ParseError(line, "unknown pattern");
      r.affix = std::string(c[3]);
      if (c[4] == "AFTER_VOWEL") r.context = Context::kAfterVowel;
      else if (c[4] == "AFTER_CONSONANT") r.context = Context::kAfterConsonant;
      if (c[5] != "_") r.applies_to = std::string(c[5]);
      r.emit = Features::parse(c[6]);
      m.rules_.rules.push_back(std::move(r));
    } else if (kind == "compose" && c.size() == 4) {
      m.rules_.compositions.push_back({std::string(c[1]), std::string(c[2]), Features::parse(c[3])});
    } else if (kind == "lexicon") {
      m.rules_.lexicon.emplace();
      for (std::size_t k = 1; k < c.size(); ++k) m.rules_.lexicon->emplace_back(c[k]);
    } else if (kind == "symbol" && c.size() == 3) {
      if (m.symbols_.intern(std::string(c[2])) != num(c[1], line)) throw ParseError(line, "symbols out of order");
    } else if (kind == "start" && c.size() == 2) {
      start = num(c[1], line);
    } else if (kind == "state" && c.size() == 3) {
      if (m.generator_.add_state() != num(c[1], line)) throw ParseError(line, "states out of order");
      m.generator_.set_final(m.generator_.num_states() - 1, c[2] == "1");
    } else if (kind == "arc" && c.size() == 5) {
      int from = num(c[1], line), in = num(c[2], line), out = num(c[3], line), to = num(c[4], line);
      if (from >= m.generator_.num_states() || to >= m.generator_.num_states() ||
          in >= static_cast<int>(m.symbols_.size()) || out >= static_cast<int>(m.symbols_.size()))
        throw ParseError(line, "arc refers to an unknown state or symbol");
      m.generator_.add_arc(from, in, out, to);
    } else {
      throw ParseError(line, "unrecognized transducer line");
    }
  }
  if (m.generator_.num_states() == 0 || start >= m.generator_.num_states()) throw DataError("transducer has no states");
  m.generator_.set_start(start);
  m.index_tags();
  return m;
}

// Empty -> lemma is the lowercased word with no features. Otherwise the
// longest rule trace wins; among equals, the first in rule-file order
// (the order analyze() returns).
inline Analysis disambiguate(const std::vector<Analysis>& cands, std::string_view word) {
  if (cands.empty()) return Analysis{text::lower(word), {}, {}};
  const Analysis* best = &cands[0];
  for (const auto& a : cands)
    if (a.rule_trace.size() > best->rule_trace.size()) best = &a;
  return *best;
}

// Fills lemma and feats of every token. With `gate_by_upos`, analyses using a
// rule restricted to some UPOS are dropped for tokens with another tag.
inline AnnotatedSentence annotate_sentence(const AnnotatedSentence& s, const Morphology& m, bool gate_by_upos) {
  AnnotatedSentence out = s;
  for (auto& t : out.tokens) {
    auto cands = m.analyze(t.form);
    if (gate_by_upos)
      cands.erase(std::remove_if(cands.begin(), cands.end(), [&](const Analysis& a) { return !m.passes_gate(a, t.upos); }),
                  cands.end());
    auto a = disambiguate(cands, t.form);
    t.lemma = a.lemma;
    t.feats = a.feats;
  }
  return out;
}

inline Treebank annotate_treebank(const Treebank& tb, const Morphology& m, bool gate_by_upos) {
  Treebank out;
  out.source_name = tb.source_name;
  for (const auto& s : tb.sentences) out.sentences.push_back(annotate_sentence(s, m, gate_by_upos));
  return out;
}

}  // namespace udkit::morph
