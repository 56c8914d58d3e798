#pragma once

// Unsupervised sentence boundary detection (Punkt) and word tokenization.
// Offsets are byte offsets into the UTF-8 input.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "udkit/conllu.hpp"
#include "udkit/error.hpp"
#include "udkit/text.hpp"

namespace udkit::punkt {

struct Thresholds {
  double abbrev = 0.3;
  double colloc = 7.88;
  double starter = 30;
  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

// Orthographic context flags.
inline constexpr int kBegUc = 1 << 1;
inline constexpr int kMidUc = 1 << 2;
inline constexpr int kUnkUc = 1 << 3;
inline constexpr int kBegLc = 1 << 4;
inline constexpr int kMidLc = 1 << 5;
inline constexpr int kUnkLc = 1 << 6;
inline constexpr int kUc = kBegUc | kMidUc | kUnkUc;
inline constexpr int kLc = kBegLc | kMidLc | kUnkLc;

inline constexpr std::string_view kNumberType = "##number##";

struct BoundaryModel {
  Thresholds thresholds;
  std::set<std::string> abbreviations;
  std::set<std::pair<std::string, std::string>> collocations;
  std::set<std::string> sentence_starters;
  std::map<std::string, int> ortho_context;
  std::map<std::string, std::size_t> type_counts;  // types keep a trailing period
  std::size_t total_tokens = 0;

  int ortho(const std::string& type) const {
    auto it = ortho_context.find(type);
    return it == ortho_context.end() ? 0 : it->second;
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "udkit-punkt\t1\n[params]\n";
    os << "abbrev\t" << text::format_double(thresholds.abbrev) << '\n';
    os << "colloc\t" << text::format_double(thresholds.colloc) << '\n';
    os << "starter\t" << text::format_double(thresholds.starter) << '\n';
    os << "total_tokens\t" << total_tokens << '\n';
    os << "[abbreviations]\n";
    for (const auto& a : abbreviations) os << a << '\n';
    os << "[collocations]\n";
    for (const auto& [a, b] : collocations) os << a << '\t' << b << '\n';
    os << "[sentence_starters]\n";
    for (const auto& s : sentence_starters) os << s << '\n';
    os << "[ortho_context]\n";
    for (const auto& [t, f] : ortho_context) os << t << '\t' << f << '\n';
    os << "[type_counts]\n";
    for (const auto& [t, c] : type_counts) os << t << '\t' << c << '\n';
    return os.str();
  }

  static BoundaryModel deserialize(std::string_view input) {
    BoundaryModel m;
    auto ls = text::lines(input);
    if (ls.empty() || ls[0] != "udkit-punkt\t1") throw ParseError(1, "not a udkit boundary model (version 1)");
    std::string section;
    for (std::size_t i = 1; i < ls.size(); ++i) {
      const std::size_t ln = i + 1;
      const std::string& line = ls[i];
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        section = line.substr(1, line.size() - 2);
        continue;
      }
      auto cols = text::split(line, '\t');
      auto number = [&](std::string_view s) {
        auto v = text::parse_double(s);
        if (!v) throw ParseError(ln, "bad number '" + std::string(s) + "'");
        return *v;
      };
      if (section == "params") {
        if (cols.size() != 2) throw ParseError(ln, "expected key and value");
        double v = number(cols[1]);
        if (cols[0] == "abbrev") m.thresholds.abbrev = v;
        else if (cols[0] == "colloc") m.thresholds.colloc = v;
        else if (cols[0] == "starter") m.thresholds.starter = v;
        else if (cols[0] == "total_tokens") m.total_tokens = static_cast<std::size_t>(v);
        else throw ParseError(ln, "unknown parameter '" + std::string(cols[0]) + "'");
      } else if (section == "abbreviations") {
        m.abbreviations.insert(line);
      } else if (section == "collocations") {
        if (cols.size() != 2) throw ParseError(ln, "expected two types");
        m.collocations.emplace(std::string(cols[0]), std::string(cols[1]));
      } else if (section == "sentence_starters") {
        m.sentence_starters.insert(line);
      } else if (section == "ortho_context") {
        if (cols.size() != 2) throw ParseError(ln, "expected type and flags");
        m.ortho_context[std::string(cols[0])] = static_cast<int>(number(cols[1]));
      } else if (section == "type_counts") {
        if (cols.size() != 2) throw ParseError(ln, "expected type and count");
        m.type_counts[std::string(cols[0])] = static_cast<std::size_t>(number(cols[1]));
      } else {
        throw ParseError(ln, "entry outside a known section");
      }
    }
    return m;
  }

  friend bool operator==(const BoundaryModel&, const BoundaryModel&) = default;
};

namespace detail {

struct Text32 {
  std::vector<char32_t> cps;
  std::vector<std::size_t> offs;  // byte offset of each code point, plus the end

  explicit Text32(std::string_view s) {
    for (std::size_t i = 0; i < s.size();) {
      std::size_t n = 1;
      cps.push_back(text::decode_at(s, i, &n));
      offs.push_back(i);
      i += n;
    }
    offs.push_back(s.size());
  }
  std::size_t size() const { return cps.size(); }
};

inline bool is_word_char(char32_t c) {
  if (c == '_' || text::is_alpha(c) || text::is_digit(c)) return true;
  return c >= 0x180 && !text::is_punct(c) && !text::is_space(c);
}

inline bool is_letter(char32_t c) { return is_word_char(c) && !text::is_digit(c); }

inline bool is_non_word(char32_t c) {
  switch (c) {
    case ')': case '"': case ';': case '}': case ']': case '*': case ':': case '@': case '\'':
    case '(': case '{': case '[': case '?': case '!':
    case 0x2018: case 0x2019: case 0x201C: case 0x201D: case 0xAB: case 0xBB:
      return true;
    default:
      return false;
  }
}

inline bool can_start_word(char32_t c) {
  switch (c) {
    case '(': case '"': case '`': case '{': case '[': case ':': case ';': case '&': case '#':
    case '*': case '@': case ')': case '}': case ']': case '-': case ',':
      return false;
    default:
      return true;
  }
}

// Length of a multi-character punctuation token at p ("--", "...", ". . .", "…"), or 0.
inline std::size_t multichar_at(const std::vector<char32_t>& c, std::size_t p, std::size_t end) {
  if (p >= end) return 0;
  if (c[p] == 0x2026) return 1;
  if (c[p] == '-' || c[p] == '.') {
    std::size_t q = p;
    while (q < end && c[q] == c[p]) ++q;
    if (q - p >= 2) return q - p;
  }
  if (c[p] == '.') {
    std::size_t q = p, pairs = 0;
    while (q + 1 < end && c[q] == '.' && text::is_space(c[q + 1])) {
      q += 2;
      ++pairs;
    }
    if (pairs >= 2 && q < end && c[q] == '.') return q + 1 - p;
  }
  return 0;
}

inline bool word_end_at(const std::vector<char32_t>& c, std::size_t p, std::size_t end) {
  if (p >= end || text::is_space(c[p]) || is_non_word(c[p]) || multichar_at(c, p, end)) return true;
  if (c[p] == ',') {
    std::size_t q = p + 1;
    return q >= end || text::is_space(c[q]) || is_non_word(c[q]) || multichar_at(c, q, end);
  }
  return false;
}

struct PToken {
  std::string tok;
  std::string type;
  std::size_t start = 0;  // byte offsets
  std::size_t end = 0;
  bool period_final = false;
  bool parastart = false;
  bool linestart = false;
  bool sentbreak = false;
  bool abbr = false;
  bool ellipsis = false;

  std::string type_no_period() const {
    if (text::decode(type).size() > 1 && type.back() == '.') return type.substr(0, type.size() - 1);
    return type;
  }
  std::string type_no_sentperiod() const { return sentbreak ? type_no_period() : type; }
  char32_t first() const { return tok.empty() ? 0 : text::decode_at(tok, 0); }
  bool first_upper() const { return text::is_upper(first()); }
  bool first_lower() const { return text::is_lower(first()); }
  bool is_number() const { return type.rfind(kNumberType, 0) == 0; }
  bool is_initial() const {
    auto c = text::decode(tok);
    return c.size() == 2 && is_letter(c[0]) && c[1] == '.';
  }
  bool is_alpha() const {
    auto c = text::decode(tok);
    if (c.empty()) return false;
    for (char32_t x : c)
      if (!is_letter(x)) return false;
    return true;
  }
  bool is_non_punct() const {
    for (char32_t x : text::decode(type))
      if (is_letter(x)) return true;
    return false;
  }
};

// ^-?[\.,]?\d[\d,\.-]*\.?$
inline bool is_numeric(const std::vector<char32_t>& c) {
  std::size_t i = 0;
  if (i < c.size() && c[i] == '-') ++i;
  if (i < c.size() && (c[i] == '.' || c[i] == ',')) ++i;
  if (i >= c.size() || !text::is_digit(c[i])) return false;
  ++i;
  while (i < c.size() && (text::is_digit(c[i]) || c[i] == ',' || c[i] == '.' || c[i] == '-')) ++i;
  return i == c.size();
}

inline std::string type_of(std::string_view tok) {
  auto low = text::lower(tok);
  if (is_numeric(text::decode(low))) return std::string(kNumberType);
  return low;
}

inline bool is_ellipsis_tok(std::string_view tok) {
  if (tok == "…") return true;
  if (tok.size() < 2) return false;
  for (char ch : tok)
    if (ch != '.') return false;
  return true;
}

// Punkt word tokens with paragraph and line-start flags.
inline std::vector<PToken> tokenize(std::string_view s) {
  Text32 t(s);
  std::vector<PToken> out;
  bool parastart = false;
  std::size_t line_begin = 0;
  while (line_begin <= t.size()) {
    std::size_t line_end = line_begin;
    while (line_end < t.size() && t.cps[line_end] != '\n') ++line_end;
    bool first = true;
    std::size_t i = line_begin;
    while (i < line_end) {
      if (text::is_space(t.cps[i])) {
        ++i;
        continue;
      }
      std::size_t j = i + multichar_at(t.cps, i, line_end);
      if (j == i && can_start_word(t.cps[i])) {
        j = i + 1;
        while (j < line_end && !text::is_space(t.cps[j]) && !word_end_at(t.cps, j, line_end)) ++j;
      }
      if (j == i) j = i + 1;
      PToken p;
      p.start = t.offs[i];
      p.end = t.offs[j];
      p.tok = std::string(s.substr(p.start, p.end - p.start));
      p.type = type_of(p.tok);
      p.period_final = p.tok.back() == '.';
      if (first) {
        p.linestart = true;
        p.parastart = parastart;
        parastart = false;
        first = false;
      }
      out.push_back(std::move(p));
      i = j;
    }
    if (first) parastart = true;
    if (line_end >= t.size()) break;
    line_begin = line_end + 1;
  }
  return out;
}

inline bool in_abbrevs(const BoundaryModel& m, const std::string& tok_without_period) {
  auto low = text::lower(tok_without_period);
  if (m.abbreviations.count(low)) return true;
  auto dash = low.rfind('-');
  return dash != std::string::npos && m.abbreviations.count(low.substr(dash + 1));
}

inline void first_pass(std::vector<PToken>& toks, const BoundaryModel& m) {
  for (auto& p : toks) {
    if (p.tok == "." || p.tok == "?" || p.tok == "!") {
      p.sentbreak = true;
    } else if (is_ellipsis_tok(p.tok)) {
      p.ellipsis = true;
    } else if (p.period_final && !(p.tok.size() >= 2 && p.tok.compare(p.tok.size() - 2, 2, "..") == 0)) {
      if (in_abbrevs(m, p.tok.substr(0, p.tok.size() - 1)))
        p.abbr = true;
      else
        p.sentbreak = true;
    }
  }
}

// True, false, or unknown (nullopt): does `p` start a sentence by its casing?
inline std::optional<bool> ortho_heuristic(const PToken& p, const BoundaryModel& m) {
  if (p.tok == ";" || p.tok == ":" || p.tok == "," || p.tok == "." || p.tok == "!" || p.tok == "?") return false;
  int oc = m.ortho(p.type_no_sentperiod());
  if (p.first_upper() && (oc & kLc) && !(oc & kMidUc)) return true;
  if (p.first_lower() && ((oc & kUc) || !(oc & kBegLc))) return false;
  return std::nullopt;
}

inline void second_pass(std::vector<PToken>& toks, const BoundaryModel& m) {
  for (std::size_t k = 0; k + 1 < toks.size(); ++k) {
    auto& a = toks[k];
    const auto& b = toks[k + 1];
    if (a.ellipsis) {
      // Ellipses end a sentence unless a lowercase word follows.
      a.sentbreak = !b.first_lower();
      continue;
    }
    if (!a.period_final) continue;
    auto typ = a.type_no_period();
    auto next_typ = b.type_no_sentperiod();
    bool initial = a.is_initial();
    if (m.collocations.count({typ, next_typ})) {
      a.sentbreak = false;
      a.abbr = true;
      continue;
    }
    if (a.abbr && !initial) {
      auto starter = ortho_heuristic(b, m);
      if (starter == true) {
        a.sentbreak = true;
        continue;
      }
      if (b.first_upper() && m.sentence_starters.count(next_typ)) {
        a.sentbreak = true;
        continue;
      }
    }
    if (initial || typ == kNumberType) {
      auto starter = ortho_heuristic(b, m);
      if (starter == false) {
        a.sentbreak = false;
        a.abbr = true;
        continue;
      }
      if (!starter && initial && b.first_upper() && !(m.ortho(next_typ) & kLc)) {
        a.sentbreak = false;
        a.abbr = true;
      }
    }
  }
}

inline double dunning_log_likelihood(double count_a, double count_b, double count_ab, double n) {
  double p1 = count_b / n;
  double p2 = 0.99;
  double null_hypo = count_ab * std::log(p1 + 1e-8) + (count_a - count_ab) * std::log(1.0 - p1 + 1e-8);
  double alt_hypo = count_ab * std::log(p2) + (count_a - count_ab) * std::log(1.0 - p2);
  return -2.0 * (null_hypo - alt_hypo);
}

inline double col_log_likelihood(double count_a, double count_b, double count_ab, double n) {
  double p = count_b / n;
  double p1 = count_ab / count_a;
  double p2 = n == count_a ? 1.0 : (count_b - count_ab) / (n - count_a);
  bool p_ok = p > 0 && p < 1;
  double s1 = p_ok ? count_ab * std::log(p) + (count_a - count_ab) * std::log(1.0 - p) : 0.0;
  double s2 = p_ok ? (count_b - count_ab) * std::log(p) + (n - count_a - count_b + count_ab) * std::log(1.0 - p) : 0.0;
  double s3 = 0, s4 = 0;
  if (!(count_a == count_ab || p1 <= 0 || p1 >= 1))
    s3 = count_ab * std::log(p1) + (count_a - count_ab) * std::log(1.0 - p1);
  if (!(count_b == count_ab || p2 <= 0 || p2 >= 1))
    s4 = (count_b - count_ab) * std::log(p2) + (n - count_a - count_b + count_ab) * std::log(1.0 - p2);
  return -2.0 * (s1 + s2 - s3 - s4);
}

template <class Map, class Key>
double count_of(const Map& m, const Key& k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : static_cast<double>(it->second);
}

}  // namespace detail

// Abbreviation score for a period-less type under the model's counts.
inline double abbreviation_score(const BoundaryModel& m, const std::string& type, std::size_t period_tokens) {
  const auto cps = text::decode(type);
  double num_periods = 1;
  for (char32_t c : cps) num_periods += c == '.';
  double num_nonperiods = static_cast<double>(cps.size()) - num_periods + 1;
  double with_p = detail::count_of(m.type_counts, type + ".");
  double without_p = detail::count_of(m.type_counts, type);
  double ll = detail::dunning_log_likelihood(with_p + without_p, static_cast<double>(period_tokens), with_p,
                                             static_cast<double>(m.total_tokens));
  return ll * std::exp(-num_nonperiods) * num_periods * std::pow(num_nonperiods, -without_p);
}

inline BoundaryModel train_boundary_model(std::string_view raw_text, const Thresholds& th = {}) {
  using detail::PToken;
  BoundaryModel m;
  m.thresholds = th;
  auto toks = detail::tokenize(raw_text);
  std::size_t period_toks = 0;
  for (const auto& p : toks) {
    ++m.type_counts[p.type];
    period_toks += p.period_final;
  }
  m.total_tokens = toks.size();

  for (const auto& [typ, count] : m.type_counts) {
    PToken probe;
    probe.type = typ;
    if (!probe.is_non_punct() || typ == kNumberType) continue;
    if (typ.back() != '.') continue;
    auto stem = typ.substr(0, typ.size() - 1);
    if (abbreviation_score(m, stem, period_toks) >= th.abbrev) m.abbreviations.insert(stem);
  }

  detail::first_pass(toks, m);

  // Orthographic contexts.
  enum Ctx { kInternal, kInitial, kUnknown } ctx = kInternal;
  for (const auto& p : toks) {
    if (p.parastart && ctx != kUnknown) ctx = kInitial;
    if (p.linestart && ctx == kInternal) ctx = kUnknown;
    int flag = 0;
    if (p.first_upper()) flag = ctx == kInitial ? punkt::kBegUc : ctx == kInternal ? punkt::kMidUc : punkt::kUnkUc;
    else if (p.first_lower()) flag = ctx == kInitial ? punkt::kBegLc : ctx == kInternal ? punkt::kMidLc : punkt::kUnkLc;
    if (flag) m.ortho_context[p.type_no_sentperiod()] |= flag;
    if (p.sentbreak)
      ctx = (p.is_number() || p.is_initial()) ? kUnknown : kInitial;
    else if (p.ellipsis || p.abbr)
      ctx = kUnknown;
    else
      ctx = kInternal;
  }

  std::size_t sentbreaks = 0;
  for (const auto& p : toks) sentbreaks += p.sentbreak;

  std::map<std::string, std::size_t> starter_counts;
  std::map<std::pair<std::string, std::string>, std::size_t> colloc_counts;
  std::set<std::string> rare;
  for (std::size_t k = 0; k + 1 < toks.size(); ++k) {
    const auto& a = toks[k];
    const auto& b = toks[k + 1];
    if (!a.period_final) continue;
    // Rare abbreviations: few occurrences, followed by internal punctuation or
    // by a lowercase word that never starts sentences in lowercase.
    if (!a.abbr && a.sentbreak) {
      auto typ = a.type_no_sentperiod();
      double count = detail::count_of(m.type_counts, typ) +
                     detail::count_of(m.type_counts, typ.empty() ? typ : typ.substr(0, typ.size() - 1));
      if (!m.abbreviations.count(typ) && count < 5) {
        char c0 = b.tok.empty() ? 0 : b.tok[0];
        if (c0 == ',' || c0 == ':' || c0 == ';') {
          rare.insert(a.type_no_period());
        } else if (b.first_lower()) {
          int oc = m.ortho(b.type_no_sentperiod());
          if ((oc & punkt::kBegUc) && !(oc & punkt::kMidUc)) rare.insert(a.type_no_period());
        }
      }
    }
    if (a.sentbreak && !(a.is_number() || a.is_initial()) && b.is_alpha()) ++starter_counts[b.type];
    if (a.sentbreak && (a.is_number() || a.is_initial()) && a.is_non_punct() && b.is_non_punct())
      ++colloc_counts[{a.type_no_period(), b.type_no_sentperiod()}];
  }
  m.abbreviations.insert(rare.begin(), rare.end());

  const double n = static_cast<double>(m.total_tokens);
  for (const auto& [typ, at_break] : starter_counts) {
    double typ_count = detail::count_of(m.type_counts, typ) + detail::count_of(m.type_counts, typ + ".");
    if (typ_count < static_cast<double>(at_break)) continue;
    double ll = detail::col_log_likelihood(static_cast<double>(sentbreaks), typ_count, static_cast<double>(at_break), n);
    if (ll >= th.starter && n / static_cast<double>(sentbreaks) > typ_count / static_cast<double>(at_break))
      m.sentence_starters.insert(typ);
  }
  for (const auto& [pair, col_count] : colloc_counts) {
    const auto& [t1, t2] = pair;
    if (m.sentence_starters.count(t2)) continue;
    double c1 = detail::count_of(m.type_counts, t1) + detail::count_of(m.type_counts, t1 + ".");
    double c2 = detail::count_of(m.type_counts, t2) + detail::count_of(m.type_counts, t2 + ".");
    double cc = static_cast<double>(col_count);
    if (c1 > 1 && c2 > 1 && 1 < cc && cc <= std::min(c1, c2)) {
      double ll = detail::col_log_likelihood(c1, c2, cc, n);
      if (ll >= th.colloc && n / c1 > c2 / cc) m.collocations.insert(pair);
    }
  }
  return m;
}

using SentenceSpan = CharSpan;

// Sentence spans, with closing quotes and brackets that follow a boundary
// moved onto the sentence they close.
inline std::vector<SentenceSpan> segment_sentences(std::string_view s, const BoundaryModel& m) {
  auto toks = detail::tokenize(s);
  if (toks.empty()) return {};
  detail::first_pass(toks, m);
  detail::second_pass(toks, m);

  // A break needs whitespace or a non-word character right after it.
  auto break_allowed = [&](const detail::PToken& p) {
    if (p.end >= s.size()) return false;
    char32_t c = text::decode_at(s, p.end);
    return text::is_space(c) || detail::is_non_word(c);
  };
  std::vector<SentenceSpan> spans;
  std::size_t begin = toks[0].start;
  for (std::size_t k = 0; k + 1 < toks.size(); ++k) {
    if (toks[k].sentbreak && break_allowed(toks[k])) {
      spans.push_back({begin, toks[k].end});
      begin = toks[k + 1].start;
    }
  }
  spans.push_back({begin, toks.back().end});

  auto closing = [](char32_t c) {
    return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}' || c == 0x2018 || c == 0x2019 ||
           c == 0x201C || c == 0x201D || c == 0xAB || c == 0xBB;
  };
  std::vector<SentenceSpan> out;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    SentenceSpan cur = spans[k];
    if (k + 1 < spans.size()) {
      SentenceSpan& nxt = spans[k + 1];
      std::size_t p = nxt.start;
      while (p < nxt.end) {
        std::size_t len = 1;
        char32_t c = text::decode_at(s, p, &len);
        if (!closing(c)) break;
        p += len;
        bool at_end = p >= nxt.end;
        bool space = !at_end && text::is_space(text::decode_at(s, p));
        bool dashes = !at_end && s.substr(p, 2) == "--";
        if (at_end || space || dashes) {
          cur.end = p;
          while (p < nxt.end && text::is_space(text::decode_at(s, p))) ++p;
          nxt.start = p;
          break;
        }
      }
    }
    if (cur.end > cur.start) out.push_back(cur);
  }
  return out;
}

struct WordToken {
  std::string form;
  CharSpan span;  // byte offsets into the tokenized text
  friend bool operator==(const WordToken&, const WordToken&) = default;
};

// Whitespace split, then leading and trailing punctuation detached. Runs of
// periods or hyphens stay together. A final period stays on a known
// abbreviation.
inline std::vector<WordToken> tokenize_words(std::string_view s, const BoundaryModel* model = nullptr,
                                             std::size_t base = 0) {
  detail::Text32 t(s);
  std::vector<WordToken> out;
  auto emit = [&](std::size_t a, std::size_t b) {
    out.push_back({std::string(s.substr(t.offs[a], t.offs[b] - t.offs[a])), {base + t.offs[a], base + t.offs[b]}});
  };
  auto emit_punct = [&](std::size_t a, std::size_t b) {
    while (a < b) {
      std::size_t e = a + 1;
      if (t.cps[a] == '.' || t.cps[a] == '-')
        while (e < b && t.cps[e] == t.cps[a]) ++e;
      emit(a, e);
      a = e;
    }
  };
  std::size_t i = 0;
  while (i < t.size()) {
    if (text::is_space(t.cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < t.size() && !text::is_space(t.cps[j])) ++j;
    std::size_t l = i, r = j;
    while (l < j && text::is_punct(t.cps[l])) ++l;
    while (r > l && text::is_punct(t.cps[r - 1])) --r;
    if (l == r) {
      emit_punct(i, j);
    } else {
      if (model && r < j && t.cps[r] == '.' && (r + 1 == j || t.cps[r + 1] != '.')) {
        std::string core(s.substr(t.offs[l], t.offs[r] - t.offs[l]));
        if (detail::in_abbrevs(*model, core)) ++r;
      }
      emit_punct(i, l);
      emit(l, r);
      emit_punct(r, j);
    }
    i = j;
  }
  return out;
}

// Unannotated sentences with SpaceAfter=No, sent_id and text comments, and
// byte offsets into `s`.
inline Treebank segment_to_treebank(std::string_view s, const BoundaryModel& m, const std::string& id_prefix = "s") {
  Treebank tb;
  std::size_t n = 0;
  for (const auto& span : segment_sentences(s, m)) {
    auto words = tokenize_words(s.substr(span.start, span.end - span.start), &m, span.start);
    if (words.empty()) continue;
    AnnotatedSentence sent;
    std::vector<CharSpan> offsets;
    for (std::size_t k = 0; k < words.size(); ++k) {
      Token tok;
      tok.id = static_cast<int>(k) + 1;
      tok.form = words[k].form;
      if (k + 1 < words.size() && words[k].span.end == words[k + 1].span.start) tok.misc = "SpaceAfter=No";
      sent.tokens.push_back(std::move(tok));
      offsets.push_back(words[k].span);
    }
    std::string flat;
    for (auto w : text::split_ws(s.substr(span.start, span.end - span.start))) {
      if (!flat.empty()) flat += ' ';
      flat += w;
    }
    sent.set_metadata("sent_id", id_prefix + std::to_string(++n));
    sent.set_metadata("text", flat);
    sent.char_offsets = std::move(offsets);
    tb.sentences.push_back(std::move(sent));
  }
  return tb;
}

}  // namespace udkit::punkt
