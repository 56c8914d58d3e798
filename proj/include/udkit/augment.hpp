#pragma once

// Sentence morphing: rotate the predicate, subject and object spans of a
// clause among the VSO, SVO and VOS orders, or crop one argument away.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "udkit/conllu.hpp"
#include "udkit/error.hpp"

namespace udkit::augment {

enum class WordOrder { kVSO, kSVO, kVOS };

inline constexpr std::array<WordOrder, 3> kOrders = {WordOrder::kVSO, WordOrder::kSVO, WordOrder::kVOS};

inline std::string_view order_name(WordOrder o) {
  switch (o) {
    case WordOrder::kVSO: return "VSO";
    case WordOrder::kSVO: return "SVO";
    case WordOrder::kVOS: return "VOS";
  }
  return "?";
}

// Inclusive 1-based token range.
struct Range {
  int first = 0;
  int last = -1;
  int length() const { return last - first + 1; }
  friend bool operator==(const Range&, const Range&) = default;
};

struct ClauseSpans {
  Range pred;
  Range subj;
  Range obj;
  Range leading;   // punctuation before the clause (may be empty)
  Range trailing;  // punctuation after the clause (may be empty)
  WordOrder order = WordOrder::kVSO;
  friend bool operator==(const ClauseSpans&, const ClauseSpans&) = default;
};

struct Ineligible {
  std::string reason;
};

using Eligibility = std::variant<ClauseSpans, Ineligible>;

namespace detail {

inline bool is_punct_token(const Token& t) {
  return t.upos == "PUNCT" || (t.deprel && universal_deprel(*t.deprel) == "punct");
}

// Token ids of the subtree rooted at `id`, ascending.
inline std::vector<int> subtree(const AnnotatedSentence& s, int id) {
  const int n = static_cast<int>(s.size());
  std::vector<std::vector<int>> kids(n + 1);
  for (const auto& t : s.tokens)
    if (t.head && *t.head > 0) kids[*t.head].push_back(t.id);
  std::vector<int> out, stack{id};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    out.push_back(v);
    for (int c : kids[v]) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::optional<Range> contiguous(const std::vector<int>& ids) {
  if (ids.empty()) return std::nullopt;
  for (std::size_t k = 1; k < ids.size(); ++k)
    if (ids[k] != ids[k - 1] + 1) return std::nullopt;
  return Range{ids.front(), ids.back()};
}

inline void append_range(std::vector<int>& out, const Range& r) {
  for (int i = r.first; i <= r.last; ++i) out.push_back(i);
}

inline bool is_morph(const AnnotatedSentence& s) { return s.metadata("morph").has_value(); }

}  // namespace detail

// Eligible iff the root has an nsubj and an obj dependent (the first of each
// is used), the subject and object subtrees and the remaining predicate
// material are contiguous, and the linear order is VSO, SVO or VOS.
inline Eligibility find_eligible(const AnnotatedSentence& s) {
  if (!s.all_heads_set() || !is_valid_tree(s)) return Ineligible{"not a valid tree"};
  int root = 0;
  for (const auto& t : s.tokens)
    if (*t.head == 0) root = t.id;
  int subj = 0, obj = 0;
  for (const auto& t : s.tokens) {
    if (*t.head != root || !t.deprel) continue;
    auto rel = universal_deprel(*t.deprel);
    if (rel == "nsubj" && subj == 0) subj = t.id;
    if (rel == "obj" && obj == 0) obj = t.id;
  }
  if (subj == 0) return Ineligible{"no nsubj"};
  if (obj == 0) return Ineligible{"no obj"};

  auto subj_ids = detail::subtree(s, subj);
  auto obj_ids = detail::subtree(s, obj);
  auto subj_range = detail::contiguous(subj_ids);
  auto obj_range = detail::contiguous(obj_ids);
  if (!subj_range || !obj_range) return Ineligible{"non-contiguous span"};

  const int n = static_cast<int>(s.size());
  std::vector<int> role(n + 1, 0);  // 1 subj, 2 obj
  for (int id : subj_ids) role[id] = 1;
  for (int id : obj_ids) role[id] = 2;

  // Edge punctuation outside both arguments keeps its position.
  int lead_end = 0;
  while (lead_end < n && role[lead_end + 1] == 0 && lead_end + 1 != root &&
         detail::is_punct_token(s.tokens[lead_end]))
    ++lead_end;
  int trail_start = n + 1;
  while (trail_start - 1 > lead_end && role[trail_start - 1] == 0 && trail_start - 1 != root &&
         detail::is_punct_token(s.tokens[trail_start - 2]))
    --trail_start;

  std::vector<int> pred_ids;
  for (int id = lead_end + 1; id < trail_start; ++id)
    if (role[id] == 0) pred_ids.push_back(id);
  auto pred_range = detail::contiguous(pred_ids);
  if (!pred_range) return Ineligible{"non-contiguous span"};

  ClauseSpans spans;
  spans.pred = *pred_range;
  spans.subj = *subj_range;
  spans.obj = *obj_range;
  spans.leading = Range{1, lead_end};
  spans.trailing = Range{trail_start, n};
  const int v = spans.pred.first, su = spans.subj.first, o = spans.obj.first;
  if (v < su && su < o)
    spans.order = WordOrder::kVSO;
  else if (su < v && v < o)
    spans.order = WordOrder::kSVO;
  else if (v < o && o < su)
    spans.order = WordOrder::kVOS;
  else
    return Ineligible{"unsupported word order"};
  return spans;
}

// The sentence re-serialized in `target` order.
inline AnnotatedSentence reorder_clause(const AnnotatedSentence& s, const ClauseSpans& spans, WordOrder target) {
  std::vector<int> perm;
  detail::append_range(perm, spans.leading);
  switch (target) {
    case WordOrder::kVSO:
      detail::append_range(perm, spans.pred);
      detail::append_range(perm, spans.subj);
      detail::append_range(perm, spans.obj);
      break;
    case WordOrder::kSVO:
      detail::append_range(perm, spans.subj);
      detail::append_range(perm, spans.pred);
      detail::append_range(perm, spans.obj);
      break;
    case WordOrder::kVOS:
      detail::append_range(perm, spans.pred);
      detail::append_range(perm, spans.obj);
      detail::append_range(perm, spans.subj);
      break;
  }
  detail::append_range(perm, spans.trailing);
  return renumber(s, perm);
}

// The two sentences in the other grammatical orders, in VSO, SVO, VOS order.
inline std::vector<AnnotatedSentence> rotate(const AnnotatedSentence& s, const ClauseSpans& spans) {
  std::vector<AnnotatedSentence> out;
  for (auto o : kOrders)
    if (o != spans.order) out.push_back(reorder_clause(s, spans, o));
  return out;
}

enum class CropArg { kSubject, kObject };

// Keeps the predicate plus one argument (and edge punctuation).
inline AnnotatedSentence crop_to(const AnnotatedSentence& s, const ClauseSpans& spans, CropArg keep) {
  std::vector<int> ids;
  detail::append_range(ids, spans.leading);
  const Range& arg = keep == CropArg::kSubject ? spans.subj : spans.obj;
  std::vector<std::pair<int, Range>> parts{{spans.pred.first, spans.pred}, {arg.first, arg}};
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [_, r] : parts) detail::append_range(ids, r);
  detail::append_range(ids, spans.trailing);

  // Edge punctuation attached inside the removed argument moves to the root.
  AnnotatedSentence src = s;
  std::vector<bool> kept(s.size() + 1, false);
  for (int id : ids) kept[id] = true;
  int root = 0;
  for (const auto& t : s.tokens)
    if (t.head && *t.head == 0) root = t.id;
  for (int id : ids) {
    auto& t = src.tokens[id - 1];
    if (t.head && *t.head > 0 && !kept[*t.head]) t.head = root;
  }
  return reorder_tokens(src, ids);
}

// Crops: (pred + subj) then (pred + obj).
inline std::vector<AnnotatedSentence> crop(const AnnotatedSentence& s, const ClauseSpans& spans) {
  return {crop_to(s, spans, CropArg::kSubject), crop_to(s, spans, CropArg::kObject)};
}

enum class Mode { kRotate, kRotateCrop };

inline Mode parse_mode(std::string_view m) {
  if (m == "rotate") return Mode::kRotate;
  if (m == "rotate+crop") return Mode::kRotateCrop;
  throw DataError("unknown augmentation mode '" + std::string(m) + "' (expected rotate or rotate+crop)");
}

struct AugmentStats {
  std::size_t eligible = 0;
  std::size_t morphs = 0;
};

namespace detail {

inline std::string plain_text(const AnnotatedSentence& s) {
  std::string out;
  for (const auto& t : s.tokens) {
    if (!out.empty()) out += ' ';
    out += t.form;
  }
  return out;
}

inline AnnotatedSentence with_provenance(AnnotatedSentence m, const std::string& src_id, std::string_view op,
                                         std::string_view detail) {
  m.comments.clear();
  std::string tag = std::string(op) + "-" + std::string(detail);
  m.set_metadata("sent_id", src_id + "-" + tag);
  m.set_metadata("morph", src_id + ":" + std::string(op) + ":" + std::string(detail));
  m.set_metadata("text", plain_text(m));
  return m;
}

}  // namespace detail

// Original sentences followed by every morph. Sentences that are themselves
// morphs (carry a "morph" comment) are never used as sources.
inline Treebank augment_treebank(const Treebank& tb, Mode mode, AugmentStats* stats = nullptr) {
  Treebank out;
  out.source_name = tb.source_name;
  out.sentences = tb.sentences;
  AugmentStats st;
  for (std::size_t i = 0; i < tb.size(); ++i) {
    const auto& s = tb.sentences[i];
    if (detail::is_morph(s)) continue;
    auto e = find_eligible(s);
    auto* spans = std::get_if<ClauseSpans>(&e);
    if (!spans) continue;
    ++st.eligible;
    std::string src_id = s.metadata("sent_id").value_or(std::to_string(i + 1));
    for (auto o : kOrders) {
      if (o == spans->order) continue;
      out.sentences.push_back(detail::with_provenance(reorder_clause(s, *spans, o), src_id, "rotate", order_name(o)));
      ++st.morphs;
    }
    if (mode == Mode::kRotateCrop) {
      out.sentences.push_back(detail::with_provenance(crop_to(s, *spans, CropArg::kSubject), src_id, "crop", "nsubj"));
      out.sentences.push_back(detail::with_provenance(crop_to(s, *spans, CropArg::kObject), src_id, "crop", "obj"));
      st.morphs += 2;
    }
  }
  if (stats) *stats = st;
  return out;
}

}  // namespace udkit::augment
