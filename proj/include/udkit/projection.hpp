#pragma once

// Cross-lingual annotation projection over word alignments: POS tags by
// summed tagger confidence, dependency arcs by link-probability weighting and
// maximum-arborescence decoding, plus coverage-based sentence selection.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "udkit/aligner.hpp"
#include "udkit/conllu.hpp"
#include "udkit/delex.hpp"
#include "udkit/error.hpp"
#include "udkit/mst.hpp"
#include "udkit/text.hpp"

namespace udkit::project {

using align::AlignmentLink;
using align::ParallelPair;

struct TagWithConfidence {
  std::string upos;
  double confidence = 1.0;  // in (0, 1]
  friend bool operator==(const TagWithConfidence&, const TagWithConfidence&) = default;
};

struct HeadWithLabel {
  int head = 0;  // 1-based source token id, 0 for the root
  std::string deprel;
  friend bool operator==(const HeadWithLabel&, const HeadWithLabel&) = default;
};

// Per-source-token annotation; either part may be absent.
struct SourceAnnotation {
  std::vector<std::optional<TagWithConfidence>> tags;
  std::optional<std::vector<HeadWithLabel>> tree;
};

// MISC key carrying the source tagger's confidence for UPOS.
inline constexpr std::string_view kConfidenceKey = "UPOSConf";

// Reads tags (confidence from MISC UPOSConf=..., default 1) and, when every
// head is set, the tree of a source-side sentence.
inline SourceAnnotation source_annotation(const AnnotatedSentence& s) {
  SourceAnnotation a;
  for (const auto& t : s.tokens) {
    if (!t.upos) {
      a.tags.emplace_back();
      continue;
    }
    double conf = 1.0;
    if (t.misc) {
      for (auto piece : text::split(*t.misc, '|')) {
        if (piece.substr(0, kConfidenceKey.size() + 1) == std::string(kConfidenceKey) + "=") {
          auto v = text::parse_double(piece.substr(kConfidenceKey.size() + 1));
          if (!v || *v <= 0 || *v > 1) throw DataError("UPOSConf must be in (0, 1]");
          conf = *v;
        }
      }
    }
    a.tags.push_back(TagWithConfidence{*t.upos, conf});
  }
  if (s.all_heads_set() && !s.tokens.empty()) {
    if (!is_valid_tree(s)) throw DataError("source tree is not a valid dependency tree");
    std::vector<HeadWithLabel> tree;
    for (const auto& t : s.tokens) tree.push_back({*t.head, t.deprel.value_or("dep")});
    a.tree = std::move(tree);
  }
  return a;
}

struct ProjectionGroup {
  ParallelPair pair;
  std::vector<AlignmentLink> links;
  SourceAnnotation annotation;
};

namespace detail {

inline void check_shared_target(const std::vector<ProjectionGroup>& groups) {
  for (std::size_t g = 1; g < groups.size(); ++g)
    if (groups[g].pair.target_tokens != groups[0].pair.target_tokens)
      throw DataError("projection groups do not share the same target sentence");
  for (const auto& g : groups) {
    const int ns = static_cast<int>(g.pair.source_tokens.size());
    const int nt = static_cast<int>(g.pair.target_tokens.size());
    for (const auto& l : g.links)
      if (l.src_index < 0 || l.src_index >= ns || l.tgt_index < 0 || l.tgt_index >= nt)
        throw DataError("alignment link index out of range");
  }
}

}  // namespace detail

// For each target token, the tag with the highest confidence sum over all
// links from all sources; unset without links. Ties go to the alphabetically
// first tag.
inline std::vector<std::optional<std::string>> project_pos(const std::vector<ProjectionGroup>& groups) {
  if (groups.empty()) return {};
  detail::check_shared_target(groups);
  const std::size_t n = groups[0].pair.target_tokens.size();
  std::vector<std::map<std::string, double>> sums(n);
  for (const auto& g : groups) {
    for (const auto& l : g.links) {
      if (l.src_index >= static_cast<int>(g.annotation.tags.size())) continue;
      const auto& tag = g.annotation.tags[l.src_index];
      if (!tag) continue;
      sums[l.tgt_index][tag->upos] += tag->confidence;
    }
  }
  std::vector<std::optional<std::string>> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double best = -1;
    for (const auto& [tag, sum] : sums[j]) {
      if (sum > best) {
        best = sum;
        out[j] = tag;
      }
    }
  }
  return out;
}

// Arc weights over the target sentence: every source arc h -> d with links
// (h -> h', p1) and (d -> d', p2), h' != d', adds p1 * p2 to h' -> d'; a source
// root linked to r' adds the link probability to 0 -> r'. Summed over sources.
inline WeightedDigraph build_edge_graph(const std::vector<ProjectionGroup>& groups) {
  if (groups.empty()) return WeightedDigraph(0);
  detail::check_shared_target(groups);
  WeightedDigraph g(static_cast<int>(groups[0].pair.target_tokens.size()));
  for (const auto& grp : groups) {
    if (!grp.annotation.tree) continue;
    const auto& tree = *grp.annotation.tree;
    std::vector<std::vector<const AlignmentLink*>> from(grp.pair.source_tokens.size());
    for (const auto& l : grp.links) from[l.src_index].push_back(&l);
    for (std::size_t d = 0; d < tree.size() && d < from.size(); ++d) {
      int h = tree[d].head;
      if (h == 0) {
        for (const auto* ld : from[d]) g.add_weight(0, ld->tgt_index + 1, ld->prob);
        continue;
      }
      if (h < 1 || h > static_cast<int>(from.size())) continue;
      for (const auto* lh : from[h - 1])
        for (const auto* ld : from[d])
          if (lh->tgt_index != ld->tgt_index) g.add_weight(lh->tgt_index + 1, ld->tgt_index + 1, lh->prob * ld->prob);
    }
  }
  return g;
}

// Labels decoded arcs from the head and dependent UPOS; root arcs get "root".
inline std::vector<std::string> predict_labels_delex(const std::vector<std::pair<int, int>>& arcs,
                                                     const std::vector<std::optional<std::string>>& upos,
                                                     const delex::Labeler& labeler) {
  std::vector<std::string> out;
  for (const auto& [h, d] : arcs) {
    if (h == 0) {
      out.emplace_back("root");
      continue;
    }
    std::string dep = upos.at(d - 1).value_or("X");
    std::string head = upos.at(h - 1).value_or("X");
    out.push_back(labeler.predict(dep, head));
  }
  return out;
}

// Fraction of target tokens with at least one link, averaged over sources.
inline double score_coverage(const std::map<std::string, std::pair<ParallelPair, std::vector<AlignmentLink>>>& per_source) {
  if (per_source.empty()) throw DataError("coverage needs at least one source");
  const std::vector<std::string>* target = nullptr;
  double total = 0;
  for (const auto& [lang, entry] : per_source) {
    const auto& [pair, links] = entry;
    if (target && *target != pair.target_tokens) throw DataError("coverage entries do not share the target sentence");
    target = &pair.target_tokens;
    const std::size_t n = pair.target_tokens.size();
    if (n == 0) continue;
    std::vector<bool> covered(n, false);
    for (const auto& l : links)
      if (l.tgt_index >= 0 && static_cast<std::size_t>(l.tgt_index) < n) covered[l.tgt_index] = true;
    total += static_cast<double>(std::count(covered.begin(), covered.end(), true)) / static_cast<double>(n);
  }
  return total / static_cast<double>(per_source.size());
}

// Indices of the k highest scores, best first; ties keep corpus order.
inline std::vector<std::size_t> select_top_k(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  if (k < idx.size()) idx.resize(k);
  return idx;
}

// Builds the target sentence from projected tags and, if given, decoded arcs and labels.
inline AnnotatedSentence make_target_sentence(const std::vector<std::string>& target_tokens,
                                              const std::vector<std::optional<std::string>>& upos,
                                              const std::vector<std::pair<int, int>>* arcs = nullptr,
                                              const std::vector<std::string>* labels = nullptr) {
  AnnotatedSentence s;
  for (std::size_t j = 0; j < target_tokens.size(); ++j) {
    Token t;
    t.id = static_cast<int>(j) + 1;
    t.form = target_tokens[j];
    if (j < upos.size()) t.upos = upos[j];
    s.tokens.push_back(std::move(t));
  }
  if (arcs) {
    for (std::size_t k = 0; k < arcs->size(); ++k) {
      const auto& [h, d] = (*arcs)[k];
      s.tokens[d - 1].head = h;
      if (labels) s.tokens[d - 1].deprel = (*labels)[k];
    }
  }
  return s;
}

// Fraction of tokens with a projected tag.
inline double tagged_ratio(const AnnotatedSentence& s) {
  if (s.tokens.empty()) return 0;
  std::size_t k = 0;
  for (const auto& t : s.tokens) k += t.upos.has_value();
  return static_cast<double>(k) / static_cast<double>(s.tokens.size());
}

// Drops sentences where fewer than `min_ratio` of tokens received a tag.
// Untagged tokens stay in kept sentences (the tagger skips them as updates).
inline Treebank filter_projected_pos(const Treebank& tb, double min_ratio = 0.5) {
  Treebank out;
  out.source_name = tb.source_name;
  for (const auto& s : tb.sentences)
    if (tagged_ratio(s) >= min_ratio) out.sentences.push_back(s);
  return out;
}

// One source language: its annotated side (sentence i parallel to pairs[i]),
// the parallel pairs and the alignment links per pair.
struct SourceCorpus {
  std::string lang;
  Treebank annotated;
  std::vector<ParallelPair> pairs;
  std::vector<std::vector<AlignmentLink>> links;
};

enum class ProjectionKind { kPos, kTree };

struct CorpusProjection {
  Treebank treebank;
  std::vector<double> coverage;  // per target sentence, before filtering
};

// Projects every target sentence from all sources. Tree projection needs a
// labeler. POS projection drops sentences below `min_tagged_ratio`.
inline CorpusProjection project_corpus(const std::vector<SourceCorpus>& sources, ProjectionKind kind,
                                       const delex::Labeler* labeler = nullptr, double min_tagged_ratio = 0.5) {
  if (sources.empty()) throw DataError("projection needs at least one source");
  if (kind == ProjectionKind::kTree && !labeler) throw DataError("tree projection needs a labeler");
  const std::size_t n = sources[0].pairs.size();
  for (const auto& src : sources) {
    if (src.pairs.size() != n || src.links.size() != n || src.annotated.size() != n)
      throw DataError("source '" + src.lang + "': parallel lines, links and annotated sentences differ in count");
  }
  CorpusProjection out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ProjectionGroup> groups;
    std::map<std::string, std::pair<ParallelPair, std::vector<AlignmentLink>>> per_source;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto& src = sources[k];
      const auto& sent = src.annotated.sentences[i];
      if (sent.size() != src.pairs[i].source_tokens.size())
        throw DataError("source '" + src.lang + "', line " + std::to_string(i + 1) +
                        ": annotated sentence and parallel line differ in token count");
      groups.push_back({src.pairs[i], src.links[i], source_annotation(sent)});
      per_source[src.lang.empty() ? std::to_string(k) : src.lang] = {src.pairs[i], src.links[i]};
    }
    const auto& target = groups[0].pair.target_tokens;
    if (target.empty()) {
      out.coverage.push_back(0);
      continue;
    }
    out.coverage.push_back(score_coverage(per_source));
    auto upos = project_pos(groups);
    AnnotatedSentence s;
    if (kind == ProjectionKind::kPos) {
      s = make_target_sentence(target, upos);
      if (tagged_ratio(s) < min_tagged_ratio) continue;
    } else {
      auto arcs = decode_mst(build_edge_graph(groups));
      auto labels = predict_labels_delex(arcs, upos, *labeler);
      s = make_target_sentence(target, upos, &arcs, &labels);
    }
    s.set_metadata("sent_id", "proj-" + std::to_string(i + 1));
    std::string txt;
    for (const auto& w : target) txt += (txt.empty() ? "" : " ") + w;
    s.set_metadata("text", txt);
    out.treebank.sentences.push_back(std::move(s));
  }
  return out;
}

}  // namespace udkit::project
