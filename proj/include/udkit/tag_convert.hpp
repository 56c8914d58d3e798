#pragma once

// Converts corpora tagged with a language-specific tagset to UD POS tags
// through a declarative mapping table.

#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "udkit/conllu.hpp"
#include "udkit/error.hpp"
#include "udkit/text.hpp"

namespace udkit::tags {

struct TagMap {
  std::map<std::string, std::string> entries;
  std::optional<std::string> fallback;  // nullopt: fail on unmapped tags

  std::optional<std::string> lookup(const std::string& tag) const {
    auto it = entries.find(tag);
    if (it != entries.end()) return it->second;
    return fallback;
  }
};

// Lines of "SOURCE<TAB>TARGET"; "#" starts a comment; "DEFAULT<TAB>X" sets the
// fallback ("DEFAULT<TAB>fail" keeps fail mode).
inline TagMap load_tag_map(std::string_view input) {
  TagMap m;
  auto ls = text::lines(input);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const std::size_t ln = i + 1;
    auto line = text::trim(ls[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 2) throw ParseError(ln, "expected SOURCE<TAB>TARGET");
    std::string src(text::trim(cols[0])), tgt(text::trim(cols[1]));
    if (src.empty()) throw ParseError(ln, "empty source tag");
    if (src == "DEFAULT") {
      if (tgt == "fail" || tgt == "FAIL") {
        m.fallback.reset();
        continue;
      }
      if (!is_upos(tgt)) throw ParseError(ln, tgt + " is not a UD tag");
      m.fallback = tgt;
      continue;
    }
    if (!is_upos(tgt)) throw ParseError(ln, tgt + " is not a UD tag");
    if (!m.entries.emplace(src, tgt).second) throw ParseError(ln, "duplicate source tag '" + src + "'");
  }
  return m;
}

using TaggedSentence = std::vector<std::pair<std::string, std::string>>;
using TaggedCorpus = std::vector<TaggedSentence>;

// One sentence per line as "form/TAG" tokens, or two-column TSV with blank
// lines between sentences. TSV is chosen when any line contains a tab.
inline TaggedCorpus read_tagged_corpus(std::string_view input) {
  TaggedCorpus c;
  auto ls = text::lines(input);
  bool tsv = false;
  for (const auto& l : ls)
    if (l.find('\t') != std::string::npos) tsv = true;
  if (tsv) {
    TaggedSentence cur;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      auto line = text::trim(ls[i]);
      if (line.empty()) {
        if (!cur.empty()) c.push_back(std::move(cur));
        cur.clear();
        continue;
      }
      if (line.front() == '#') continue;
      auto cols = text::split(line, '\t');
      if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) throw ParseError(i + 1, "expected FORM<TAB>TAG");
      cur.emplace_back(std::string(cols[0]), std::string(cols[1]));
    }
    if (!cur.empty()) c.push_back(std::move(cur));
    return c;
  }
  for (std::size_t i = 0; i < ls.size(); ++i) {
    auto words = text::split_ws(ls[i]);
    if (words.empty()) continue;
    TaggedSentence s;
    for (auto w : words) {
      auto slash = w.rfind('/');
      if (slash == std::string_view::npos || slash == 0 || slash + 1 == w.size())
        throw ParseError(i + 1, "token '" + std::string(w) + "' is not form/TAG");
      s.emplace_back(std::string(w.substr(0, slash)), std::string(w.substr(slash + 1)));
    }
    c.push_back(std::move(s));
  }
  return c;
}

struct UnmappedTag {
  std::string source_tag;
  std::size_t count = 0;
  std::string mapped_to;
  friend bool operator==(const UnmappedTag&, const UnmappedTag&) = default;
};

struct ConversionReport {
  std::vector<UnmappedTag> unmapped;  // sorted by source tag

  std::string to_tsv() const {
    std::ostringstream os;
    os << "source_tag\tcount\tmapped_to\n";
    for (const auto& u : unmapped) os << u.source_tag << '\t' << u.count << '\t' << u.mapped_to << '\n';
    return os.str();
  }
};

struct Conversion {
  Treebank treebank;
  ConversionReport report;
};

inline Conversion convert_corpus(const TaggedCorpus& corpus, const TagMap& m) {
  Conversion out;
  std::map<std::string, std::size_t> unmapped;
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    if (corpus[si].empty()) throw DataError("sentence " + std::to_string(si + 1) + " is empty");
    AnnotatedSentence s;
    for (const auto& [form, tag] : corpus[si]) {
      if (tag.empty()) throw DataError("empty tag in sentence " + std::to_string(si + 1));
      Token t;
      t.id = static_cast<int>(s.tokens.size()) + 1;
      t.form = form;
      if (!m.entries.count(tag)) {
        if (!m.fallback)
          throw DataError("unmapped tag '" + tag + "' in sentence " + std::to_string(si + 1) + " (no DEFAULT)");
        ++unmapped[tag];
      }
      t.upos = m.lookup(tag);
      s.tokens.push_back(std::move(t));
    }
    out.treebank.sentences.push_back(std::move(s));
  }
  for (const auto& [tag, n] : unmapped) out.report.unmapped.push_back({tag, n, *m.fallback});
  return out;
}

}  // namespace udkit::tags
