#pragma once

// Delexicalized dependency-label prediction: a bagged forest of small
// decision trees over exactly two categorical features, the dependent's UPOS
// and the head's UPOS (or the ROOT marker).

#include <algorithm>
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
#include "udkit/rng.hpp"
#include "udkit/text.hpp"

namespace udkit::delex {

inline constexpr std::string_view kRootMarker = "ROOT";

struct LabelExample {
  std::string dep_upos;
  std::string head_upos;  // a UPOS tag or kRootMarker
  std::string label;
  friend bool operator==(const LabelExample&, const LabelExample&) = default;
};

// One example per token; root tokens yield (upos, ROOT, "root").
// Tokens without UPOS use "X".
inline std::vector<LabelExample> extract_examples(const Treebank& tb) {
  std::vector<LabelExample> out;
  for (std::size_t si = 0; si < tb.size(); ++si) {
    const auto& s = tb.sentences[si];
    for (const auto& t : s.tokens) {
      if (!t.head)
        throw DataError("sentence " + std::to_string(si + 1) + ", token " + std::to_string(t.id) + ": missing head");
      std::string dep = t.upos.value_or("X");
      if (*t.head == 0) {
        out.push_back({dep, std::string(kRootMarker), "root"});
        continue;
      }
      if (!t.deprel)
        throw DataError("sentence " + std::to_string(si + 1) + ", token " + std::to_string(t.id) + ": missing deprel");
      const auto& h = s.tokens.at(*t.head - 1);
      out.push_back({dep, h.upos.value_or("X"), *t.deprel});
    }
  }
  return out;
}

struct LabelerOptions {
  int n_trees = 50;
  std::uint64_t seed = 1;
  bool bootstrap = true;            // false: every tree sees the full example list
  bool feature_subsampling = true;  // false: every split considers both features
};

struct TreeNode {
  int feature = -1;  // -1 leaf, 0 dependent UPOS, 1 head UPOS
  std::string tag;   // split: feature == tag goes left
  int left = -1;
  int right = -1;
  std::string label;  // leaf only
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

using DecisionTree = std::vector<TreeNode>;  // node 0 is the root

class Labeler {
 public:
  std::vector<DecisionTree> trees;
  std::string fallback_label;
  std::map<std::string, std::size_t> label_frequency;
  std::set<std::pair<std::string, std::string>> seen_pairs;

  std::string predict(std::string_view dep_upos, std::string_view head_upos) const {
    if (!seen_pairs.count({std::string(dep_upos), std::string(head_upos)})) return fallback_label;
    std::map<std::string, int> votes;
    for (const auto& tree : trees) ++votes[leaf_label(tree, dep_upos, head_upos)];
    return pick(votes);
  }

  // Majority with ties broken by global label frequency, then alphabetically.
  template <class Counts>
  std::string pick(const Counts& counts) const {
    const std::string* best = nullptr;
    long long best_count = -1;
    std::size_t best_freq = 0;
    for (const auto& [label, count] : counts) {
      auto it = label_frequency.find(label);
      std::size_t freq = it == label_frequency.end() ? 0 : it->second;
      long long c = static_cast<long long>(count);
      if (c > best_count || (c == best_count && freq > best_freq)) {
        best = &label;
        best_count = c;
        best_freq = freq;
      }
    }
    return best ? *best : fallback_label;
  }

  std::string serialize() const;
  static Labeler deserialize(std::string_view text);

  friend bool operator==(const Labeler&, const Labeler&) = default;

 private:
  static const std::string& leaf_label(const DecisionTree& tree, std::string_view dep, std::string_view head) {
    int idx = 0;
    while (tree[idx].feature >= 0) {
      std::string_view v = tree[idx].feature == 0 ? dep : head;
      idx = (v == tree[idx].tag) ? tree[idx].left : tree[idx].right;
    }
    return tree[idx].label;
  }
};

namespace detail {

struct Encoded {
  int dep;
  int head;
  int label;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<Encoded>& data, const std::vector<std::string>& tags,
              const std::vector<std::string>& labels, const Labeler& owner, Rng& rng, bool subsample)
      : data_(data), tags_(tags), labels_(labels), owner_(owner), rng_(rng), subsample_(subsample) {}

  DecisionTree build(const std::vector<int>& sample) {
    tree_.clear();
    grow(sample);
    return std::move(tree_);
  }

 private:
  static double gini(const std::vector<int>& counts, int total) {
    if (total == 0) return 0;
    double g = 1.0;
    for (int c : counts) {
      double p = static_cast<double>(c) / total;
      g -= p * p;
    }
    return g;
  }

  int feature_value(int row, int f) const { return f == 0 ? data_[row].dep : data_[row].head; }

  // Best one-vs-rest split on feature f as (impurity, tag id); tag -1 if the
  // feature is constant in this node.
  std::pair<double, int> best_split(const std::vector<int>& rows, int f) const {
    std::set<int> values;
    for (int r : rows) values.insert(feature_value(r, f));
    if (values.size() < 2) return {0.0, -1};
    // iterate in tag-string order for deterministic tie-breaking
    std::vector<int> ordered(values.begin(), values.end());
    std::sort(ordered.begin(), ordered.end(), [this](int a, int b) { return tags_[a] < tags_[b]; });
    double best = 2.0;
    int best_tag = -1;
    const int total = static_cast<int>(rows.size());
    for (int v : ordered) {
      std::vector<int> lc(labels_.size(), 0), rc(labels_.size(), 0);
      int ln = 0, rn = 0;
      for (int r : rows) {
        if (feature_value(r, f) == v) {
          ++lc[data_[r].label];
          ++ln;
        } else {
          ++rc[data_[r].label];
          ++rn;
        }
      }
      double imp = (ln * gini(lc, ln) + rn * gini(rc, rn)) / total;
      if (imp < best - 1e-12) {
        best = imp;
        best_tag = v;
      }
    }
    return {best, best_tag};
  }

  int grow(const std::vector<int>& rows) {
    int idx = static_cast<int>(tree_.size());
    tree_.emplace_back();
    std::map<std::string, int> counts;
    std::set<std::pair<int, int>> cells;
    for (int r : rows) {
      ++counts[labels_[data_[r].label]];
      cells.insert({data_[r].dep, data_[r].head});
    }
    if (counts.size() <= 1 || cells.size() <= 1) {
      tree_[idx].label = owner_.pick(counts);
      return idx;
    }
    int feature = -1, tag = -1;
    if (subsample_) {
      int first = static_cast<int>(rng_.index(2));
      for (int f : {first, 1 - first}) {
        auto [imp, t] = best_split(rows, f);
        if (t >= 0) {
          feature = f;
          tag = t;
          break;
        }
      }
    } else {
      double best = 3.0;
      for (int f : {0, 1}) {
        auto [imp, t] = best_split(rows, f);
        if (t >= 0 && imp < best - 1e-12) {
          best = imp;
          feature = f;
          tag = t;
        }
      }
    }
    // More than one cell means at least one feature varies.
    std::vector<int> left, right;
    for (int r : rows) (feature_value(r, feature) == tag ? left : right).push_back(r);
    tree_[idx].feature = feature;
    tree_[idx].tag = tags_[tag];
    int l = grow(left);
    int rr = grow(right);
    tree_[idx].left = l;
    tree_[idx].right = rr;
    return idx;
  }

  const std::vector<Encoded>& data_;
  const std::vector<std::string>& tags_;
  const std::vector<std::string>& labels_;
  const Labeler& owner_;
  Rng& rng_;
  bool subsample_;
  DecisionTree tree_;
};

}  // namespace detail

inline Labeler train_labeler(const std::vector<LabelExample>& examples, const LabelerOptions& opts = {}) {
  if (examples.empty()) throw DataError("cannot train a labeler without examples");
  if (opts.n_trees < 1) throw DataError("n_trees must be at least 1");

  Labeler lab;
  std::map<std::string, int> tag_ids, label_ids;
  for (const auto& e : examples) {
    tag_ids.emplace(e.dep_upos, 0);
    tag_ids.emplace(e.head_upos, 0);
    label_ids.emplace(e.label, 0);
    ++lab.label_frequency[e.label];
    lab.seen_pairs.insert({e.dep_upos, e.head_upos});
  }
  std::vector<std::string> tags, labels;
  for (auto& [t, id] : tag_ids) {
    id = static_cast<int>(tags.size());
    tags.push_back(t);
  }
  for (auto& [l, id] : label_ids) {
    id = static_cast<int>(labels.size());
    labels.push_back(l);
  }
  {
    std::map<std::string, std::size_t> all(lab.label_frequency.begin(), lab.label_frequency.end());
    lab.fallback_label = lab.pick(all);
  }
  std::vector<detail::Encoded> data;
  data.reserve(examples.size());
  for (const auto& e : examples) data.push_back({tag_ids[e.dep_upos], tag_ids[e.head_upos], label_ids[e.label]});

  Rng rng(opts.seed);
  detail::TreeBuilder builder(data, tags, labels, lab, rng, opts.feature_subsampling);
  const std::size_t n = data.size();
  for (int t = 0; t < opts.n_trees; ++t) {
    std::vector<int> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = opts.bootstrap ? static_cast<int>(rng.index(n)) : static_cast<int>(i);
    lab.trees.push_back(builder.build(sample));
  }
  return lab;
}

inline std::string predict_label(const Labeler& l, std::string_view dep_upos, std::string_view head_upos) {
  return l.predict(dep_upos, head_upos);
}

// Text format:
//   udkit-labeler <TAB> 1
//   fallback <TAB> label
//   freq <TAB> label <TAB> count        (one per label)
//   pair <TAB> dep <TAB> head           (one per training cell)
//   tree <TAB> node_count
//   split <TAB> feature <TAB> tag <TAB> left <TAB> right | leaf <TAB> label
inline std::string Labeler::serialize() const {
  std::ostringstream os;
  os << "udkit-labeler\t1\n";
  os << "fallback\t" << fallback_label << "\n";
  for (const auto& [l, c] : label_frequency) os << "freq\t" << l << "\t" << c << "\n";
  for (const auto& [d, h] : seen_pairs) os << "pair\t" << d << "\t" << h << "\n";
  for (const auto& tree : trees) {
    os << "tree\t" << tree.size() << "\n";
    for (const auto& node : tree) {
      if (node.feature < 0)
        os << "leaf\t" << node.label << "\n";
      else
        os << "split\t" << (node.feature == 0 ? "dep" : "head") << "\t" << node.tag << "\t" << node.left << "\t"
           << node.right << "\n";
    }
  }
  return os.str();
}

inline Labeler Labeler::deserialize(std::string_view input) {
  Labeler lab;
  auto ls = text::lines(input);
  if (ls.empty() || ls[0] != "udkit-labeler\t1") throw ParseError(1, "not a udkit labeler model (version 1)");
  std::size_t i = 1;
  auto fail = [&](const std::string& m) { throw ParseError(i + 1, m); };
  while (i < ls.size()) {
    auto cols = text::split(ls[i], '\t');
    if (cols[0] == "fallback" && cols.size() == 2) {
      lab.fallback_label = std::string(cols[1]);
    } else if (cols[0] == "freq" && cols.size() == 3) {
      auto c = text::parse_int(cols[2]);
      if (!c) fail("bad count");
      lab.label_frequency[std::string(cols[1])] = static_cast<std::size_t>(*c);
    } else if (cols[0] == "pair" && cols.size() == 3) {
      lab.seen_pairs.insert({std::string(cols[1]), std::string(cols[2])});
    } else if (cols[0] == "tree" && cols.size() == 2) {
      auto count = text::parse_int(cols[1]);
      if (!count || *count < 1) fail("bad tree size");
      DecisionTree tree;
      for (long long k = 0; k < *count; ++k) {
        ++i;
        if (i >= ls.size()) fail("truncated tree");
        auto nc = text::split(ls[i], '\t');
        TreeNode node;
        if (nc[0] == "leaf" && nc.size() == 2) {
          node.label = std::string(nc[1]);
        } else if (nc[0] == "split" && nc.size() == 5) {
          node.feature = nc[1] == "dep" ? 0 : (nc[1] == "head" ? 1 : -2);
          auto l = text::parse_int(nc[3]), r = text::parse_int(nc[4]);
          if (node.feature < 0 || !l || !r || *l < 0 || *r < 0 || *l >= *count || *r >= *count)
            fail("bad split node");
          node.tag = std::string(nc[2]);
          node.left = static_cast<int>(*l);
          node.right = static_cast<int>(*r);
        } else {
          fail("bad tree node");
        }
        tree.push_back(std::move(node));
      }
      lab.trees.push_back(std::move(tree));
    } else {
      fail("unrecognized line");
    }
    ++i;
  }
  if (lab.trees.empty()) throw DataError("labeler model has no trees");
  return lab;
}

}  // namespace udkit::delex
