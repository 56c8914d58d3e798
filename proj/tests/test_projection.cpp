#include <gtest/gtest.h>

#include "common.hpp"
#include "oracles.hpp"
#include "udkit/aligner.hpp"
#include "udkit/delex.hpp"
#include "udkit/projection.hpp"

using namespace udkit;
using namespace testing_support;
namespace pj = udkit::project;

TEST(Projection, IdentityAlignmentIsAFixedPoint) {
  std::size_t sentences = 0;
  for (const auto& name : tree_fixtures()) {
    for (const auto& s : load(name).sentences) {
      auto d = oracle::identity_projection(s);
      EXPECT_EQ(d.tags, 0u) << name;
      EXPECT_EQ(d.heads, 0u) << name;
      ++sentences;
    }
  }
  EXPECT_GT(sentences, 400u);
}

// Every assignment of up to 4 tags to up to 4 links, confidences from a grid,
// links spread over two sources.
TEST(Projection, VotingMatchesBruteForce) {
  const std::vector<std::string> tags = {"ADJ", "NOUN", "PROPN", "VERB"};
  const std::vector<double> confs = {0.25, 0.5, 0.75, 1.0};
  std::size_t cases = 0;
  for (int links = 1; links <= 4; ++links) {
    int combos = 1;
    for (int i = 0; i < links; ++i) combos *= 16;
    for (int code = 0; code < combos; ++code) {
      std::vector<std::pair<std::string, double>> votes;
      int c = code;
      for (int i = 0; i < links; ++i) {
        votes.emplace_back(tags[c % 4], confs[(c / 4) % 4]);
        c /= 16;
      }
      std::vector<pj::ProjectionGroup> groups(2);
      for (int g = 0; g < 2; ++g) groups[g].pair.target_tokens = {"t"};
      for (int i = 0; i < links; ++i) {
        auto& grp = groups[i % 2];
        int src = static_cast<int>(grp.pair.source_tokens.size());
        grp.pair.source_tokens.push_back("s" + std::to_string(i));
        grp.annotation.tags.push_back(pj::TagWithConfidence{votes[i].first, votes[i].second});
        grp.links.push_back({src, 0, 1.0});
      }
      auto got = pj::project_pos(groups);
      ASSERT_EQ(got.size(), 1u);
      ASSERT_EQ(got[0], oracle::vote(votes)) << "links " << links << " code " << code;
      ++cases;
    }
  }
  EXPECT_EQ(cases, 16u + 256u + 4096u + 65536u);
}

TEST(Projection, UnlinkedTokensStayUntagged) {
  pj::ProjectionGroup g;
  g.pair = {{"a"}, {"x", "y"}, ""};
  g.links = {{0, 1, 1.0}};
  g.annotation.tags = {pj::TagWithConfidence{"NOUN", 1.0}};
  auto tags = pj::project_pos({g});
  EXPECT_FALSE(tags[0].has_value());
  EXPECT_EQ(tags[1], "NOUN");
}

TEST(Projection, EdgeGraphWeightsAreLinkProducts) {
  pj::ProjectionGroup g;
  g.pair = {{"a", "b"}, {"x", "y"}, ""};
  g.links = {{0, 1, 0.5}, {1, 0, 0.8}};
  g.annotation.tree = std::vector<pj::HeadWithLabel>{{0, "root"}, {1, "obj"}};
  auto e = pj::build_edge_graph({g});
  EXPECT_DOUBLE_EQ(e.weight(0, 2), 0.5);
  EXPECT_DOUBLE_EQ(e.weight(2, 1), 0.4);
  EXPECT_EQ(e.arc_count(), 2u);
}

TEST(Projection, SourceConfidenceFromMisc) {
  auto tb = load("parallel_en.conllu");
  auto a = pj::source_annotation(tb.sentences[0]);
  ASSERT_EQ(a.tags.size(), 6u);
  EXPECT_DOUBLE_EQ(a.tags[0]->confidence, 0.7);
  EXPECT_DOUBLE_EQ(a.tags[4]->confidence, 0.95);
  ASSERT_TRUE(a.tree.has_value());
  EXPECT_EQ((*a.tree)[2].head, 0);
  auto bad = tb.sentences[0];
  bad.tokens[0].misc = "UPOSConf=1.5";
  EXPECT_THROW(pj::source_annotation(bad), DataError);
}

TEST(Projection, CoverageAndSelection) {
  std::map<std::string, std::pair<pj::ParallelPair, std::vector<pj::AlignmentLink>>> per;
  per["en"] = {{{"a", "b"}, {"x", "y", "z", "w"}, "en"}, {{0, 0, 1}, {1, 1, 1}}};
  per["es"] = {{{"c"}, {"x", "y", "z", "w"}, "es"}, {{0, 3, 1}}};
  EXPECT_DOUBLE_EQ(pj::score_coverage(per), (0.5 + 0.25) / 2);
  EXPECT_EQ(pj::select_top_k({0.2, 0.9, 0.5, 0.9}, 3), (std::vector<std::size_t>{1, 3, 2}));
  EXPECT_EQ(pj::select_top_k({0.2}, 5), (std::vector<std::size_t>{0}));
  EXPECT_THROW(pj::score_coverage({}), DataError);
}

TEST(Projection, CorpusProjectionProducesTreesAndFiltersPos) {
  auto en = align::read_parallel(read(fixture("parallel.en")), read(fixture("parallel.tl")), "en");
  auto table = align::train_aligner(en, 10).table;
  pj::SourceCorpus src;
  src.lang = "en";
  src.annotated = load("parallel_en.conllu");
  src.pairs = en;
  for (const auto& p : en) src.links.push_back(align::align(p, table));
  auto labeler = delex::train_labeler(delex::extract_examples(src.annotated));

  auto trees = pj::project_corpus({src}, pj::ProjectionKind::kTree, &labeler);
  EXPECT_EQ(trees.treebank.size(), en.size());
  EXPECT_EQ(trees.coverage.size(), en.size());
  for (const auto& s : trees.treebank.sentences) EXPECT_TRUE(is_valid_tree(s));
  EXPECT_EQ(trees.treebank.sentences[0].metadata("sent_id"), "proj-1");

  auto pos = pj::project_corpus({src}, pj::ProjectionKind::kPos, nullptr, 0.5);
  EXPECT_LE(pos.treebank.size(), en.size());
  for (const auto& s : pos.treebank.sentences) EXPECT_GE(pj::tagged_ratio(s), 0.5);

  EXPECT_THROW(pj::project_corpus({src}, pj::ProjectionKind::kTree, nullptr), DataError);
  auto broken = src;
  broken.links.pop_back();
  EXPECT_THROW(pj::project_corpus({broken}, pj::ProjectionKind::kPos), DataError);
}

TEST(Projection, MismatchedTargetsAreRejected) {
  pj::ProjectionGroup a, b;
  a.pair = {{"s"}, {"x"}, ""};
  b.pair = {{"s"}, {"y"}, ""};
  EXPECT_THROW(pj::project_pos({a, b}), DataError);
  a.links = {{3, 0, 1.0}};
  EXPECT_THROW(pj::project_pos({a}), DataError);
}
