#include <gtest/gtest.h>

#include <variant>

#include "common.hpp"
#include "udkit/augment.hpp"

using namespace udkit;
using namespace testing_support;
namespace ag = udkit::augment;

namespace {

struct Row {
  std::string form;
  std::optional<std::string> upos;
  std::optional<int> head;
  std::optional<std::string> deprel;
  friend bool operator==(const Row&, const Row&) = default;
};

std::vector<Row> rows(const AnnotatedSentence& s) {
  std::vector<Row> out;
  for (const auto& t : s.tokens) out.push_back({t.form, t.upos, t.head, t.deprel});
  return out;
}

std::size_t eligible_count(const Treebank& tb) {
  std::size_t e = 0;
  for (const auto& s : tb.sentences) e += std::holds_alternative<ag::ClauseSpans>(ag::find_eligible(s));
  return e;
}

}  // namespace

TEST(Augment, FindsVsoClause) {
  auto e = ag::find_eligible(load("vso.conllu").sentences[0]);
  auto* spans = std::get_if<ag::ClauseSpans>(&e);
  ASSERT_NE(spans, nullptr);
  EXPECT_EQ(spans->order, ag::WordOrder::kVSO);
  EXPECT_EQ(spans->pred, (ag::Range{1, 1}));
  EXPECT_EQ(spans->subj, (ag::Range{2, 3}));
  EXPECT_EQ(spans->obj, (ag::Range{4, 5}));
  EXPECT_EQ(spans->trailing, (ag::Range{6, 6}));
}

TEST(Augment, RotatingVsoGivesHandWrittenOrders) {
  auto vso = load("vso.conllu").sentences[0];
  auto spans = std::get<ag::ClauseSpans>(ag::find_eligible(vso));
  auto morphs = ag::rotate(vso, spans);
  ASSERT_EQ(morphs.size(), 2u);
  EXPECT_EQ(rows(morphs[0]), rows(load("svo.conllu").sentences[0]));
  EXPECT_EQ(rows(morphs[1]), rows(load("vos.conllu").sentences[0]));
  // Each hand-written order is itself eligible and rotates back.
  for (const char* f : {"svo.conllu", "vos.conllu"}) {
    auto s = load(f).sentences[0];
    auto sp = std::get<ag::ClauseSpans>(ag::find_eligible(s));
    EXPECT_EQ(rows(ag::reorder_clause(s, sp, ag::WordOrder::kVSO)), rows(vso)) << f;
  }
}

TEST(Augment, RotateEmitsTwoMorphsPerEligibleSentence) {
  auto tb = load("edu94.conllu");
  auto e = eligible_count(tb);
  ASSERT_GE(e, 5u);
  ag::AugmentStats st;
  auto out = ag::augment_treebank(tb, ag::Mode::kRotate, &st);
  EXPECT_EQ(st.eligible, e);
  EXPECT_EQ(out.size(), tb.size() + 2 * e);
  for (std::size_t i = 0; i < tb.size(); ++i) EXPECT_EQ(out.sentences[i], tb.sentences[i]);
  // Morphs follow their source; map each back by the provenance comment.
  std::map<std::string, const AnnotatedSentence*> by_id;
  for (const auto& s : tb.sentences) by_id[*s.metadata("sent_id")] = &s;
  for (std::size_t i = tb.size(); i < out.size(); ++i) {
    const auto& m = out.sentences[i];
    EXPECT_TRUE(is_valid_tree(m)) << i;
    auto prov = m.metadata("morph");
    ASSERT_TRUE(prov.has_value());
    auto src = by_id.at(prov->substr(0, prov->find(':')));
    EXPECT_EQ(dependency_triples(m), dependency_triples(*src)) << *prov;
  }
}

TEST(Augment, MorphsAreNeverSources) {
  auto tb = load("vso.conllu");
  auto once = ag::augment_treebank(tb, ag::Mode::kRotate);
  ASSERT_EQ(once.size(), 3u);
  auto twice = ag::augment_treebank(once, ag::Mode::kRotate);
  EXPECT_EQ(twice.size(), 5u);
}

TEST(Augment, CropKeepsPredicateAndOneArgument) {
  auto vso = load("vso.conllu").sentences[0];
  auto spans = std::get<ag::ClauseSpans>(ag::find_eligible(vso));
  auto crops = ag::crop(vso, spans);
  ASSERT_EQ(crops.size(), 2u);
  std::vector<std::string> subj, obj;
  for (const auto& t : crops[0].tokens) subj.push_back(t.form);
  for (const auto& t : crops[1].tokens) obj.push_back(t.form);
  EXPECT_EQ(subj, (std::vector<std::string>{"Kumain", "si", "Juan", "."}));
  EXPECT_EQ(obj, (std::vector<std::string>{"Kumain", "ng", "mansanas", "."}));
  for (const auto& c : crops) EXPECT_TRUE(is_valid_tree(c));

  auto tb = load("edu94.conllu");
  auto e = eligible_count(tb);
  auto out = ag::augment_treebank(tb, ag::Mode::kRotateCrop);
  EXPECT_EQ(out.size(), tb.size() + 4 * e);
  for (const auto& s : out.sentences) EXPECT_TRUE(is_valid_tree(s));
}

TEST(Augment, IneligibleSentences) {
  auto s = load("fig1.conllu").sentences[0];
  EXPECT_TRUE(std::holds_alternative<ag::Ineligible>(ag::find_eligible(s)));
  auto partial = sentence({"a", "b"});
  EXPECT_TRUE(std::holds_alternative<ag::Ineligible>(ag::find_eligible(partial)));
  EXPECT_THROW(ag::parse_mode("shuffle"), DataError);
}
