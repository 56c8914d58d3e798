#include <gtest/gtest.h>

#include <algorithm>

#include "common.hpp"
#include "oracles.hpp"
#include "udkit/fst.hpp"
#include "udkit/morph.hpp"

using namespace udkit;
using namespace testing_support;

namespace {

const morph::Morphology& v1() {
  static const auto m = morph::compile_rules(read(data_file("rules/v1.rules")));
  return m;
}

const morph::Morphology& v2() {
  static const auto m = morph::compile_rules(read(data_file("rules/v2.rules")));
  return m;
}

bool has(const std::vector<morph::Analysis>& as, const std::string& lemma, const std::vector<std::string>& trace) {
  return std::any_of(as.begin(), as.end(),
                     [&](const morph::Analysis& a) { return a.lemma == lemma && a.rule_trace == trace; });
}

std::vector<std::string> names(const morph::RuleSet& rs, const std::vector<int>& seq) {
  std::vector<std::string> out;
  for (int r : seq) out.push_back(rs.rules[r].name);
  return out;
}

}  // namespace

TEST(Fst, ComposeAndInvert) {
  fst::SymbolTable sym;
  auto a = sym.intern("a"), b = sym.intern("b"), c = sym.intern("c");
  fst::Transducer t1, t2;
  int s0 = t1.add_state(), s1 = t1.add_state();
  t1.set_start(s0);
  t1.add_arc(s0, a, b, s1);
  t1.set_final(s1);
  int r0 = t2.add_state(), r1 = t2.add_state();
  t2.set_start(r0);
  t2.add_arc(r0, b, c, r1);
  t2.set_final(r1);
  auto comp = t1.compose(t2);
  EXPECT_EQ(comp.apply({a}), (std::vector<std::vector<fst::Symbol>>{{c}}));
  EXPECT_TRUE(comp.apply({b}).empty());
  EXPECT_EQ(comp.inverted().apply({c}), (std::vector<std::vector<fst::Symbol>>{{a}}));
}

TEST(Morph, WorkedExamples) {
  EXPECT_TRUE(has(v1().analyze("bumili"), "bili", {"um"}));
  EXPECT_TRUE(has(v1().analyze("babasa"), "basa", {"redup"}));
  EXPECT_TRUE(v1().analyze("nagluto").empty());
  auto v2_nag = v2().analyze("nagluto");
  EXPECT_TRUE(has(v2_nag, "luto", {"nag"}));
  EXPECT_EQ(v1().generate("basa", {"redup", "um"}), std::vector<std::string>{"bumabasa"});
  EXPECT_EQ(v1().generate("sulat", {"um"}), std::vector<std::string>{"sumulat"});
  EXPECT_EQ(v1().generate("inom", {"um"}), std::vector<std::string>{"uminom"});
}

TEST(Morph, InfixOnlyRuleSetOverLexicon) {
  std::string lex = "LEXICON";
  for (const auto& w : oracle::lexicon20()) lex += " " + w;
  auto m = morph::compile_rules("VERSION t\nRULE um INFIX um AFTER_ONSET\n" + lex + "\n");
  const auto& rule = m.rules().rules[0];
  for (const auto& w : oracle::lexicon20()) {
    auto expected = oracle::apply_rule(rule, w);
    ASSERT_TRUE(expected);
    EXPECT_EQ(m.generate(w, {"um"}), std::vector<std::string>{*expected}) << w;
    auto as = m.analyze(*expected);
    ASSERT_EQ(as.size(), 1u) << *expected;
    EXPECT_EQ(as[0].lemma, w);
  }
  EXPECT_TRUE(m.analyze("sumulatx").empty());
}

TEST(Morph, EmptyRuleSetWithLexiconIsIdentity) {
  auto m = morph::compile_rules("LEXICON basa\n");
  EXPECT_EQ(m.generate("basa", {}), std::vector<std::string>{"basa"});
  EXPECT_TRUE(m.generate("bili", {}).empty());
  EXPECT_TRUE(m.analyze("basa").empty());
}

class MorphInversion : public ::testing::TestWithParam<std::string> {};

// Every licensed sequence on every lexicon lemma: generation agrees with
// string surgery and analysis recovers the lemma and trace.
TEST_P(MorphInversion, AnalyzeInvertsGenerate) {
  auto rs = morph::parse_rules(read(data_file("rules/" + GetParam())));
  auto m = morph::compile_rules(rs);
  std::size_t checked = 0;
  for (const auto& seq : morph::licensed_sequences(rs)) {
    if (seq.empty()) continue;
    auto trace = names(rs, seq);
    for (const auto& w : oracle::lexicon20()) {
      auto expected = oracle::surface(rs, w, seq);
      auto got = m.generate(w, trace);
      if (!expected) {
        EXPECT_TRUE(got.empty()) << w << " " << trace.front();
        continue;
      }
      ASSERT_EQ(got, std::vector<std::string>{*expected}) << w;
      EXPECT_TRUE(has(m.analyze(*expected), w, trace)) << *expected;
      ++checked;
    }
  }
  EXPECT_GE(checked, 150u);
}

INSTANTIATE_TEST_SUITE_P(Packs, MorphInversion, ::testing::Values("v1.rules", "v2.rules"));

TEST(Morph, V2IsSupersetOfV1) {
  auto rs = morph::parse_rules(read(data_file("rules/v1.rules")));
  for (const auto& seq : morph::licensed_sequences(rs)) {
    if (seq.empty()) continue;
    for (const auto& w : oracle::lexicon20())
      for (const auto& form : v1().generate(w, names(rs, seq)))
        for (const auto& a : v1().analyze(form)) {
          auto b = v2().analyze(form);
          EXPECT_NE(std::find(b.begin(), b.end(), a), b.end()) << form;
        }
  }
}

TEST(Morph, CompositionCycleIsRejected) {
  EXPECT_THROW(morph::compile_rules("RULE redup REDUP CV\nCOMPOSE redup redup\n"), DataError);
  EXPECT_THROW(morph::compile_rules("RULE a PREFIX a\nRULE b PREFIX b\nCOMPOSE a b\nCOMPOSE b a\n"), DataError);
}

TEST(Morph, SyntaxErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      morph::parse_rules(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("VERSION x\nRULE um INFIX\n"), 2u);
  EXPECT_EQ(line_of("RULE a PREFIX a\nRULE a PREFIX b\n"), 2u);
  EXPECT_EQ(line_of("# c\n\nRULE a CIRCUMFIX a\n"), 3u);
  EXPECT_EQ(line_of("COMPOSE x y\n"), 1u);
  EXPECT_EQ(line_of("RULE a PREFIX a EMIT\n"), 1u);
  EXPECT_EQ(line_of("RULE a PREFIX a POS VERBY\n"), 1u);
}

TEST(Morph, CompilationIsDeterministicAndSerializable) {
  auto text = read(data_file("rules/v2.rules"));
  auto a = morph::compile_rules(text), b = morph::compile_rules(text);
  EXPECT_EQ(a.serialize(), b.serialize());
  auto back = morph::Morphology::deserialize(a.serialize());
  EXPECT_TRUE(back == a);
  EXPECT_EQ(back.analyze("bumabasa").size(), a.analyze("bumabasa").size());
}

TEST(Morph, DisambiguationAndGating) {
  auto cands = v1().analyze("bumabasa");
  auto best = morph::disambiguate(cands, "bumabasa");
  EXPECT_EQ(best.lemma, "basa");
  EXPECT_EQ(best.rule_trace, (std::vector<std::string>{"redup", "um"}));
  EXPECT_EQ(best.feats.get("Aspect"), "Imp");
  EXPECT_EQ(morph::disambiguate({}, "Bahay").lemma, "bahay");

  auto s = sentence({"Bumili", "bumili"});
  s.tokens[0].upos = "VERB";
  s.tokens[1].upos = "NOUN";
  auto gated = morph::annotate_sentence(s, v1(), true);
  EXPECT_EQ(gated.tokens[0].lemma, "bili");
  EXPECT_EQ(gated.tokens[1].lemma, "bumili");
  EXPECT_TRUE(gated.tokens[1].feats.empty());
  auto open = morph::annotate_sentence(s, v1(), false);
  EXPECT_EQ(open.tokens[1].lemma, "bili");
}
