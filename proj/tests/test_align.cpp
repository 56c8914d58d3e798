#include <gtest/gtest.h>

#include "common.hpp"
#include "udkit/aligner.hpp"
#include "udkit/rng.hpp"

using namespace udkit;
using namespace testing_support;

namespace {

std::vector<align::ParallelPair> two_type_corpus() {
  std::vector<align::ParallelPair> c;
  for (int i = 0; i < 100; ++i) c.push_back({{"a", "b"}, {"x", "y"}, "src"});
  for (int i = 0; i < 100; ++i) c.push_back({{"a"}, {"x"}, "src"});
  return c;
}

std::vector<align::ParallelPair> random_corpus(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<align::ParallelPair> c;
  for (int i = 0; i < 150; ++i) {
    align::ParallelPair p;
    auto n = 1 + rng.index(6);
    for (std::size_t k = 0; k < n; ++k) {
      auto w = rng.index(12);
      p.source_tokens.push_back("s" + std::to_string(w));
      // Noisy word-for-word translation with occasional drops and insertions.
      if (rng.index(10) > 0) p.target_tokens.push_back("t" + std::to_string(w));
      if (rng.index(8) == 0) p.target_tokens.push_back("t" + std::to_string(rng.index(12)));
    }
    if (p.target_tokens.empty()) p.target_tokens.push_back("t0");
    c.push_back(p);
  }
  return c;
}

void expect_non_decreasing(const std::vector<double>& ll) {
  for (std::size_t i = 1; i < ll.size(); ++i) EXPECT_GE(ll[i], ll[i - 1] - 1e-9) << "iteration " << i;
}

}  // namespace

// Reference values from an independent numpy EM implementation.
TEST(Aligner, MatchesReferenceEm) {
  auto r = align::train_aligner(two_type_corpus(), 5);
  EXPECT_NEAR(r.table.prob("a", "x"), 0.877597937026, 1e-9);
  EXPECT_NEAR(r.table.prob("a", "y"), 0.122402062974, 1e-9);
  std::vector<double> ref = {-207.944154168, -180.792440608, -172.284088666,
                             -165.800610325, -161.078845595, -157.727473749};
  ASSERT_EQ(r.log_likelihood.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(r.log_likelihood[i], ref[i], 1e-6) << i;
  EXPECT_GE(r.table.prob("a", "x"), 0.8);
}

TEST(Aligner, LogLikelihoodNeverDecreases) {
  expect_non_decreasing(align::train_aligner(two_type_corpus(), 10).log_likelihood);
  auto parallel = align::read_parallel(read(fixture("parallel.en")), read(fixture("parallel.tl")), "en");
  expect_non_decreasing(align::train_aligner(parallel, 10).log_likelihood);
  expect_non_decreasing(align::train_aligner(random_corpus(3), 10).log_likelihood);
}

TEST(Aligner, CorpusLogLikelihoodAgreesWithTraining) {
  auto c = two_type_corpus();
  auto r = align::train_aligner(c, 3);
  EXPECT_NEAR(align::corpus_log_likelihood(c, r.table), r.log_likelihood.back(), 1e-6);
}

TEST(Aligner, TranslationRowsSumToOne) {
  auto r = align::train_aligner(random_corpus(11), 5);
  for (const auto& [s, row] : r.table.entries()) {
    double sum = 0;
    for (const auto& [t, p] : row) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-9) << s;
  }
}

TEST(Aligner, LinksFollowPosteriorAndNullRule) {
  align::LexTable t;
  t.set("a", "x", 0.9);
  t.set("b", "x", 0.1);
  t.set("b", "y", 0.2);
  t.set(std::string(align::kNullWord), "y", 0.5);
  t.set(std::string(align::kNullWord), "x", 0.01);
  align::ParallelPair p{{"a", "b"}, {"x", "y", "z"}, ""};
  auto links = align::align(p, t);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].src_index, 0);
  EXPECT_EQ(links[0].tgt_index, 0);
  EXPECT_NEAR(links[0].prob, 0.9 / 1.01, 1e-12);
  EXPECT_TRUE(align::align(p, t, 0.95).empty());
}

TEST(Aligner, TiesGoLeftmost) {
  align::LexTable t;
  t.set("a", "x", 0.5);
  auto links = align::align({{"a", "a"}, {"x"}, ""}, t);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].src_index, 0);
}

TEST(Aligner, TableRoundTrip) {
  auto r = align::train_aligner(two_type_corpus(), 5);
  auto back = align::LexTable::deserialize(r.table.serialize());
  EXPECT_NEAR(back.prob("a", "x"), r.table.prob("a", "x"), 1e-15);
  EXPECT_EQ(back.serialize(), r.table.serialize());
}

TEST(Aligner, Errors) {
  EXPECT_THROW(align::read_parallel("a\nb\n", "x\n"), DataError);
  EXPECT_THROW(align::LexTable::deserialize("nope\n"), ParseError);
  EXPECT_THROW(align::train_aligner({}, 5), DataError);
}
