// Runs the acceptance checks and prints one PASS/FAIL line per criterion.

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <string>
#include <variant>

#include "common.hpp"
#include "oracles.hpp"
#include "udkit/aligner.hpp"
#include "udkit/augment.hpp"
#include "udkit/evaluator.hpp"
#include "udkit/morph.hpp"
#include "udkit/parser.hpp"
#include "udkit/pipeline.hpp"
#include "udkit/tagger.hpp"
#include "zero_shot.hpp"

using namespace udkit;
using namespace testing_support;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

Outcome roundtrip() {
  std::size_t files = 0;
  std::string bad;
  double t = seconds([&] {
    for (const auto& name : conllu_fixtures()) {
      auto text = read(fixture(name));
      if (write_conllu(parse_conllu(text)) != text) bad = name;
      ++files;
    }
  });
  auto fig1 = load("fig1.conllu");
  if (!bad.empty()) return fail(bad + " differs");
  if (fig1.size() != 1 || fig1.sentences[0].size() != 8) return fail("fig1 transcription has wrong shape");
  if (t >= 1.0) return fail("took " + std::to_string(t) + " s");
  return {true, std::to_string(files) + " files byte-identical in " + text::format_fixed(t * 1000, 1) + " ms"};
}

Outcome identity_and_degradation() {
  for (const auto& name : conllu_fixtures()) {
    auto tb = load(name);
    for (const auto& m : eval::score(tb, tb).metrics)
      if (text::format_fixed(m.f1(), 2) != "100.00") return fail(name + " " + m.name + " below 100");
  }
  Rng rng(99);
  std::size_t n = 0;
  for (const auto& name : tree_fixtures()) {
    auto gold = load(name);
    auto sys = gold;
    auto prev = eval::score(gold, sys);
    const int rounds = name == "edu94.conllu" ? 600 : 60;
    for (int i = 0; i < rounds; ++i, ++n) {
      auto c = oracle::corrupt(sys, gold, rng);
      auto now = eval::score(gold, sys);
      if (now.metrics[c.metric].f1() > prev.metrics[c.metric].f1() + 1e-12)
        return fail(name + ": " + now.metrics[c.metric].name + " increased after corruption");
      prev = now;
    }
  }
  return {true, "8 metrics at 100.00 on all fixtures; " + std::to_string(n) + " corruptions, no increase"};
}

Outcome fig3_oracle() {
  auto r = eval::score(load("fig3_gold.conllu"), load("fig3_zero_shot.conllu"));
  double uas = r.uas().f1(), las = r.las().f1();
  std::string d = "UAS " + text::format_fixed(uas, 2) + ", LAS " + text::format_fixed(las, 2);
  if (std::abs(uas - 54.55) > 0.01 || std::abs(las - 27.27) > 0.01) return fail(d);
  return {true, d};
}

Outcome mst_oracle() {
  Rng rng(2024);
  int agree = 0;
  double t = seconds([&] {
    for (int trial = 0; trial < 1000; ++trial) {
      int n = 1 + static_cast<int>(rng.index(5));
      auto g = oracle::random_digraph(rng, n);
      auto arcs = decode_mst(g);
      auto s = oracle::matrix_of(ensure_reachable(g));
      if (oracle::is_arborescence(n, arcs) &&
          std::abs(oracle::weight_of(s, arcs) - oracle::best_arborescence_weight(s)) < 1e-9)
        ++agree;
    }
  });
  std::string d = std::to_string(agree) + "/1000 agree in " + text::format_fixed(t, 2) + " s";
  if (agree != 1000 || t >= 10) return fail(d);
  return {true, d};
}

Outcome identity_projection() {
  std::size_t sents = 0, tags = 0, heads = 0;
  for (const auto& name : tree_fixtures())
    for (const auto& s : load(name).sentences) {
      auto d = oracle::identity_projection(s);
      tags += d.tags;
      heads += d.heads;
      ++sents;
    }
  std::string d = std::to_string(sents) + " sentences, " + std::to_string(tags + heads) + " discrepancies";
  if (tags + heads) return fail(d);
  return {true, d};
}

Outcome em_alignment() {
  std::vector<align::ParallelPair> two;
  for (int i = 0; i < 100; ++i) two.push_back({{"a", "b"}, {"x", "y"}, ""});
  for (int i = 0; i < 100; ++i) two.push_back({{"a"}, {"x"}, ""});
  std::vector<align::ParallelPair> noisy;
  Rng rng(3);
  for (int i = 0; i < 150; ++i) {
    align::ParallelPair p;
    auto n = 1 + rng.index(6);
    for (std::size_t k = 0; k < n; ++k) {
      auto w = rng.index(12);
      p.source_tokens.push_back("s" + std::to_string(w));
      if (rng.index(10) > 0) p.target_tokens.push_back("t" + std::to_string(w));
    }
    if (p.target_tokens.empty()) p.target_tokens.push_back("t0");
    noisy.push_back(p);
  }
  auto parallel = align::read_parallel(read(fixture("parallel.en")), read(fixture("parallel.tl")));
  for (const auto* c : {&two, &noisy, &parallel}) {
    auto ll = align::train_aligner(*c, 10).log_likelihood;
    for (std::size_t i = 1; i < ll.size(); ++i)
      if (ll[i] < ll[i - 1] - 1e-9) return fail("log-likelihood decreased at iteration " + std::to_string(i));
  }
  auto r = align::train_aligner(two, 5);
  double p = r.table.prob("a", "x");
  std::string d = "3 corpora monotone over 10 iterations; t(x|a) = " + text::format_fixed(p, 6) + " after 5";
  if (p < 0.8 || std::abs(p - 0.877597937026) > 1e-9) return fail(d);
  return {true, d};
}

Outcome pos_voting() {
  const std::vector<std::string> tags = {"ADJ", "NOUN", "PROPN", "VERB"};
  const std::vector<double> confs = {0.25, 0.5, 0.75, 1.0};
  std::size_t cases = 0;
  for (int links = 1; links <= 4; ++links) {
    int combos = 1;
    for (int i = 0; i < links; ++i) combos *= 16;
    for (int code = 0; code < combos; ++code, ++cases) {
      std::vector<std::pair<std::string, double>> votes;
      std::vector<project::ProjectionGroup> groups(2);
      for (auto& g : groups) g.pair.target_tokens = {"t"};
      int c = code;
      for (int i = 0; i < links; ++i, c /= 16) {
        votes.emplace_back(tags[c % 4], confs[(c / 4) % 4]);
        auto& g = groups[i % 2];
        int src = static_cast<int>(g.pair.source_tokens.size());
        g.pair.source_tokens.push_back("s");
        g.annotation.tags.push_back(project::TagWithConfidence{votes.back().first, votes.back().second});
        g.links.push_back({src, 0, 1.0});
      }
      if (project::project_pos(groups)[0] != oracle::vote(votes)) return fail("case " + std::to_string(cases));
    }
  }
  return {true, std::to_string(cases) + " cases match brute force"};
}

Outcome fst_inversion() {
  auto rs1 = morph::parse_rules(read(data_file("rules/v1.rules")));
  auto v1 = morph::compile_rules(rs1);
  auto v2 = morph::compile_rules(read(data_file("rules/v2.rules")));
  std::size_t forms = 0, recovered = 0, analyses = 0;
  for (const auto& seq : morph::licensed_sequences(rs1)) {
    if (seq.empty()) continue;
    std::vector<std::string> trace;
    for (int r : seq) trace.push_back(rs1.rules[r].name);
    for (const auto& w : oracle::lexicon20()) {
      auto expected = oracle::surface(rs1, w, seq);
      auto got = v1.generate(w, trace);
      if (!expected) {
        if (!got.empty()) return fail("generated " + got[0] + " where no form exists");
        continue;
      }
      if (got != std::vector<std::string>{*expected}) return fail("generation of " + w + " disagrees");
      ++forms;
      auto as = v1.analyze(*expected);
      for (const auto& a : as) {
        if (a.lemma == w && a.rule_trace == trace) {
          ++recovered;
          break;
        }
      }
      auto bs = v2.analyze(*expected);
      for (const auto& a : as) {
        ++analyses;
        if (std::find(bs.begin(), bs.end(), a) == bs.end()) return fail("v2 misses an analysis of " + *expected);
      }
    }
  }
  std::string d = std::to_string(recovered) + "/" + std::to_string(forms) + " forms recovered; " +
                  std::to_string(analyses) + " v1 analyses all in v2";
  if (recovered != forms || forms == 0) return fail(d);
  return {true, d};
}

Outcome augmentation() {
  auto tb = load("edu94.conllu");
  std::size_t e = 0;
  for (const auto& s : tb.sentences) e += std::holds_alternative<augment::ClauseSpans>(augment::find_eligible(s));
  auto out = augment::augment_treebank(tb, augment::Mode::kRotate);
  if (out.size() != tb.size() + 2 * e) return fail("emitted " + std::to_string(out.size()));
  std::map<std::string, const AnnotatedSentence*> by_id;
  for (const auto& s : tb.sentences) by_id[*s.metadata("sent_id")] = &s;
  for (std::size_t i = tb.size(); i < out.size(); ++i) {
    const auto& m = out.sentences[i];
    if (!is_valid_tree(m)) return fail("invalid morph");
    auto prov = *m.metadata("morph");
    if (dependency_triples(m) != dependency_triples(*by_id.at(prov.substr(0, prov.find(':')))))
      return fail("triples changed in " + prov);
  }
  auto vso = load("vso.conllu").sentences[0];
  auto rot = augment::rotate(vso, std::get<augment::ClauseSpans>(augment::find_eligible(vso)));
  auto forms = [](const AnnotatedSentence& s) {
    std::vector<std::string> f;
    for (const auto& t : s.tokens) f.push_back(t.form);
    return f;
  };
  if (forms(rot.at(0)) != forms(load("svo.conllu").sentences[0]) ||
      forms(rot.at(1)) != forms(load("vos.conllu").sentences[0]))
    return fail("VSO rotation differs from the SVO/VOS fixtures");
  return {true, "|tb| = " + std::to_string(tb.size()) + ", E = " + std::to_string(e) + ", emitted " +
                    std::to_string(out.size()) + "; toy rotations match"};
}

Outcome separability() {
  Treebank toy;
  for (const char* f : {"vso.conllu", "svo.conllu", "vos.conllu"}) toy.sentences.push_back(load(f).sentences[0]);
  auto copy = parse_conllu(
      "1\tang\t_\tDET\t_\t_\t2\tdet\t_\t_\n"
      "2\taso\t_\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
      "3\ttumakbo\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
      "4\t.\t_\tPUNCT\t_\t_\t3\tpunct\t_\t_\n\n");
  Treebank copies;
  for (int i = 0; i < 50; ++i) copies.sentences.push_back(copy.sentences[0]);
  for (const auto* data : {&toy, &copies}) {
    auto tm = tagger::train_tagger(*data, {10, 1});
    auto pm = parser::train_parser(*data, {10, 1, 50});
    for (const auto& s : data->sentences) {
      auto t = tagger::tag(s, tm);
      auto h = pm.predict_heads(s);
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (t.tokens[k].upos != s.tokens[k].upos) return fail("tagger error in training data");
        if (h[k] != *s.tokens[k].head) return fail("parser error in training data");
      }
    }
    if (tagger::train_tagger(*data, {10, 1}).serialize() != tm.serialize()) return fail("tagger not deterministic");
    if (parser::train_parser(*data, {10, 1, 50}).serialize() != pm.serialize()) return fail("parser not deterministic");
  }
  return {true, "100% training accuracy on synthetic fixtures; identical models per seed"};
}

Outcome cross_validation() {
  auto tb = load("edu94.conllu");
  auto plan = eval::make_folds(tb, 10, 1);
  for (auto s : plan.sizes())
    if (s != 9 && s != 10) return fail("fold of size " + std::to_string(s));
  std::set<std::size_t> seen;
  for (int f = 0; f < 10; ++f)
    for (auto i : plan.members(f)) seen.insert(i);
  if (seen.size() != 94) return fail("folds do not partition the treebank");
  auto copy = eval::cross_validate(
      tb, 10, 1, [](const Treebank&) { return 0; }, [](int, const Treebank& h) { return h; });
  for (const auto& f : copy.folds)
    for (const auto& m : f.metrics)
      if (m.f1() != 100.0) return fail("copy-gold fold below 100");
  struct Models {
    tagger::TaggerModel t;
    parser::ParserModel p;
  };
  auto train = [](const Treebank& tr) { return Models{tagger::train_tagger(tr), parser::train_parser(tr)}; };
  auto annotate = [](const Models& m, const Treebank& held) {
    return parser::parse_treebank(tagger::tag_treebank(eval::strip_annotations(held), m.t), m.p);
  };
  std::string a, b;
  double t = seconds([&] { a = eval::cross_validate(tb, 10, 1, train, annotate).to_tsv(); });
  b = eval::cross_validate(tb, 10, 1, train, annotate).to_tsv();
  if (a != b) return fail("CV not deterministic");
  if (t >= 60) return fail("CV took " + std::to_string(t) + " s");
  return {true, "94 sentences / " + std::to_string(tb.word_count()) + " words in folds of 9-10; copy-gold 100.00; " +
                    "trained CV deterministic in " + text::format_fixed(t, 1) + " s"};
}

Outcome zero_shot() {
  TempDir tmp;
  auto ws = prepare_zero_shot(tmp.path());
  auto cfg = pipeline::load_config(ws.config);
  if (cfg.treebank) return fail("config declares a treebank");
  // Every input the config names lives in the sandbox, away from the annotated fixture.
  for (const auto& p : {cfg.segmenter_text, cfg.tagged_corpus, cfg.tag_map, cfg.rules, cfg.parser_data})
    if (!p || p->string().rfind(tmp.path().string(), 0) != 0) return fail("config path outside the sandbox");
  if (std::filesystem::exists(tmp / "inputs" / "zs_raw_gold.conllu")) return fail("gold treebank in sandbox");
  try {
    pipeline::parse_config(read(ws.config) + "\n[treebank]\npath = \"x.conllu\"\n", tmp.path());
    return fail("treebank accepted in zero_shot mode");
  } catch (const DataError& e) {
    if (std::string(e.what()).find("mode violation") == std::string::npos) return fail(e.what());
  }
  auto p = pipeline::build(cfg);
  auto out = pipeline::run(p, read(ws.raw));
  std::size_t valid = 0;
  for (const auto& s : out.sentences) valid += is_valid_tree(s);
  std::string d = std::to_string(valid) + "/" + std::to_string(out.size()) + " output sentences are valid trees";
  if (valid != out.size() || out.size() == 0) return fail(d);
  return {true, d};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"CoNLL-U round-trip", roundtrip},
      {"Evaluator identity and degradation", identity_and_degradation},
      {"Evaluator oracle on the worked example", fig3_oracle},
      {"MST matches exhaustive enumeration", mst_oracle},
      {"Identity projection fixed point", identity_projection},
      {"EM alignment", em_alignment},
      {"POS projection voting", pos_voting},
      {"FST inversion and pack monotonicity", fst_inversion},
      {"Augmentation", augmentation},
      {"Learner separability and determinism", separability},
      {"Cross-validation", cross_validation},
      {"End-to-end zero-shot", zero_shot},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    failed += !o.ok;
    std::printf("%s %2zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", checks.size() - failed, checks.size());
  return failed ? 1 : 0;
}
