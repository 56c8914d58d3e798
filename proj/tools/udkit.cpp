// udkit command-line interface.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "udkit/aligner.hpp"
#include "udkit/augment.hpp"
#include "udkit/config.hpp"
#include "udkit/conllu.hpp"
#include "udkit/delex.hpp"
#include "udkit/error.hpp"
#include "udkit/evaluator.hpp"
#include "udkit/morph.hpp"
#include "udkit/parser.hpp"
#include "udkit/pipeline.hpp"
#include "udkit/projection.hpp"
#include "udkit/segmenter.hpp"
#include "udkit/tag_convert.hpp"
#include "udkit/tagger.hpp"

namespace fs = std::filesystem;
using udkit::pipeline::read_file;
using udkit::pipeline::write_file;

namespace {

udkit::Treebank read_tb(const std::string& path) { return udkit::parse_conllu(read_file(path), path); }

struct Args {
  std::string in, out, model, rules, gold, sys, config, mode = "rotate", corpus, map, report, labeler, links;
  std::string src_text, tgt_text;
  std::vector<std::string> src_conllu, aligners, parallel;
  std::uint64_t seed = 1;
  int epochs = 10, iters = 5, k = 10, trees = 50;
  double floor = udkit::align::kDefaultLinkFloor, min_ratio = 0.5;
  bool no_punct = false, no_gate = false, keep = false;
  std::optional<std::string> pipeline_cfg;
  std::vector<std::string> words;
};

// ---- project --------------------------------------------------------------

std::vector<udkit::project::SourceCorpus> load_sources(const Args& a) {
  if (a.parallel.size() % 2 != 0) throw udkit::DataError("--parallel takes source and target files");
  const std::size_t n = a.parallel.size() / 2;
  if (n == 0) throw udkit::DataError("at least one --parallel pair is required");
  if (a.aligners.size() != n) throw udkit::DataError("give one --aligner per --parallel pair");
  std::vector<udkit::project::SourceCorpus> out;
  for (std::size_t i = 0; i < n; ++i) {
    udkit::project::SourceCorpus s;
    s.lang = "src" + std::to_string(i + 1);
    s.pairs = udkit::align::read_parallel(read_file(a.parallel[2 * i]), read_file(a.parallel[2 * i + 1]), s.lang);
    auto table = udkit::align::LexTable::deserialize(read_file(a.aligners[i]));
    for (const auto& p : s.pairs) s.links.push_back(udkit::align::align(p, table, a.floor));
    if (i < a.src_conllu.size()) s.annotated = read_tb(a.src_conllu[i]);
    out.push_back(std::move(s));
  }
  return out;
}

void dump_links(const std::vector<udkit::project::SourceCorpus>& sources, const std::string& path) {
  std::ostringstream os;
  os << "source\tsent_id\tsrc\ttgt\tprob\n";
  for (const auto& s : sources)
    for (std::size_t i = 0; i < s.links.size(); ++i)
      for (const auto& l : s.links[i])
        os << s.lang << '\t' << (i + 1) << '\t' << l.src_index << '\t' << l.tgt_index << '\t'
           << udkit::text::format_double(l.prob) << '\n';
  write_file(path, os.str());
}

// ---- cv -------------------------------------------------------------------

udkit::eval::CvResult run_cv(const Args& a) {
  auto tb = read_tb(a.in);
  udkit::eval::ScoreOptions so{a.no_punct};
  if (a.pipeline_cfg) {
    auto cfg = udkit::pipeline::load_config(*a.pipeline_cfg);
    cfg.seed = a.seed;
    const fs::path base = cfg.work_dir;
    int fold = 0;
    return udkit::eval::cross_validate(
        tb, a.k, a.seed,
        [&](const udkit::Treebank& train) {
          auto c = cfg;
          c.work_dir = base / ("fold" + std::to_string(++fold));
          return udkit::pipeline::build(c, &train);
        },
        [&](const udkit::pipeline::Pipeline& p, const udkit::Treebank& held) {
          return udkit::pipeline::run(p, udkit::pipeline::raw_text(held));
        },
        so);
  }
  struct Models {
    udkit::tagger::TaggerModel tagger;
    udkit::parser::ParserModel parser;
  };
  return udkit::eval::cross_validate(
      tb, a.k, a.seed,
      [&](const udkit::Treebank& train) {
        return Models{udkit::tagger::train_tagger(train, {a.epochs, a.seed}),
                      udkit::parser::train_parser(train, {a.epochs, a.seed, a.trees})};
      },
      [&](const Models& m, const udkit::Treebank& held) {
        auto tagged = udkit::tagger::tag_treebank(udkit::eval::strip_annotations(held), m.tagger);
        return udkit::parser::parse_treebank(tagged, m.parser);
      },
      so);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"udkit: Universal Dependencies annotation for low-resource languages"};
  app.require_subcommand(1);
  Args a;

  auto seed_epochs = [&](CLI::App* c) {
    c->add_option("--seed", a.seed, "random seed");
    c->add_option("--epochs", a.epochs, "training epochs")->check(CLI::PositiveNumber);
  };

  // segmenter
  auto* seg = app.add_subcommand("segmenter", "sentence and word segmentation")->require_subcommand(1);
  auto* seg_train = seg->add_subcommand("train", "train a boundary model on raw text");
  seg_train->add_option("--in", a.in, "raw text")->required();
  seg_train->add_option("--out", a.out, "model file")->required();
  auto* seg_run = seg->add_subcommand("run", "segment raw text into CoNLL-U");
  seg_run->add_option("--model", a.model)->required();
  seg_run->add_option("--in", a.in)->required();
  seg_run->add_option("--out", a.out)->required();

  // tagger
  auto* tag = app.add_subcommand("tagger", "tag conversion and POS tagging")->require_subcommand(1);
  auto* tag_conv = tag->add_subcommand("convert", "map a tagged corpus to UD tags");
  tag_conv->add_option("--corpus", a.corpus, "form/TAG lines or two-column TSV")->required();
  tag_conv->add_option("--map", a.map, "tag mapping table")->required();
  tag_conv->add_option("--out", a.out, "CoNLL-U output")->required();
  tag_conv->add_option("--report", a.report, "unmapped tag report (TSV)");
  auto* tag_train = tag->add_subcommand("train", "train a tagger");
  tag_train->add_option("--in", a.in)->required();
  tag_train->add_option("--out", a.out)->required();
  seed_epochs(tag_train);
  auto* tag_run = tag->add_subcommand("run", "tag a CoNLL-U file");
  tag_run->add_option("--model", a.model)->required();
  tag_run->add_option("--in", a.in)->required();
  tag_run->add_option("--out", a.out)->required();

  // morph
  auto* mor = app.add_subcommand("morph", "finite-state morphology")->require_subcommand(1);
  auto* mor_compile = mor->add_subcommand("compile", "compile a rule file");
  mor_compile->add_option("--rules", a.rules)->required();
  mor_compile->add_option("--out", a.out)->required();
  auto* mor_run = mor->add_subcommand("run", "fill lemmas and features");
  mor_run->add_option("--fst", a.model)->required();
  mor_run->add_option("--in", a.in)->required();
  mor_run->add_option("--out", a.out)->required();
  mor_run->add_flag("--no-gate", a.no_gate, "ignore UPOS restrictions of rules");
  auto* mor_an = mor->add_subcommand("analyze", "print analyses of words");
  mor_an->add_option("--fst", a.model)->required();
  mor_an->add_option("words", a.words)->required();

  // parser
  auto* par = app.add_subcommand("parser", "dependency parsing")->require_subcommand(1);
  auto* par_train = par->add_subcommand("train", "train a parser");
  par_train->add_option("--in", a.in)->required();
  par_train->add_option("--out", a.out)->required();
  par_train->add_option("--trees", a.trees, "labeler trees")->check(CLI::PositiveNumber);
  seed_epochs(par_train);
  auto* par_run = par->add_subcommand("run", "parse a tagged CoNLL-U file");
  par_run->add_option("--model", a.model)->required();
  par_run->add_option("--in", a.in)->required();
  par_run->add_option("--out", a.out)->required();

  // project
  auto* prj = app.add_subcommand("project", "word alignment and annotation projection")->require_subcommand(1);
  auto* prj_align = prj->add_subcommand("align", "train an alignment table");
  prj_align->add_option("--parallel", a.parallel, "source and target files")->expected(2)->required();
  prj_align->add_option("--iters", a.iters)->check(CLI::PositiveNumber);
  prj_align->add_option("--out", a.out)->required();
  auto add_sources = [&](CLI::App* c) {
    c->add_option("--parallel", a.parallel, "source and target files (repeatable)")->expected(2)->required();
    c->add_option("--aligner", a.aligners, "alignment table per --parallel (repeatable)")->required();
    c->add_option("--floor", a.floor, "minimum link posterior");
    c->add_option("--links", a.links, "dump links as TSV");
  };
  auto* prj_pos = prj->add_subcommand("pos", "project POS tags");
  prj_pos->add_option("--src-conllu", a.src_conllu, "tagged source side (repeatable)")->required();
  add_sources(prj_pos);
  prj_pos->add_option("--min-ratio", a.min_ratio, "minimum tagged fraction per sentence");
  prj_pos->add_option("--out", a.out)->required();
  auto* prj_tree = prj->add_subcommand("tree", "project dependency trees");
  prj_tree->add_option("--src-conllu", a.src_conllu, "parsed source side (repeatable)")->required();
  add_sources(prj_tree);
  prj_tree->add_option("--labeler", a.labeler, "labeler model")->required();
  prj_tree->add_option("--out", a.out)->required();
  auto* prj_sel = prj->add_subcommand("select", "rank target sentences by alignment coverage");
  add_sources(prj_sel);
  prj_sel->add_option("--k", a.k)->required()->check(CLI::NonNegativeNumber);
  prj_sel->add_option("--out", a.out, "line<TAB>coverage")->required();

  // augment
  auto* aug = app.add_subcommand("augment", "tree rotation and cropping");
  aug->add_option("--in", a.in)->required();
  aug->add_option("--mode", a.mode, "rotate or rotate+crop");
  aug->add_option("--out", a.out)->required();

  // label
  auto* lab = app.add_subcommand("label", "delexicalized dependency labels")->require_subcommand(1);
  auto* lab_train = lab->add_subcommand("train", "train a labeler");
  lab_train->add_option("--in", a.in)->required();
  lab_train->add_option("--out", a.out)->required();
  lab_train->add_option("--trees", a.trees)->check(CLI::PositiveNumber);
  lab_train->add_option("--seed", a.seed);
  auto* lab_apply = lab->add_subcommand("apply", "label arcs of a CoNLL-U file");
  lab_apply->add_option("--model", a.model)->required();
  lab_apply->add_option("--in", a.in)->required();
  lab_apply->add_option("--out", a.out)->required();

  // eval
  auto* ev = app.add_subcommand("eval", "score a system file against gold");
  ev->add_option("--gold", a.gold)->required();
  ev->add_option("--sys", a.sys)->required();
  ev->add_flag("--no-punct", a.no_punct, "leave PUNCT out of UAS/LAS");
  ev->add_option("--out", a.out, "report TSV (stdout if omitted)");

  // cv
  auto* cv = app.add_subcommand("cv", "k-fold cross-validation");
  cv->add_option("--in", a.in)->required();
  cv->add_option("--k", a.k)->check(CLI::PositiveNumber);
  cv->add_option("--pipeline", a.pipeline_cfg, "pipeline config; default trains tagger and parser on gold tokens");
  cv->add_flag("--no-punct", a.no_punct);
  cv->add_option("--out", a.out, "fold report TSV (stdout if omitted)");
  seed_epochs(cv);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "end-to-end pipelines")->require_subcommand(1);
  auto* pipe_build = pipe->add_subcommand("build", "train and persist all stages");
  pipe_build->add_option("--config", a.config)->required();
  auto* pipe_run = pipe->add_subcommand("run", "annotate raw text");
  pipe_run->add_option("--config", a.config)->required();
  pipe_run->add_option("--in", a.in)->required();
  pipe_run->add_option("--out", a.out)->required();
  pipe_run->add_flag("--keep-intermediate", a.keep, "write per-stage CoNLL-U next to the output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (seg_train->parsed()) {
      write_file(a.out, udkit::punkt::train_boundary_model(read_file(a.in)).serialize());
    } else if (seg_run->parsed()) {
      auto m = udkit::punkt::BoundaryModel::deserialize(read_file(a.model));
      write_file(a.out, udkit::write_conllu(udkit::punkt::segment_to_treebank(read_file(a.in), m)));
    } else if (tag_conv->parsed()) {
      auto conv = udkit::tags::convert_corpus(udkit::tags::read_tagged_corpus(read_file(a.corpus)),
                                              udkit::tags::load_tag_map(read_file(a.map)));
      write_file(a.out, udkit::write_conllu(conv.treebank));
      if (!a.report.empty()) write_file(a.report, conv.report.to_tsv());
      for (const auto& u : conv.report.unmapped)
        std::cerr << "unmapped " << u.source_tag << " x" << u.count << " -> " << u.mapped_to << '\n';
    } else if (tag_train->parsed()) {
      write_file(a.out, udkit::tagger::train_tagger(read_tb(a.in), {a.epochs, a.seed}).serialize());
    } else if (tag_run->parsed()) {
      auto m = udkit::tagger::TaggerModel::deserialize(read_file(a.model));
      write_file(a.out, udkit::write_conllu(udkit::tagger::tag_treebank(read_tb(a.in), m)));
    } else if (mor_compile->parsed()) {
      write_file(a.out, udkit::morph::compile_rules(read_file(a.rules)).serialize());
    } else if (mor_run->parsed()) {
      auto m = udkit::morph::Morphology::deserialize(read_file(a.model));
      write_file(a.out, udkit::write_conllu(udkit::morph::annotate_treebank(read_tb(a.in), m, !a.no_gate)));
    } else if (mor_an->parsed()) {
      auto m = udkit::morph::Morphology::deserialize(read_file(a.model));
      for (const auto& w : a.words) {
        auto res = m.analyze(w);
        if (res.empty()) std::cout << w << "\t-\n";
        for (const auto& r : res) {
          std::cout << w << '\t' << r.lemma << '\t';
          for (std::size_t i = 0; i < r.rule_trace.size(); ++i) std::cout << (i ? "+" : "") << r.rule_trace[i];
          std::cout << '\t' << (r.feats.empty() ? "_" : r.feats.str()) << '\n';
        }
      }
    } else if (par_train->parsed()) {
      write_file(a.out, udkit::parser::train_parser(read_tb(a.in), {a.epochs, a.seed, a.trees}).serialize());
    } else if (par_run->parsed()) {
      auto m = udkit::parser::ParserModel::deserialize(read_file(a.model));
      write_file(a.out, udkit::write_conllu(udkit::parser::parse_treebank(read_tb(a.in), m)));
    } else if (prj_align->parsed()) {
      auto corpus = udkit::align::read_parallel(read_file(a.parallel[0]), read_file(a.parallel[1]));
      auto r = udkit::align::train_aligner(corpus, a.iters);
      write_file(a.out, r.table.serialize());
      for (std::size_t i = 0; i < r.log_likelihood.size(); ++i)
        std::cerr << "iteration " << i << " log-likelihood " << r.log_likelihood[i] << '\n';
    } else if (prj_pos->parsed() || prj_tree->parsed()) {
      if (a.src_conllu.size() * 2 != a.parallel.size())
        throw udkit::DataError("give one --src-conllu per --parallel pair");
      auto sources = load_sources(a);
      if (!a.links.empty()) dump_links(sources, a.links);
      std::optional<udkit::delex::Labeler> lab;
      if (prj_tree->parsed()) lab = udkit::delex::Labeler::deserialize(read_file(a.labeler));
      auto kind = prj_tree->parsed() ? udkit::project::ProjectionKind::kTree : udkit::project::ProjectionKind::kPos;
      auto res = udkit::project::project_corpus(sources, kind, lab ? &*lab : nullptr, a.min_ratio);
      write_file(a.out, udkit::write_conllu(res.treebank));
      std::cerr << res.treebank.size() << " of " << res.coverage.size() << " sentences projected\n";
    } else if (prj_sel->parsed()) {
      auto sources = load_sources(a);
      if (!a.links.empty()) dump_links(sources, a.links);
      std::vector<double> cov;
      for (std::size_t i = 0; i < sources[0].pairs.size(); ++i) {
        std::map<std::string, std::pair<udkit::align::ParallelPair, std::vector<udkit::align::AlignmentLink>>> per;
        for (const auto& s : sources) per[s.lang] = {s.pairs[i], s.links[i]};
        cov.push_back(udkit::project::score_coverage(per));
      }
      std::ostringstream os;
      os << "line\tcoverage\n";
      for (auto i : udkit::project::select_top_k(cov, static_cast<std::size_t>(a.k)))
        os << (i + 1) << '\t' << udkit::text::format_fixed(cov[i], 4) << '\n';
      write_file(a.out, os.str());
    } else if (aug->parsed()) {
      udkit::augment::AugmentStats st;
      auto tb = read_tb(a.in);
      auto out = udkit::augment::augment_treebank(tb, udkit::augment::parse_mode(a.mode), &st);
      write_file(a.out, udkit::write_conllu(out));
      std::cerr << tb.size() << " sentences, " << st.eligible << " eligible, " << out.size() << " written\n";
    } else if (lab_train->parsed()) {
      udkit::delex::LabelerOptions o;
      o.n_trees = a.trees;
      o.seed = a.seed;
      write_file(a.out, udkit::delex::train_labeler(udkit::delex::extract_examples(read_tb(a.in)), o).serialize());
    } else if (lab_apply->parsed()) {
      auto m = udkit::delex::Labeler::deserialize(read_file(a.model));
      auto tb = read_tb(a.in);
      for (auto& s : tb.sentences)
        for (auto& t : s.tokens) {
          if (!t.head) continue;
          if (*t.head == 0) {
            t.deprel = "root";
            continue;
          }
          if (*t.head < 0 || *t.head > static_cast<int>(s.tokens.size()))
            throw udkit::DataError("head out of range at token " + std::to_string(t.id));
          const auto& h = s.tokens[static_cast<std::size_t>(*t.head) - 1];
          t.deprel = m.predict(t.upos.value_or("X"), h.upos.value_or("X"));
        }
      write_file(a.out, udkit::write_conllu(tb));
    } else if (ev->parsed()) {
      auto r = udkit::eval::score(read_tb(a.gold), read_tb(a.sys), {a.no_punct});
      if (a.out.empty()) std::cout << r.to_tsv();
      else write_file(a.out, r.to_tsv());
    } else if (cv->parsed()) {
      auto r = run_cv(a);
      if (a.out.empty()) std::cout << r.to_tsv();
      else write_file(a.out, r.to_tsv());
    } else if (pipe_build->parsed()) {
      auto p = udkit::pipeline::build(udkit::pipeline::load_config(a.config));
      for (const auto& l : p.log) std::cerr << l << '\n';
      std::cerr << "models written to " << p.config.work_dir.string() << '\n';
    } else if (pipe_run->parsed()) {
      auto cfg = udkit::pipeline::load_config(a.config);
      auto p = udkit::pipeline::models_present(cfg) ? udkit::pipeline::load(cfg) : udkit::pipeline::build(cfg);
      for (const auto& l : p.log) std::cerr << l << '\n';
      udkit::pipeline::RunOptions ro;
      if (a.keep) {
        fs::path out(a.out);
        ro.intermediate_dir = out.parent_path() / (out.stem().string() + ".stages");
      }
      write_file(a.out, udkit::write_conllu(udkit::pipeline::run(p, read_file(a.in), ro)));
    }
  } catch (const udkit::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
