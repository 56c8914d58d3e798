#pragma once

// Zero-shot and few-shot annotation pipelines: segment, tag, analyze, parse.

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "udkit/augment.hpp"
#include "udkit/config.hpp"
#include "udkit/conllu.hpp"
#include "udkit/error.hpp"
#include "udkit/morph.hpp"
#include "udkit/parser.hpp"
#include "udkit/segmenter.hpp"
#include "udkit/tag_convert.hpp"
#include "udkit/tagger.hpp"

namespace udkit::pipeline {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << content;
  if (!out) throw DataError("write failed: " + p.string());
}

// Surface text of a sentence, honouring multiword tokens and SpaceAfter=No.
inline std::string surface_text(const AnnotatedSentence& s) {
  std::string out;
  std::size_t k = 0;
  while (k < s.tokens.size()) {
    const MultiwordSpan* span = nullptr;
    for (const auto& sp : s.spans)
      if (sp.start == s.tokens[k].id) span = &sp;
    std::string piece;
    std::optional<std::string> misc;
    if (span) {
      piece = span->surface;
      misc = span->misc;
      k += static_cast<std::size_t>(span->end - span->start + 1);
    } else {
      piece = s.tokens[k].form;
      misc = s.tokens[k].misc;
      ++k;
    }
    out += piece;
    bool no_space = misc && misc->find("SpaceAfter=No") != std::string::npos;
    if (!no_space && k < s.tokens.size()) out += ' ';
  }
  return out;
}

// One sentence per line.
inline std::string raw_text(const Treebank& tb) {
  std::string out;
  for (const auto& s : tb.sentences) out += surface_text(s) + "\n";
  return out;
}

struct Pipeline {
  PipelineConfig config;
  punkt::BoundaryModel segmenter;
  tagger::TaggerModel tagger;
  morph::Morphology morphology;
  parser::ParserModel parser;
  std::vector<std::string> log;
};

struct ModelPaths {
  std::filesystem::path segmenter, tagger, morph, parser;
};

inline ModelPaths model_paths(const PipelineConfig& c) {
  return {c.work_dir / "segmenter.punkt", c.work_dir / "tagger.model", c.work_dir / "morph.fst",
          c.work_dir / "parser.model"};
}

namespace detail {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DataError& e) {
    throw DataError(std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace detail

// Trains or loads every stage and writes the models under work_dir.
// `treebank` replaces the configured treebank file (used by cross-validation).
inline Pipeline build(const PipelineConfig& cfg, const Treebank* treebank = nullptr) {
  validate(cfg);
  Pipeline p;
  p.config = cfg;
  auto note = [&](std::string m) { p.log.push_back(std::move(m)); };

  std::optional<Treebank> tb;
  if (cfg.mode == Mode::kFewShot) {
    if (treebank) tb = *treebank;
    else if (cfg.treebank) tb = detail::stage("treebank", [&] { return parse_conllu(read_file(*cfg.treebank), cfg.treebank->string()); });
    if (tb) note("treebank: " + std::to_string(tb->size()) + " sentences");
  }

  p.segmenter = detail::stage("segmenter", [&] {
    if (cfg.segmenter_model) return punkt::BoundaryModel::deserialize(read_file(*cfg.segmenter_model));
    if (cfg.segmenter_text) return punkt::train_boundary_model(read_file(*cfg.segmenter_text));
    if (!tb) throw DataError("no segmenter model or training text");
    return punkt::train_boundary_model(raw_text(*tb));
  });
  note("segmenter: " + std::to_string(p.segmenter.abbreviations.size()) + " abbreviations");

  p.tagger = detail::stage("tagger", [&] {
    tagger::TaggerOptions o{cfg.tagger_epochs, cfg.seed};
    switch (cfg.tagger_source) {
      case TaggerSource::kConverted: {
        auto map = tags::load_tag_map(read_file(*cfg.tag_map));
        auto conv = tags::convert_corpus(tags::read_tagged_corpus(read_file(*cfg.tagged_corpus)), map);
        note("tagger: " + std::to_string(conv.treebank.size()) + " converted sentences, " +
             std::to_string(conv.report.unmapped.size()) + " unmapped tags");
        return tagger::train_tagger(conv.treebank, o);
      }
      case TaggerSource::kProjected: {
        auto data = parse_conllu(read_file(*cfg.tagger_data), cfg.tagger_data->string());
        note("tagger: " + std::to_string(data.size()) + " projected sentences");
        return tagger::train_tagger(data, o);
      }
      case TaggerSource::kTreebank:
        if (!tb) throw DataError("no treebank");
        return tagger::train_tagger(*tb, o);
    }
    throw DataError("unknown tagger source");
  });

  p.morphology = detail::stage("morph", [&] { return morph::compile_rules(read_file(*cfg.rules)); });
  note("morph: " + p.morphology.rules().version_tag + ", " + std::to_string(p.morphology.rules().rules.size()) +
       " rules");

  p.parser = detail::stage("parser", [&] {
    parser::ParserOptions o;
    o.epochs = cfg.parser_epochs;
    o.seed = cfg.seed;
    switch (cfg.parser_source) {
      case ParserSource::kProjected: {
        auto data = parse_conllu(read_file(*cfg.parser_data), cfg.parser_data->string());
        note("parser: " + std::to_string(data.size()) + " projected trees");
        return parser::train_parser(data, o);
      }
      case ParserSource::kExternal:
        return parser::ParserModel::deserialize(read_file(*cfg.parser_model));
      case ParserSource::kTreebank:
        if (!tb) throw DataError("no treebank");
        return parser::train_parser(*tb, o);
      case ParserSource::kTreebankAugment: {
        if (!tb) throw DataError("no treebank");
        augment::AugmentStats st;
        auto aug = augment::augment_treebank(*tb, augment::parse_mode(cfg.augment), &st);
        note("parser: augment " + cfg.augment + ": " + std::to_string(tb->size()) + " sentences, " +
             std::to_string(st.eligible) + " eligible, " + std::to_string(aug.size()) + " after augmentation");
        return parser::train_parser(aug, o);
      }
    }
    throw DataError("unknown parser source");
  });

  auto paths = model_paths(cfg);
  detail::stage("persist", [&] {
    write_file(paths.segmenter, p.segmenter.serialize());
    write_file(paths.tagger, p.tagger.serialize());
    write_file(paths.morph, p.morphology.serialize());
    write_file(paths.parser, p.parser.serialize());
    return 0;
  });
  return p;
}

inline bool models_present(const PipelineConfig& cfg) {
  auto m = model_paths(cfg);
  for (const auto& f : {m.segmenter, m.tagger, m.morph, m.parser})
    if (!std::filesystem::exists(f)) return false;
  return true;
}

// Loads the models a previous build persisted.
inline Pipeline load(const PipelineConfig& cfg) {
  validate(cfg);
  Pipeline p;
  p.config = cfg;
  auto m = model_paths(cfg);
  p.segmenter = detail::stage("segmenter", [&] { return punkt::BoundaryModel::deserialize(read_file(m.segmenter)); });
  p.tagger = detail::stage("tagger", [&] { return tagger::TaggerModel::deserialize(read_file(m.tagger)); });
  p.morphology = detail::stage("morph", [&] { return morph::Morphology::deserialize(read_file(m.morph)); });
  p.parser = detail::stage("parser", [&] { return parser::ParserModel::deserialize(read_file(m.parser)); });
  return p;
}

struct RunOptions {
  std::optional<std::filesystem::path> intermediate_dir;  // keep per-stage CoNLL-U
};

inline Treebank run(const Pipeline& p, std::string_view raw, const RunOptions& opts = {}) {
  auto keep = [&](const char* name, const Treebank& tb) {
    if (opts.intermediate_dir) write_file(*opts.intermediate_dir / (std::string(name) + ".conllu"), write_conllu(tb));
  };
  Treebank tb = detail::stage("segment", [&] { return punkt::segment_to_treebank(raw, p.segmenter); });
  keep("tokenized", tb);
  tb = detail::stage("tag", [&] { return tagger::tag_treebank(tb, p.tagger); });
  keep("tagged", tb);
  tb = detail::stage("morph", [&] { return morph::annotate_treebank(tb, p.morphology, p.config.gate_by_upos); });
  keep("morph", tb);
  tb = detail::stage("parse", [&] { return parser::parse_treebank(tb, p.parser); });
  for (std::size_t i = 0; i < tb.size(); ++i)
    if (!is_valid_tree(tb.sentences[i]))
      throw DataError("stage parse: sentence " + std::to_string(i + 1) + " is not a valid tree");
  keep("parsed", tb);
  return tb;
}

}  // namespace udkit::pipeline
