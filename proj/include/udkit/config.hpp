#pragma once

// Pipeline configuration, read from a TOML file.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <toml.hpp>

#include "udkit/error.hpp"

namespace udkit::pipeline {

enum class Mode { kZeroShot, kFewShot };
enum class TaggerSource { kConverted, kProjected, kTreebank };
enum class ParserSource { kProjected, kExternal, kTreebank, kTreebankAugment };

struct PipelineConfig {
  Mode mode = Mode::kZeroShot;
  std::uint64_t seed = 1;
  std::filesystem::path work_dir = "pipeline-models";

  // Annotated treebank; few-shot only.
  std::optional<std::filesystem::path> treebank;

  // Segmenter: load a model, or train on raw text (few-shot falls back to the treebank text).
  std::optional<std::filesystem::path> segmenter_model;
  std::optional<std::filesystem::path> segmenter_text;

  TaggerSource tagger_source = TaggerSource::kConverted;
  std::optional<std::filesystem::path> tagged_corpus;  // converted
  std::optional<std::filesystem::path> tag_map;        // converted
  std::optional<std::filesystem::path> tagger_data;    // projected POS CoNLL-U
  int tagger_epochs = 10;

  std::optional<std::filesystem::path> rules;
  bool gate_by_upos = true;

  ParserSource parser_source = ParserSource::kProjected;
  std::optional<std::filesystem::path> parser_data;   // projected trees CoNLL-U
  std::optional<std::filesystem::path> parser_model;  // external
  std::string augment = "rotate";
  int parser_epochs = 10;
};

inline std::string_view mode_name(Mode m) { return m == Mode::kZeroShot ? "zero_shot" : "few_shot"; }

inline std::string_view source_name(TaggerSource s) {
  switch (s) {
    case TaggerSource::kConverted: return "converted";
    case TaggerSource::kProjected: return "projected";
    case TaggerSource::kTreebank: return "treebank";
  }
  return "";
}

inline std::string_view source_name(ParserSource s) {
  switch (s) {
    case ParserSource::kProjected: return "projected";
    case ParserSource::kExternal: return "external";
    case ParserSource::kTreebank: return "treebank";
    case ParserSource::kTreebankAugment: return "treebank+augment";
  }
  return "";
}

namespace detail {

// Throws on keys outside `allowed`.
inline void check_keys(const toml::table& t, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : t) {
    std::string key(k.str());
    if (!allowed.count(key)) throw DataError("config: unknown key '" + key + "' in " + where);
  }
}

inline const toml::table* section(const toml::table& root, const std::string& name) {
  auto* node = root.get(name);
  if (!node) return nullptr;
  auto* t = node->as_table();
  if (!t) throw DataError("config: '" + name + "' must be a table");
  return t;
}

inline std::optional<std::string> str(const toml::table* t, const std::string& key, const std::string& where) {
  if (!t) return std::nullopt;
  auto* node = t->get(key);
  if (!node) return std::nullopt;
  auto v = node->value<std::string>();
  if (!v) throw DataError("config: " + where + "." + key + " must be a string");
  return *v;
}

inline std::optional<long long> integer(const toml::table* t, const std::string& key, const std::string& where) {
  if (!t) return std::nullopt;
  auto* node = t->get(key);
  if (!node) return std::nullopt;
  auto v = node->value<long long>();
  if (!v) throw DataError("config: " + where + "." + key + " must be an integer");
  return *v;
}

inline std::optional<bool> boolean(const toml::table* t, const std::string& key, const std::string& where) {
  if (!t) return std::nullopt;
  auto* node = t->get(key);
  if (!node) return std::nullopt;
  auto v = node->value<bool>();
  if (!v) throw DataError("config: " + where + "." + key + " must be a boolean");
  return *v;
}

}  // namespace detail

// Mode constraints and required paths; throws DataError.
inline void validate(const PipelineConfig& c) {
  if (c.mode == Mode::kZeroShot) {
    if (c.treebank) throw DataError("mode violation: zero_shot config declares an annotated treebank");
    if (c.tagger_source == TaggerSource::kTreebank)
      throw DataError("mode violation: zero_shot forbids a treebank-trained tagger");
    if (c.parser_source == ParserSource::kTreebank || c.parser_source == ParserSource::kTreebankAugment)
      throw DataError("mode violation: zero_shot forbids a treebank-trained parser");
  }
  bool needs_treebank = c.tagger_source == TaggerSource::kTreebank || c.parser_source == ParserSource::kTreebank ||
                        c.parser_source == ParserSource::kTreebankAugment;
  if (needs_treebank && !c.treebank) throw DataError("config: [treebank] path is required by the chosen sources");
  if (!c.segmenter_model && !c.segmenter_text && !c.treebank)
    throw DataError("config: [segmenter] needs model or train_text");
  if (c.tagger_source == TaggerSource::kConverted && (!c.tagged_corpus || !c.tag_map))
    throw DataError("config: converted tagger needs [tagger] corpus and tagmap");
  if (c.tagger_source == TaggerSource::kProjected && !c.tagger_data)
    throw DataError("config: projected tagger needs [tagger] data");
  if (!c.rules) throw DataError("config: [morph] rules is required");
  if (c.parser_source == ParserSource::kProjected && !c.parser_data)
    throw DataError("config: projected parser needs [parser] data");
  if (c.parser_source == ParserSource::kExternal && !c.parser_model)
    throw DataError("config: external parser needs [parser] model");
  if (c.tagger_epochs < 1 || c.parser_epochs < 1) throw DataError("config: epochs must be at least 1");
}

// Relative paths resolve against `base_dir`.
inline PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ParseError(e.source().begin.line, std::string(e.description()));
  }
  detail::check_keys(root, {"mode", "seed", "work_dir", "treebank", "segmenter", "tagger", "morph", "parser"},
                     "the top level");
  PipelineConfig c;
  auto path = [&](const std::string& p) { return std::filesystem::path(p).is_absolute() ? std::filesystem::path(p) : base_dir / p; };

  auto mode = detail::str(&root, "mode", "top");
  if (!mode) throw DataError("config: mode is required (zero_shot or few_shot)");
  if (*mode == "zero_shot") c.mode = Mode::kZeroShot;
  else if (*mode == "few_shot") c.mode = Mode::kFewShot;
  else throw DataError("config: unknown mode '" + *mode + "'");
  if (auto s = detail::integer(&root, "seed", "top")) {
    if (*s < 0) throw DataError("config: seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(*s);
  }
  if (auto w = detail::str(&root, "work_dir", "top")) c.work_dir = path(*w);
  else c.work_dir = base_dir / c.work_dir;

  if (auto* t = detail::section(root, "treebank")) {
    detail::check_keys(*t, {"path"}, "[treebank]");
    if (auto p = detail::str(t, "path", "treebank")) c.treebank = path(*p);
  }
  if (auto* t = detail::section(root, "segmenter")) {
    detail::check_keys(*t, {"model", "train_text"}, "[segmenter]");
    if (auto p = detail::str(t, "model", "segmenter")) c.segmenter_model = path(*p);
    if (auto p = detail::str(t, "train_text", "segmenter")) c.segmenter_text = path(*p);
  }
  if (auto* t = detail::section(root, "tagger")) {
    detail::check_keys(*t, {"source", "corpus", "tagmap", "data", "epochs"}, "[tagger]");
    auto src = detail::str(t, "source", "tagger").value_or(c.mode == Mode::kZeroShot ? "converted" : "treebank");
    if (src == "converted") c.tagger_source = TaggerSource::kConverted;
    else if (src == "projected") c.tagger_source = TaggerSource::kProjected;
    else if (src == "treebank") c.tagger_source = TaggerSource::kTreebank;
    else throw DataError("config: unknown tagger source '" + src + "'");
    if (auto p = detail::str(t, "corpus", "tagger")) c.tagged_corpus = path(*p);
    if (auto p = detail::str(t, "tagmap", "tagger")) c.tag_map = path(*p);
    if (auto p = detail::str(t, "data", "tagger")) c.tagger_data = path(*p);
    if (auto e = detail::integer(t, "epochs", "tagger")) c.tagger_epochs = static_cast<int>(*e);
  } else if (c.mode == Mode::kFewShot) {
    c.tagger_source = TaggerSource::kTreebank;
  }
  if (auto* t = detail::section(root, "morph")) {
    detail::check_keys(*t, {"rules", "gate_by_upos"}, "[morph]");
    if (auto p = detail::str(t, "rules", "morph")) c.rules = path(*p);
    if (auto g = detail::boolean(t, "gate_by_upos", "morph")) c.gate_by_upos = *g;
  }
  if (auto* t = detail::section(root, "parser")) {
    detail::check_keys(*t, {"source", "data", "model", "augment", "epochs"}, "[parser]");
    auto src = detail::str(t, "source", "parser").value_or(c.mode == Mode::kZeroShot ? "projected" : "treebank");
    if (src == "projected") c.parser_source = ParserSource::kProjected;
    else if (src == "external") c.parser_source = ParserSource::kExternal;
    else if (src == "treebank") c.parser_source = ParserSource::kTreebank;
    else if (src == "treebank+augment") c.parser_source = ParserSource::kTreebankAugment;
    else throw DataError("config: unknown parser source '" + src + "'");
    if (auto p = detail::str(t, "data", "parser")) c.parser_data = path(*p);
    if (auto p = detail::str(t, "model", "parser")) c.parser_model = path(*p);
    if (auto a = detail::str(t, "augment", "parser")) c.augment = *a;
    if (auto e = detail::integer(t, "epochs", "parser")) c.parser_epochs = static_cast<int>(*e);
  } else if (c.mode == Mode::kFewShot) {
    c.parser_source = ParserSource::kTreebank;
  }
  validate(c);
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.parent_path());
}

}  // namespace udkit::pipeline
