#pragma once

#include <chrono>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "udkit/conllu.hpp"
#include "udkit/pipeline.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(UDKIT_FIXTURE_DIR) / name;
}

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(UDKIT_DATA_DIR) / name;
}

inline std::string read(const std::filesystem::path& p) { return udkit::pipeline::read_file(p); }

inline udkit::Treebank load(const std::string& name) {
  return udkit::parse_conllu(read(fixture(name)), name);
}

inline const std::vector<std::string>& conllu_fixtures() {
  static const std::vector<std::string> names = {
      "fig1.conllu", "fig3_gold.conllu", "fig3_zero_shot.conllu", "fig3_few_shot.conllu", "vso.conllu",
      "svo.conllu",  "vos.conllu",       "edu94.conllu",          "zs_raw_gold.conllu",   "parallel_en.conllu"};
  return names;
}

// Fixtures where every sentence is a complete tree.
inline const std::vector<std::string>& tree_fixtures() {
  static const std::vector<std::string> names = {"fig1.conllu", "fig3_gold.conllu", "vso.conllu",        "svo.conllu",
                                                  "vos.conllu",  "edu94.conllu",     "zs_raw_gold.conllu", "parallel_en.conllu"};
  return names;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    auto base = std::filesystem::temp_directory_path();
    for (;;) {
      path_ = base / ("udkit-test-" + std::to_string(rd()));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline udkit::AnnotatedSentence sentence(const std::vector<std::string>& forms) {
  udkit::AnnotatedSentence s;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    udkit::Token t;
    t.id = static_cast<int>(i) + 1;
    t.form = forms[i];
    s.tokens.push_back(t);
  }
  return s;
}

inline udkit::Treebank treebank(std::vector<udkit::AnnotatedSentence> sents) {
  udkit::Treebank tb;
  tb.sentences = std::move(sents);
  return tb;
}

template <class F>
double seconds(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace testing_support
