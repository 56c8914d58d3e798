// Prints the rotated variants of every eligible clause in a CoNLL-U file.
// usage: word_order_variants FILE

#include <iostream>
#include <string>
#include <variant>

#include "udkit/augment.hpp"
#include "udkit/pipeline.hpp"

namespace {

std::string forms(const udkit::AnnotatedSentence& s) {
  std::string out;
  for (const auto& t : s.tokens) out += (out.empty() ? "" : " ") + t.form;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " FILE\n";
    return 1;
  }
  try {
    auto tb = udkit::parse_conllu(udkit::pipeline::read_file(argv[1]));
    for (const auto& s : tb.sentences) {
      auto found = udkit::augment::find_eligible(s);
      std::cout << udkit::sentence_text(s) << '\n';
      if (const auto* why = std::get_if<udkit::augment::Ineligible>(&found)) {
        std::cout << "  skipped: " << why->reason << "\n";
        continue;
      }
      for (const auto& m : udkit::augment::rotate(s, std::get<udkit::augment::ClauseSpans>(found)))
        std::cout << "  " << forms(m) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
