// Scores a system CoNLL-U file against gold and prints the metric table.
// usage: score_pair GOLD SYSTEM

#include <iostream>

#include "udkit/evaluator.hpp"
#include "udkit/pipeline.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: " << argv[0] << " GOLD SYSTEM\n";
    return 1;
  }
  try {
    auto gold = udkit::parse_conllu(udkit::pipeline::read_file(argv[1]));
    auto sys = udkit::parse_conllu(udkit::pipeline::read_file(argv[2]));
    std::cout << udkit::eval::score(gold, sys).to_tsv();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
