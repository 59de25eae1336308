// Writes the bundled synthetic corpora.
//
//   hmaca-synth promoter <dir>   train.fa train.tsv test.fa test.tsv
//   hmaca-synth structure <dir>  train.fa train.ss test.fa test.ss

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "hmaca/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hmaca::synthetic;

namespace {

std::ofstream create(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_promoter(const fs::path& dir) {
  for (const auto& [name, seed, prefix] :
       {std::tuple{"train", 42ull, "train"}, std::tuple{"test", 4242ull, "test"}}) {
    PromoterCorpusConfig cfg;
    cfg.seed = seed;
    cfg.id_prefix = prefix;
    const PromoterCorpus corpus = make_promoter_corpus(cfg);
    auto fa = create(dir / (std::string(name) + ".fa"));
    write_fasta(fa, corpus.sequences);
    auto tsv = create(dir / (std::string(name) + ".tsv"));
    write_intervals(tsv, corpus.intervals);
  }
}

void write_structure(const fs::path& dir) {
  for (const auto& [name, seed, prefix] :
       {std::tuple{"train", 42ull, "train"}, std::tuple{"test", 4242ull, "test"}}) {
    StructureCorpusConfig cfg;
    cfg.seed = seed;
    cfg.id_prefix = prefix;
    const StructureCorpus corpus = make_structure_corpus(cfg);
    auto fa = create(dir / (std::string(name) + ".fa"));
    write_fasta(fa, corpus.sequences);
    auto ss = create(dir / (std::string(name) + ".ss"));
    write_fasta(ss, corpus.structures);
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: hmaca-synth promoter|structure <dir>\n";
    return 2;
  }
  const std::string kind = argv[1];
  const fs::path dir = argv[2];
  try {
    fs::create_directories(dir);
    if (kind == "promoter") {
      write_promoter(dir);
    } else if (kind == "structure") {
      write_structure(dir);
    } else {
      std::cerr << "unknown corpus '" << kind << "'\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "hmaca-synth: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
