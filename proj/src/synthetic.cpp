#include "hmaca/synthetic.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "hmaca/random.hpp"

namespace hmaca::synthetic {

namespace {

constexpr std::string_view kBases = "ACGT";

std::string record_id(const std::string& prefix, std::size_t index) {
  std::ostringstream id;
  id << prefix << std::setw(3) << std::setfill('0') << index + 1;
  return id.str();
}

template <class Record>
void write_records(std::ostream& out, const std::vector<Record>& records) {
  for (const auto& r : records) {
    out << '>' << r.id << '\n';
    for (std::size_t i = 0; i < r.residues.size(); i += 60) {
      out << r.residues.substr(i, 60) << '\n';
    }
  }
}

char draw(Rng& rng, std::string_view alphabet) {
  return alphabet[static_cast<std::size_t>(uniform_below(rng, alphabet.size()))];
}

}  // namespace

PromoterCorpus make_promoter_corpus(const PromoterCorpusConfig& config) {
  if (config.motif.empty() || config.motif_offset + config.motif.size() > config.record_length) {
    throw Error(Errc::InvalidConfig, "motif does not fit inside the record");
  }
  PromoterCorpus corpus;
  for (std::size_t i = 0; i < config.record_count; ++i) {
    Rng rng = make_stream(config.seed, 1, i);
    const bool positive = i % 2 == 0;
    NucleotideSeq seq{record_id(config.id_prefix, i), std::string(config.record_length, 'A')};
    for (;;) {
      for (auto& b : seq.residues) b = draw(rng, kBases);
      if (positive) {
        seq.residues.replace(config.motif_offset, config.motif.size(), config.motif);
        break;
      }
      if (seq.residues.compare(config.motif_offset, config.motif.size(), config.motif) != 0) break;
    }
    if (positive) corpus.intervals.push_back({seq.id, 0, config.record_length, "promoter"});
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

StructureCorpus make_structure_corpus(const StructureCorpusConfig& config) {
  static constexpr std::string_view kPools[] = {"AELMQKR", "VIYFWT", "GPNDS"};
  StructureCorpus corpus;
  for (std::size_t i = 0; i < config.record_count; ++i) {
    Rng rng = make_stream(config.seed, 2, i);
    ProteinSeq seq{record_id(config.id_prefix, i), {}};
    ProteinSeq ss{seq.id, {}};
    while (seq.residues.size() < config.record_length) {
      const auto kind = static_cast<std::size_t>(uniform_below(rng, 3));
      const auto length = static_cast<std::size_t>(4 + uniform_below(rng, 7));
      for (std::size_t j = 0; j < length && seq.residues.size() < config.record_length; ++j) {
        const bool from_pool = uniform_below(rng, 10) < 8;
        seq.residues.push_back(draw(rng, from_pool ? kPools[kind] : kAminoAcids));
        ss.residues.push_back(kStructureSymbols[kind]);
      }
    }
    corpus.sequences.push_back(std::move(seq));
    corpus.structures.push_back(std::move(ss));
  }
  return corpus;
}

void write_fasta(std::ostream& out, const std::vector<NucleotideSeq>& records) {
  write_records(out, records);
}

void write_fasta(std::ostream& out, const std::vector<ProteinSeq>& records) {
  write_records(out, records);
}

void write_intervals(std::ostream& out, const std::vector<Interval>& intervals) {
  for (const auto& iv : intervals) {
    out << iv.seq_id << '\t' << iv.start << '\t' << iv.end << '\t' << iv.label_name << '\n';
  }
}

}  // namespace hmaca::synthetic
