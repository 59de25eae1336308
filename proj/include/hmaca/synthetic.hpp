#pragma once

// Deterministic synthetic corpora for demonstrations and regression tests.
//
// Promoter corpus: records of uniform random bases, alternating positive and
// negative. Positive records carry a planted motif at a fixed offset and are
// annotated over their full length; negative records are resampled until the
// motif does not occur at that offset.
//
// Structure corpus: each record is a run of helix/strand/coil segments of 4
// to 10 residues. Residues come from a segment-specific pool with
// probability 0.8 and from the full alphabet otherwise.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hmaca/bio_encode.hpp"

namespace hmaca::synthetic {

struct PromoterCorpusConfig {
  std::size_t record_count = 64;
  std::size_t record_length = 12;
  std::string motif = "TATAAT";
  std::size_t motif_offset = 3;
  std::string id_prefix = "seq";
  std::uint64_t seed = 42;
};

struct PromoterCorpus {
  std::vector<NucleotideSeq> sequences;
  std::vector<Interval> intervals;
};

PromoterCorpus make_promoter_corpus(const PromoterCorpusConfig& config);

struct StructureCorpusConfig {
  std::size_t record_count = 8;
  std::size_t record_length = 60;
  std::string id_prefix = "prot";
  std::uint64_t seed = 42;
};

struct StructureCorpus {
  std::vector<ProteinSeq> sequences;
  /// Same ids as `sequences`, residues are H/E/C.
  std::vector<ProteinSeq> structures;
};

StructureCorpus make_structure_corpus(const StructureCorpusConfig& config);

/// FASTA with 60-column sequence lines.
void write_fasta(std::ostream& out, const std::vector<NucleotideSeq>& records);
void write_fasta(std::ostream& out, const std::vector<ProteinSeq>& records);
void write_intervals(std::ostream& out, const std::vector<Interval>& intervals);

}  // namespace hmaca::synthetic
