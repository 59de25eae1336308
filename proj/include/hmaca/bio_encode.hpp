#pragma once

// Sequence ingestion and fixed-width window encoding.
//
// Nucleotides use two bits (A=00 C=01 G=10 T=11); amino acids use five bits
// holding the residue's alphabetical index among the 20 standard letters,
// with X = 20. The first symbol of a window lands in the most significant
// cells.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hmaca/ca_engine.hpp"
#include "hmaca/ga_search.hpp"

namespace hmaca {

enum class Task { Coding, Promoter, SecondaryStructure };
enum class SequenceKind { Nucleotide, Protein };

std::string_view task_name(Task task) noexcept;
/// Accepts "coding", "promoter", "structure".
std::optional<Task> parse_task(std::string_view name) noexcept;
SequenceKind task_sequence_kind(Task task) noexcept;
std::size_t bits_per_symbol(Task task) noexcept;
std::size_t task_class_count(Task task) noexcept;
/// Display symbol for a class label of this task.
std::string class_symbol(Task task, ClassLabel label);

inline constexpr std::string_view kAminoAcids = "ACDEFGHIKLMNPQRSTVWY";
inline constexpr std::string_view kStructureSymbols = "HEC";

struct NucleotideSeq {
  std::string id;
  std::string residues;
};

struct ProteinSeq {
  std::string id;
  std::string residues;
};

/// Plain FASTA record before alphabet checks.
struct FastaRecord {
  std::string id;
  std::string residues;
  std::size_t first_line = 0;
  /// (residue offset, 1-based line) where each sequence line starts.
  std::vector<std::pair<std::size_t, std::size_t>> line_starts;
};

/// Reads FASTA records; lower case is folded to upper case.
std::vector<FastaRecord> parse_fasta_records(std::istream& in);

std::vector<NucleotideSeq> parse_nucleotide_fasta(std::istream& in);
std::vector<ProteinSeq> parse_protein_fasta(std::istream& in);
/// FASTA-like file whose sequences are H/E/C strings.
std::vector<ProteinSeq> parse_structure_fasta(std::istream& in);

struct WindowSpec {
  std::size_t window_length = 0;
  std::size_t stride = 1;
  Task task = Task::Promoter;

  std::size_t width() const noexcept { return window_length * bits_per_symbol(task); }
  /// Checks window >= 1, stride >= 1 and width <= kMaxWidth.
  void validate() const;
};

CaState encode_dna_window(const NucleotideSeq& seq, std::size_t start, const WindowSpec& spec);
CaState encode_protein_window(const ProteinSeq& seq, std::size_t start, const WindowSpec& spec);

struct Interval {
  std::string seq_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label_name;
};

/// TSV `seq_id<TAB>start<TAB>end<TAB>label_name`, 0-based half-open.
/// Blank lines and lines starting with '#' are ignored.
std::vector<Interval> parse_intervals(std::istream& in);

struct LabeledWindow {
  std::string source_id;
  std::size_t start = 0;
  CaState bits;
  ClassLabel label = 0;
};

struct WindowBatch {
  std::vector<LabeledWindow> windows;
  std::size_t skipped_ambiguous = 0;
};

/// Label 1 iff the window's centre base lies inside one of `intervals`
/// (only those whose seq_id equals seq.id are used). With `impute_n`, N is
/// read as A instead of skipping the window.
WindowBatch label_windows(const NucleotideSeq& seq, const std::vector<Interval>& intervals,
                          const WindowSpec& spec, bool impute_n = false);
/// Label = structure class (H=0, E=1, C=2) of the centre residue.
WindowBatch label_windows(const ProteinSeq& seq, std::string_view structure,
                          const WindowSpec& spec);

/// Offset of the centre symbol inside a window.
constexpr std::size_t window_center(std::size_t window_length) noexcept {
  return window_length / 2;
}

PatternSet to_pattern_set(const std::vector<LabeledWindow>& windows, std::size_t class_count);

}  // namespace hmaca
