#include "hmaca/bio_encode.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <sstream>

namespace hmaca {

namespace {

constexpr std::string_view kNucleotides = "ACGTN";

void strip_trailing(std::string& line) {
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::pair<std::size_t, std::size_t> locate(const FastaRecord& rec, std::size_t offset) {
  std::size_t line = rec.first_line;
  std::size_t line_offset = 0;
  for (const auto& [start, l] : rec.line_starts) {
    if (start > offset) break;
    line = l;
    line_offset = start;
  }
  return {line, offset - line_offset + 1};
}

void check_alphabet(const FastaRecord& rec, std::string_view alphabet, Errc code,
                    std::string_view what) {
  for (std::size_t i = 0; i < rec.residues.size(); ++i) {
    if (alphabet.find(rec.residues[i]) == std::string_view::npos) {
      const auto [line, column] = locate(rec, i);
      throw Error(code, "illegal " + std::string(what) + " symbol '" +
                            std::string(1, rec.residues[i]) + "' at line " +
                            std::to_string(line) + " column " + std::to_string(column));
    }
  }
}

void check_window(std::size_t length, std::size_t start, const WindowSpec& spec) {
  spec.validate();
  if (start > length || spec.window_length > length - start) {
    throw Error(Errc::WindowOutOfBounds, "window [" + std::to_string(start) + ", " +
                                             std::to_string(start + spec.window_length) +
                                             ") exceeds sequence length " +
                                             std::to_string(length));
  }
}

int nucleotide_code(char base) {
  switch (base) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: return -1;
  }
}

CaState encode_dna(const NucleotideSeq& seq, std::size_t start, const WindowSpec& spec,
                   bool impute_n) {
  if (task_sequence_kind(spec.task) != SequenceKind::Nucleotide) {
    throw Error(Errc::InvalidConfig, "DNA windows need the coding or promoter task");
  }
  check_window(seq.residues.size(), start, spec);
  CaState bits(spec.width());
  for (std::size_t j = 0; j < spec.window_length; ++j) {
    const char base = seq.residues[start + j];
    int code = nucleotide_code(base);
    if (code < 0) {
      if (base != 'N') {
        throw Error(Errc::IllegalSymbol, "illegal nucleotide '" + std::string(1, base) + "'");
      }
      if (!impute_n) {
        throw Error(Errc::AmbiguousBase, seq.id + ": ambiguous base N at offset " +
                                             std::to_string(start + j));
      }
      code = 0;
    }
    bits.set(2 * j, code & 2);
    bits.set(2 * j + 1, code & 1);
  }
  return bits;
}

}  // namespace

std::string_view task_name(Task task) noexcept {
  switch (task) {
    case Task::Coding: return "coding";
    case Task::Promoter: return "promoter";
    case Task::SecondaryStructure: return "structure";
  }
  return "promoter";
}

std::optional<Task> parse_task(std::string_view name) noexcept {
  if (name == "coding") return Task::Coding;
  if (name == "promoter") return Task::Promoter;
  if (name == "structure") return Task::SecondaryStructure;
  return std::nullopt;
}

SequenceKind task_sequence_kind(Task task) noexcept {
  return task == Task::SecondaryStructure ? SequenceKind::Protein : SequenceKind::Nucleotide;
}

std::size_t bits_per_symbol(Task task) noexcept {
  return task == Task::SecondaryStructure ? 5 : 2;
}

std::size_t task_class_count(Task task) noexcept {
  return task == Task::SecondaryStructure ? 3 : 2;
}

std::string class_symbol(Task task, ClassLabel label) {
  switch (task) {
    case Task::Coding: return label == 1 ? "C" : "N";
    case Task::Promoter: return label == 1 ? "P" : "N";
    case Task::SecondaryStructure:
      return label < kStructureSymbols.size() ? std::string(1, kStructureSymbols[label]) : "?";
  }
  return "?";
}

std::vector<FastaRecord> parse_fasta_records(std::istream& in) {
  std::vector<FastaRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool any_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    strip_trailing(line);
    if (is_blank(line)) continue;
    any_content = true;
    if (line.front() == '>') {
      const std::string header = line.substr(1);
      const auto end = std::find_if(header.begin(), header.end(),
                                    [](unsigned char c) { return std::isspace(c) != 0; });
      FastaRecord rec;
      rec.id.assign(header.begin(), end);
      if (rec.id.empty()) {
        throw Error(Errc::MalformedHeader, "empty FASTA header at line " + std::to_string(line_no));
      }
      rec.first_line = line_no + 1;
      records.push_back(std::move(rec));
      continue;
    }
    if (records.empty()) {
      throw Error(Errc::MalformedHeader,
                  "sequence data before the first '>' header at line " + std::to_string(line_no));
    }
    FastaRecord& rec = records.back();
    rec.line_starts.emplace_back(rec.residues.size(), line_no);
    for (char c : line) {
      rec.residues.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  if (!any_content) throw Error(Errc::EmptyFile, "sequence file is empty");
  return records;
}

std::vector<NucleotideSeq> parse_nucleotide_fasta(std::istream& in) {
  std::vector<NucleotideSeq> out;
  for (auto& rec : parse_fasta_records(in)) {
    check_alphabet(rec, kNucleotides, Errc::IllegalSymbol, "nucleotide");
    out.push_back({std::move(rec.id), std::move(rec.residues)});
  }
  return out;
}

std::vector<ProteinSeq> parse_protein_fasta(std::istream& in) {
  static constexpr std::string_view kProtein = "ACDEFGHIKLMNPQRSTVWYX";
  std::vector<ProteinSeq> out;
  for (auto& rec : parse_fasta_records(in)) {
    check_alphabet(rec, kProtein, Errc::IllegalSymbol, "amino-acid");
    out.push_back({std::move(rec.id), std::move(rec.residues)});
  }
  return out;
}

std::vector<ProteinSeq> parse_structure_fasta(std::istream& in) {
  std::vector<ProteinSeq> out;
  for (auto& rec : parse_fasta_records(in)) {
    check_alphabet(rec, kStructureSymbols, Errc::UnknownStructureSymbol, "structure");
    out.push_back({std::move(rec.id), std::move(rec.residues)});
  }
  return out;
}

void WindowSpec::validate() const {
  if (window_length == 0) throw Error(Errc::InvalidConfig, "window length must be positive");
  if (stride == 0) throw Error(Errc::InvalidConfig, "stride must be positive");
  if (width() > kMaxWidth) {
    throw Error(Errc::WidthOutOfRange, "window of " + std::to_string(window_length) +
                                           " symbols needs " + std::to_string(width()) +
                                           " cells; the limit is " + std::to_string(kMaxWidth));
  }
}

CaState encode_dna_window(const NucleotideSeq& seq, std::size_t start, const WindowSpec& spec) {
  return encode_dna(seq, start, spec, false);
}

CaState encode_protein_window(const ProteinSeq& seq, std::size_t start, const WindowSpec& spec) {
  if (spec.task != Task::SecondaryStructure) {
    throw Error(Errc::InvalidConfig, "protein windows need the structure task");
  }
  check_window(seq.residues.size(), start, spec);
  CaState bits(spec.width());
  for (std::size_t j = 0; j < spec.window_length; ++j) {
    const char residue = seq.residues[start + j];
    std::size_t code = kAminoAcids.find(residue);
    if (code == std::string_view::npos) {
      if (residue != 'X') {
        throw Error(Errc::IllegalSymbol, "illegal amino acid '" + std::string(1, residue) + "'");
      }
      code = kAminoAcids.size();
    }
    for (std::size_t b = 0; b < 5; ++b) bits.set(5 * j + b, (code >> (4 - b)) & 1u);
  }
  return bits;
}

std::vector<Interval> parse_intervals(std::istream& in) {
  std::vector<Interval> out;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(Errc::BadInterval, "interval line " + std::to_string(line_no) + ": " + what);
  };
  auto parse_offset = [&](const std::string& text) -> std::size_t {
    if (text.empty() || text.size() > 18 ||
        !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
      fail("'" + text + "' is not a non-negative integer");
    }
    return static_cast<std::size_t>(std::stoull(text));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line) || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::istringstream split(line);
    for (std::string f; std::getline(split, f, '\t');) fields.push_back(f);
    if (fields.size() != 4) fail("expected 4 tab-separated fields");
    Interval iv{fields[0], parse_offset(fields[1]), parse_offset(fields[2]), fields[3]};
    if (iv.seq_id.empty()) fail("empty sequence id");
    if (iv.end < iv.start) fail("end precedes start");
    out.push_back(std::move(iv));
  }
  return out;
}

WindowBatch label_windows(const NucleotideSeq& seq, const std::vector<Interval>& intervals,
                          const WindowSpec& spec, bool impute_n) {
  spec.validate();
  std::vector<const Interval*> mine;
  for (const auto& iv : intervals) {
    if (iv.seq_id != seq.id) continue;
    if (iv.end < iv.start) throw Error(Errc::BadInterval, "interval end precedes start");
    if (iv.end > seq.residues.size()) {
      throw Error(Errc::AnnotationLengthMismatch,
                  "interval [" + std::to_string(iv.start) + ", " + std::to_string(iv.end) +
                      ") exceeds " + seq.id + " length " + std::to_string(seq.residues.size()));
    }
    mine.push_back(&iv);
  }
  WindowBatch batch;
  const std::size_t len = seq.residues.size();
  for (std::size_t start = 0; start + spec.window_length <= len; start += spec.stride) {
    const std::size_t center = start + window_center(spec.window_length);
    const bool inside = std::any_of(mine.begin(), mine.end(), [&](const Interval* iv) {
      return iv->start <= center && center < iv->end;
    });
    try {
      batch.windows.push_back({seq.id, start, encode_dna(seq, start, spec, impute_n),
                               inside ? ClassLabel{1} : ClassLabel{0}});
    } catch (const Error& e) {
      if (e.code() != Errc::AmbiguousBase) throw;
      ++batch.skipped_ambiguous;
    }
  }
  return batch;
}

WindowBatch label_windows(const ProteinSeq& seq, std::string_view structure,
                          const WindowSpec& spec) {
  spec.validate();
  if (structure.size() != seq.residues.size()) {
    throw Error(Errc::AnnotationLengthMismatch,
                seq.id + ": structure length " + std::to_string(structure.size()) +
                    " differs from sequence length " + std::to_string(seq.residues.size()));
  }
  WindowBatch batch;
  const std::size_t len = seq.residues.size();
  for (std::size_t start = 0; start + spec.window_length <= len; start += spec.stride) {
    const char symbol = structure[start + window_center(spec.window_length)];
    const std::size_t label = kStructureSymbols.find(symbol);
    if (label == std::string_view::npos) {
      throw Error(Errc::UnknownStructureSymbol,
                  seq.id + ": unknown structure symbol '" + std::string(1, symbol) + "'");
    }
    batch.windows.push_back(
        {seq.id, start, encode_protein_window(seq, start, spec), static_cast<ClassLabel>(label)});
  }
  return batch;
}

PatternSet to_pattern_set(const std::vector<LabeledWindow>& windows, std::size_t class_count) {
  std::vector<Pattern> patterns;
  patterns.reserve(windows.size());
  for (const auto& w : windows) patterns.push_back({w.bits, w.label});
  return PatternSet(std::move(patterns), class_count);
}

}  // namespace hmaca
