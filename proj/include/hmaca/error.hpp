#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmaca {

enum class Errc {
  WidthOutOfRange,
  WidthMismatch,
  StepBudgetExceeded,
  WidthTooLargeForEnumeration,
  NotLinear,
  InvalidHex,
  InvalidConfig,
  UnevaluatedPopulation,
  EmptyPatternSet,
  EmptyTrainingSet,
  EmptyFile,
  MalformedHeader,
  IllegalSymbol,
  WindowOutOfBounds,
  AmbiguousBase,
  AnnotationLengthMismatch,
  UnknownStructureSymbol,
  BadInterval,
  ClassWithZeroItems,
  EmptyTestSet,
  InconsistentMethodColumns,
  ModelFormat,
  UnknownModelVersion,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hmaca
