#include "hmaca/error.hpp"

namespace hmaca {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::WidthOutOfRange: return "WidthOutOfRange";
    case Errc::WidthMismatch: return "WidthMismatch";
    case Errc::StepBudgetExceeded: return "StepBudgetExceeded";
    case Errc::WidthTooLargeForEnumeration: return "WidthTooLargeForEnumeration";
    case Errc::NotLinear: return "NotLinear";
    case Errc::InvalidHex: return "InvalidHex";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnevaluatedPopulation: return "UnevaluatedPopulation";
    case Errc::EmptyPatternSet: return "EmptyPatternSet";
    case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::IllegalSymbol: return "IllegalSymbol";
    case Errc::WindowOutOfBounds: return "WindowOutOfBounds";
    case Errc::AmbiguousBase: return "AmbiguousBase";
    case Errc::AnnotationLengthMismatch: return "AnnotationLengthMismatch";
    case Errc::UnknownStructureSymbol: return "UnknownStructureSymbol";
    case Errc::BadInterval: return "BadInterval";
    case Errc::ClassWithZeroItems: return "ClassWithZeroItems";
    case Errc::EmptyTestSet: return "EmptyTestSet";
    case Errc::InconsistentMethodColumns: return "InconsistentMethodColumns";
    case Errc::ModelFormat: return "ModelFormat";
    case Errc::UnknownModelVersion: return "UnknownModelVersion";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace hmaca
