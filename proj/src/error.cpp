#include "ckm/error.hpp"

namespace ckm {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroNorm: return "ZeroNorm";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ClassIndexOutOfRange: return "ClassIndexOutOfRange";
    case Errc::MalformedSnapshot: return "MalformedSnapshot";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::DegeneratePair: return "DegeneratePair";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::EmptySelection: return "EmptySelection";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::UndefinedMetric: return "UndefinedMetric";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace ckm
