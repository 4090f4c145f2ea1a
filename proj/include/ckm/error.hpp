#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ckm {

enum class Errc {
  ZeroNorm,
  DimensionMismatch,
  EmptyInput,
  TooFewSamples,
  TooFewPoints,
  IndexOutOfRange,
  InvalidConfig,
  ClassIndexOutOfRange,
  MalformedSnapshot,
  VersionMismatch,
  DegeneratePair,
  EmptyBatch,
  KTooLarge,
  EmptySelection,
  LengthMismatch,
  LabelOutOfRange,
  UndefinedMetric,
};

std::string_view errc_name(Errc code) noexcept;

// Every library failure is reported through this type; code() identifies the
// failure class so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace ckm
