#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tablemine {

enum class ErrorCode {
  NoTableFound,
  MalformedSpan,
  OverlappingSpans,
  EmptyRuleSet,
  SubHeaderInBody,
  EmptyCorpus,
  UntrackedTerm,
  InvalidRecord,
  InvalidGold,
  LlmTransport,
  UnparseableOutput,
  TokenLimit,
  UnknownModel,
  PortInUse,
  InvalidConfig,
  InvalidInput,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (the CLI,
// the pipeline quarantine) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tablemine
