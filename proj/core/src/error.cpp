#include "tablemine/error.hpp"

namespace tablemine {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoTableFound: return "NoTableFound";
    case ErrorCode::MalformedSpan: return "MalformedSpan";
    case ErrorCode::OverlappingSpans: return "OverlappingSpans";
    case ErrorCode::EmptyRuleSet: return "EmptyRuleSet";
    case ErrorCode::SubHeaderInBody: return "SubHeaderInBody";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::UntrackedTerm: return "UntrackedTerm";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::InvalidGold: return "InvalidGold";
    case ErrorCode::LlmTransport: return "LlmTransport";
    case ErrorCode::UnparseableOutput: return "UnparseableOutput";
    case ErrorCode::TokenLimit: return "TokenLimit";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace tablemine
