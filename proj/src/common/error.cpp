#include "dialect_eval/common/error.hpp"

namespace de {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::ParseError: return "ParseError";
        case Errc::DuplicateId: return "DuplicateId";
        case Errc::InvalidDialect: return "InvalidDialect";
        case Errc::EmptyField: return "EmptyField";
        case Errc::EmptyQuery: return "EmptyQuery";
        case Errc::MissingEmbedding: return "MissingEmbedding";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::ZeroVector: return "ZeroVector";
        case Errc::NoCandidates: return "NoCandidates";
        case Errc::EmptyReference: return "EmptyReference";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::MalformedJson: return "MalformedJson";
        case Errc::MissingField: return "MissingField";
        case Errc::ScoreOutOfRange: return "ScoreOutOfRange";
        case Errc::LikertOutOfRange: return "LikertOutOfRange";
        case Errc::ConfidenceOutOfRange: return "ConfidenceOutOfRange";
        case Errc::Timeout: return "Timeout";
        case Errc::GatewayError: return "GatewayError";
        case Errc::ExhaustedRetries: return "ExhaustedRetries";
        case Errc::ZeroVariance: return "ZeroVariance";
        case Errc::DegenerateSeries: return "DegenerateSeries";
        case Errc::InvalidSeries: return "InvalidSeries";
        case Errc::UnknownVerdictRef: return "UnknownVerdictRef";
        case Errc::EmptyLog: return "EmptyLog";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::CorruptLog: return "CorruptLog";
        case Errc::Io: return "Io";
        case Errc::BindError: return "BindError";
        case Errc::Killed: return "Killed";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

Error::Error(Errc code, const std::string& message, std::size_t line)
    : std::runtime_error(std::string(errc_name(code)) + " (line " + std::to_string(line) + "): " + message),
      code_(code),
      line_(line) {}

}  // namespace de
