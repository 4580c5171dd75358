#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace de {

enum class Errc {
    ParseError,
    DuplicateId,
    InvalidDialect,
    EmptyField,
    EmptyQuery,
    MissingEmbedding,
    DimensionMismatch,
    ZeroVector,
    NoCandidates,
    EmptyReference,
    EmptyInput,
    MalformedJson,
    MissingField,
    ScoreOutOfRange,
    LikertOutOfRange,
    ConfidenceOutOfRange,
    Timeout,
    GatewayError,
    ExhaustedRetries,
    ZeroVariance,
    DegenerateSeries,
    InvalidSeries,
    UnknownVerdictRef,
    EmptyLog,
    InvalidConfig,
    CorruptLog,
    Io,
    BindError,
    Killed,
    InvalidArgument,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries an Errc so callers (and the
/// Python bindings) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Error(Errc code, const std::string& message, std::size_t line);

    Errc code() const noexcept { return code_; }
    /// 1-based line for ingest errors.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    Errc code_;
    std::optional<std::size_t> line_;
};

/// Gateway failures additionally carry the HTTP status (0 when the request
/// never produced one) and whether a retry may succeed.
class GatewayFailure : public Error {
public:
    GatewayFailure(Errc code, const std::string& message, int status, bool transient)
        : Error(code, message), status_(status), transient_(transient) {}

    int status() const noexcept { return status_; }
    bool transient() const noexcept { return transient_; }

private:
    int status_;
    bool transient_;
};

}  // namespace de
