#pragma once

#include <stdexcept>
#include <string>

namespace mlnet {

enum class ErrorCode {
    InvalidArgument = 1,
    UnknownNode,
    DuplicateNode,
    NegativeWeight,
    NonFiniteWeight,
    NonPositivePrice,
    AlreadyDirected,
    NodeSetMismatch,
    MissingLayer,
    DuplicateLayer,
    ParseError,
    BothExtSourcesProvided,
    IoError,
    InvalidConfig,
    InvalidDamping,
    DegenerateSample,
    LengthMismatch,
    BetaOutOfRange,
    EmptyLayer,
    UnknownSeed,
    NoConvergence,
    ConfigError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the C
/// API maps them one-to-one onto mlnet_status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mlnet
