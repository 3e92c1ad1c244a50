#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aq {

enum class ErrorCode {
    InvalidArgument,
    // input / schema
    ParseError,
    UnknownStation,
    DuplicateObservation,
    // statistical preconditions
    TooFewValues,
    ZeroVariance,
    LagTooLarge,
    SeriesTooShort,
    SeriesHasGaps,
    AllTied,
    NonPositiveBaseline,
    DimensionMismatch,
    DuplicateCoordinates,
    TooFewSamples,
    AllCoincident,
    TooFewBins,
    DegenerateFit,
    EmptyNeighborhood,
    SingularSystem,
    DuplicateLocations,
    LengthMismatch,
    EmptyTrainingSet,
    SchemaMismatch,
    NoOobCoverage,
    EmptyCell,
    TooFewRows,
    // data availability
    NoData,
    InsufficientCoverage,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    /// Message without the code prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace aq
