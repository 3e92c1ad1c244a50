#include "aq/error.hpp"

namespace aq {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownStation: return "UnknownStation";
        case ErrorCode::DuplicateObservation: return "DuplicateObservation";
        case ErrorCode::TooFewValues: return "TooFewValues";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::LagTooLarge: return "LagTooLarge";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::SeriesHasGaps: return "SeriesHasGaps";
        case ErrorCode::AllTied: return "AllTied";
        case ErrorCode::NonPositiveBaseline: return "NonPositiveBaseline";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DuplicateCoordinates: return "DuplicateCoordinates";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::AllCoincident: return "AllCoincident";
        case ErrorCode::TooFewBins: return "TooFewBins";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::EmptyNeighborhood: return "EmptyNeighborhood";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::DuplicateLocations: return "DuplicateLocations";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::NoOobCoverage: return "NoOobCoverage";
        case ErrorCode::EmptyCell: return "EmptyCell";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::NoData: return "NoData";
        case ErrorCode::InsufficientCoverage: return "InsufficientCoverage";
    }
    return "Unknown";
}

}  // namespace aq
