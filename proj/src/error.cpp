#include "vrcoint/error.hpp"

namespace vrcoint {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidCase: return "InvalidCase";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::SampleTooSmall: return "SampleTooSmall";
        case ErrorCode::DegenerateResiduals: return "DegenerateResiduals";
        case ErrorCode::NearSingularARSum: return "NearSingularARSum";
        case ErrorCode::NumericalSingularity: return "NumericalSingularity";
        case ErrorCode::NoSolutionInRange: return "NoSolutionInRange";
        case ErrorCode::UnitRho: return "UnitRho";
        case ErrorCode::MissingCriticalValue: return "MissingCriticalValue";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::ColumnNotFound: return "ColumnNotFound";
        case ErrorCode::NonNumericData: return "NonNumericData";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace vrcoint
