#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vrcoint {

enum class ErrorCode {
    RankDeficient,
    DimensionMismatch,
    EmptyInput,
    InvalidArgument,
    InvalidCase,
    InvalidConfig,
    SampleTooSmall,
    DegenerateResiduals,
    NearSingularARSum,
    NumericalSingularity,
    NoSolutionInRange,
    UnitRho,
    MissingCriticalValue,
    FileNotFound,
    ColumnNotFound,
    NonNumericData,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace vrcoint
