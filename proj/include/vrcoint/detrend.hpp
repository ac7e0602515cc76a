#pragma once

#include "vrcoint/core.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace vrcoint {

/// Deterministic component of the cointegrating regression.
enum class DeterministicCase {
    D0,  ///< none
    D1,  ///< intercept
    D2,  ///< intercept and linear trend
};

/// Number of deterministic regressors p implied by the case.
int deterministic_dimension(DeterministicCase dcase) noexcept;

std::string_view to_string(DeterministicCase dcase) noexcept;
/// Accepts "d0"/"D0" etc.
std::optional<DeterministicCase> parse_case(std::string_view text);

enum class DetrendKind { Ols, Gls };

struct DetrendMode {
    DetrendKind kind = DetrendKind::Ols;
    double c_bar = 0.0;  ///< quasi-differencing constant, GLS only

    static DetrendMode ols() noexcept { return {}; }
    static DetrendMode gls(double c_bar) noexcept { return {DetrendKind::Gls, c_bar}; }

    [[nodiscard]] bool is_gls() const noexcept { return kind == DetrendKind::Gls; }
    friend bool operator==(const DetrendMode&, const DetrendMode&) = default;
};

std::string_view to_string(DetrendKind kind) noexcept;
std::optional<DetrendKind> parse_detrend_kind(std::string_view text);

/// Throws InvalidCase / InvalidArgument for GLS with D0 or a positive c_bar.
void validate(DeterministicCase dcase, const DetrendMode& mode);

/// T x p matrix of deterministic regressors: empty, [1] or [1, t] with t = 1..T.
SeriesMatrix deterministic_regressors(DeterministicCase dcase, Eigen::Index T);

/// Removes the OLS projection on the deterministic regressors from every
/// column; D0 returns z unchanged.
SeriesMatrix ols_detrend(const SeriesMatrix& z, DeterministicCase dcase);

/// GLS detrending by quasi-differencing at rho_bar = 1 + c_bar / T, keeping
/// the first observation in levels.
SeriesMatrix gls_detrend(const SeriesMatrix& z, DeterministicCase dcase, double c_bar);

/// Dispatches on mode.
SeriesMatrix detrend(const SeriesMatrix& z, DeterministicCase dcase, const DetrendMode& mode);

/// Quasi-differenced stack [a_1, a_2 - rho a_1, ..., a_T - rho a_{T-1}].
SeriesMatrix quasi_difference(const SeriesMatrix& a, double rho);

}  // namespace vrcoint
