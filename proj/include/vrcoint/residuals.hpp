#pragma once

#include "vrcoint/core.hpp"
#include "vrcoint/detrend.hpp"

namespace vrcoint {

/// Residuals of the cointegrating regression of detrended y on detrended X.
struct ResidualSeries {
    Vector u_hat;
    Vector beta_hat;
    DeterministicCase dcase = DeterministicCase::D0;
    DetrendMode mode;
};

/// Detrends (y, X) jointly according to `mode` and regresses the detrended y
/// on the detrended X without further deterministic terms.
/// Requires T > m + p + 2. Throws RankDeficient for collinear regressors.
ResidualSeries cointegrating_residuals(const Vector& y, const SeriesMatrix& X,
                                       DeterministicCase dcase, const DetrendMode& mode);

}  // namespace vrcoint
