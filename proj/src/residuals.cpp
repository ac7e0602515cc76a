#include "vrcoint/residuals.hpp"

#include "vrcoint/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace vrcoint {

ResidualSeries cointegrating_residuals(const Vector& y, const SeriesMatrix& X,
                                       DeterministicCase dcase, const DetrendMode& mode) {
    validate(dcase, mode);
    const auto T = y.size();
    const auto m = X.cols();
    if (X.rows() != T) {
        std::ostringstream msg;
        msg << "y has " << T << " observations but X has " << X.rows();
        raise(ErrorCode::DimensionMismatch, msg.str());
    }
    if (m < 1) raise(ErrorCode::DimensionMismatch, "at least one regressor is required");
    if (T <= m + deterministic_dimension(dcase) + 2) {
        std::ostringstream msg;
        msg << "T=" << T << " too small for m=" << m << " regressors in case " << to_string(dcase);
        raise(ErrorCode::SampleTooSmall, msg.str());
    }

    SeriesMatrix z(T, 1 + m);
    z.col(0) = y;
    z.rightCols(m) = X;
    const SeriesMatrix detrended = detrend(z, dcase, mode);

    const auto fit = least_squares(SeriesMatrix(detrended.rightCols(m)), Vector(detrended.col(0)));
    Vector u = fit.residuals;
    // an exact fit leaves rounding noise only; treat it as exactly zero so the
    // statistics report degenerate residuals instead of dividing noise by noise
    const double scale = detrended.col(0).norm();
    if (u.norm() <= 64.0 * std::numeric_limits<double>::epsilon() * scale * std::sqrt(double(T))) {
        u.setZero();
    }
    return ResidualSeries{u, fit.coefficients, dcase, mode};
}

}  // namespace vrcoint
