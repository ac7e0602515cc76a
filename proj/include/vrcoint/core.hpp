#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vrcoint {

using Vector = Eigen::VectorXd;
/// Dense T x k series container: one row per time point, one column per series.
using SeriesMatrix = Eigen::MatrixXd;

/// Relative singular-value threshold below which a design is rank deficient.
inline constexpr double kRankTolerance = 1e-10;

struct LeastSquaresFit {
    Vector coefficients;
    Vector residuals;
    Eigen::MatrixXd unscaled_covariance;  ///< (X'X)^{-1}
};

struct MultiLeastSquaresFit {
    Eigen::MatrixXd coefficients;  // k x q
    SeriesMatrix residuals;        // T x q
};

/// Least squares of y on the columns of X by Householder QR.
/// Throws RankDeficient when sigma_min(X) < kRankTolerance * sigma_max(X).
LeastSquaresFit least_squares(const SeriesMatrix& X, const Vector& y);

/// Column-by-column least squares of Y on X sharing a single factorization.
MultiLeastSquaresFit least_squares(const SeriesMatrix& X, const SeriesMatrix& Y);

/// output[t] = sum_{s <= t} v[s]
Vector partial_sums(std::span<const double> v);

/// Lower empirical quantile: the ceil(level * N)-th order statistic.
double empirical_quantile(std::span<const double> draws, double level);

/// 1-based rank used by empirical_quantile, clamped to [1, N].
std::size_t quantile_rank(std::size_t n, double level);

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
/// executed exactly once; callers write results into slot i so the outcome
/// does not depend on the worker count. workers == 0 means hardware
/// concurrency.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

inline std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace vrcoint
