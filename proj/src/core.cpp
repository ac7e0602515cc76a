#include "vrcoint/core.hpp"

#include "vrcoint/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace vrcoint {

namespace {

Eigen::HouseholderQR<Eigen::MatrixXd> checked_qr(const SeriesMatrix& X, Eigen::Index rows) {
    if (X.rows() != rows) {
        std::ostringstream msg;
        msg << "regressor rows " << X.rows() << " != response rows " << rows;
        raise(ErrorCode::DimensionMismatch, msg.str());
    }
    if (X.cols() == 0) raise(ErrorCode::DimensionMismatch, "regressor matrix has no columns");
    if (X.rows() <= X.cols()) {
        std::ostringstream msg;
        msg << "least squares needs more rows than columns (T=" << X.rows() << ", k=" << X.cols()
            << ")";
        raise(ErrorCode::SampleTooSmall, msg.str());
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    // singular values of X coincide with those of the k x k triangular factor
    const Eigen::MatrixXd r = qr.matrixQR().topRows(X.cols()).triangularView<Eigen::Upper>();
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(r).singularValues();
    const double largest = sv(0);
    const double smallest = sv(sv.size() - 1);
    if (!(largest > 0.0) || smallest < kRankTolerance * largest) {
        std::ostringstream msg;
        msg << "design matrix is rank deficient (sigma_min/sigma_max = "
            << (largest > 0.0 ? smallest / largest : 0.0) << ")";
        raise(ErrorCode::RankDeficient, msg.str());
    }
    return qr;
}

}  // namespace

LeastSquaresFit least_squares(const SeriesMatrix& X, const Vector& y) {
    const auto qr = checked_qr(X, y.size());
    LeastSquaresFit fit;
    fit.coefficients = qr.solve(y);
    fit.residuals = y - X * fit.coefficients;
    // (X'X)^{-1} = R^{-1} R^{-T}
    const auto k = X.cols();
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    fit.unscaled_covariance = r_inv * r_inv.transpose();
    return fit;
}

MultiLeastSquaresFit least_squares(const SeriesMatrix& X, const SeriesMatrix& Y) {
    const auto qr = checked_qr(X, Y.rows());
    MultiLeastSquaresFit fit;
    fit.coefficients = qr.solve(Y);
    fit.residuals = Y - X * fit.coefficients;
    return fit;
}

Vector partial_sums(std::span<const double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    double running = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
        running += v[t];
        out(static_cast<Eigen::Index>(t)) = running;
    }
    return out;
}

std::size_t quantile_rank(std::size_t n, double level) {
    // the small slack keeps e.g. 0.05 * 100 from rounding up to 6
    const double scaled = level * static_cast<double>(n);
    auto rank = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
    return std::clamp<std::size_t>(rank, 1, n);
}

double empirical_quantile(std::span<const double> draws, double level) {
    if (draws.empty()) raise(ErrorCode::EmptyInput, "empirical_quantile on empty sample");
    if (!(level > 0.0 && level < 1.0)) {
        raise(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1)");
    }
    std::vector<double> sorted(draws.begin(), draws.end());
    const std::size_t k = quantile_rank(sorted.size(), level) - 1;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
    return sorted[k];
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace vrcoint
