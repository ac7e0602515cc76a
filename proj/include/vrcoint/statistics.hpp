#pragma once

#include "vrcoint/core.hpp"
#include "vrcoint/detrend.hpp"
#include "vrcoint/residuals.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vrcoint {

enum class TestKind { VR, ADF, MSB, Zalpha };

std::string_view to_string(TestKind kind) noexcept;
std::optional<TestKind> parse_test_kind(std::string_view text);

enum class LagCriterion { AIC, BIC, MAIC, MBIC };

std::string_view to_string(LagCriterion criterion) noexcept;
std::optional<LagCriterion> parse_criterion(std::string_view text);

enum class KernelType { QuadraticSpectral, Bartlett };

std::string_view to_string(KernelType kernel) noexcept;
std::optional<KernelType> parse_kernel(std::string_view text);

struct KernelSpec {
    KernelType kernel = KernelType::QuadraticSpectral;
    /// Unset selects the Andrews (1991) AR(1) plug-in bandwidth.
    std::optional<double> fixed_bandwidth;
};

struct LagSelection {
    LagCriterion criterion = LagCriterion::AIC;
    int p_max = 0;
    int chosen_p = 0;
    /// Criterion value for p = 0..p_max; NaN where the fit failed.
    std::vector<double> values;
};

/// Everything that determined a statistic, echoed into reports so a run can
/// be reproduced from its output.
struct TestSettings {
    DeterministicCase dcase = DeterministicCase::D0;
    DetrendMode mode;
    Eigen::Index T = 0;
    Eigen::Index m = 0;
    std::optional<int> lag;
    std::optional<LagCriterion> criterion;
    std::optional<int> p_max;
    std::optional<KernelType> kernel;
    std::optional<double> bandwidth;
    std::optional<int> kernel_lags;  ///< number of autocovariance lags summed: floor(bandwidth)
    bool lrv_nonpositive = false;
    std::vector<std::string> notes;
};

struct TestStatistic {
    TestKind kind = TestKind::VR;
    double value = 0.0;
    TestSettings settings;
};

struct TestOptions {
    LagCriterion criterion = LagCriterion::AIC;
    std::optional<int> p_max;      ///< default: default_pmax(T)
    std::optional<int> fixed_lag;  ///< bypasses lag selection
    KernelSpec kernel;
};

// --- variance ratio ---------------------------------------------------------

/// T^{-2} sum_t (sum_{s<=t} u_s)^2 / sum_t u_t^2. Throws DegenerateResiduals
/// when the residuals are identically zero.
double vr_statistic(std::span<const double> u_hat);

// --- ADF / MSB --------------------------------------------------------------

/// OLS fit of  du_t = b0 u_{t-1} + sum_{j=1..p} pi_j du_{t-j} + r_t  over
/// t = first_t..T (1-based), the common building block of ADF, MSB and the
/// information criteria.
struct AdfRegression {
    int p = 0;
    int first_t = 0;
    double b0 = 0.0;
    double se_b0 = 0.0;  ///< classical standard error with RSS / (n - k)
    Vector pi;
    Vector residuals;
    double rss = 0.0;
    double sum_lagged_sq = 0.0;  ///< sum over the fit sample of u_{t-1}^2
};

AdfRegression adf_regression(std::span<const double> u_hat, int p, int first_t);

double adf_statistic(std::span<const double> u_hat, int p);
double msb_statistic(std::span<const double> u_hat, int p);

/// Information criterion for lag p evaluated on the common sample
/// t = p_max + 2..T.
double lag_criterion_value(std::span<const double> u_hat, LagCriterion criterion, int p, int p_max);

LagSelection select_lag(std::span<const double> u_hat, LagCriterion criterion, int p_max);

/// floor(12 (T / 100)^{1/4})
int default_pmax(Eigen::Index T);

// --- Z_alpha ----------------------------------------------------------------

double qs_kernel(double x) noexcept;
double bartlett_kernel(double x) noexcept;
double kernel_weight(KernelType kernel, double x) noexcept;

/// Andrews AR(1) plug-in bandwidth for a given AR coefficient and length.
double andrews_bandwidth_from_rho(double rho, Eigen::Index n, KernelType kernel) noexcept;

/// Fits an AR(1) to k_hat, clamps the coefficient to [-0.97, 0.97] and
/// returns the plug-in bandwidth (or the fixed bandwidth when one is set).
double andrews_bandwidth(std::span<const double> k_hat, const KernelSpec& kernel);

struct ZalphaDetail {
    double value = 0.0;
    double alpha_hat = 0.0;
    double bandwidth = 0.0;
    int kernel_lags = 0;
    double s2_k = 0.0;
    double s2_tb = 0.0;
    bool lrv_nonpositive = false;
};

ZalphaDetail zalpha_detail(std::span<const double> u_hat, const KernelSpec& kernel);
double zalpha_statistic(std::span<const double> u_hat, const KernelSpec& kernel);

// --- pipeline ---------------------------------------------------------------

/// Computes a statistic from already computed residuals. `selection_u_hat`
/// holds the OLS-detrended residuals used by MAIC/MBIC lag selection; pass
/// the statistic's own residuals when they are OLS based.
TestStatistic statistic_from_residuals(TestKind kind, const ResidualSeries& residuals,
                                       std::span<const double> selection_u_hat,
                                       const TestOptions& options);

/// detrend -> residuals -> lag / bandwidth selection -> statistic.
TestStatistic run_test(const Vector& y, const SeriesMatrix& X, DeterministicCase dcase,
                       const DetrendMode& mode, TestKind kind, const TestOptions& options = {});

}  // namespace vrcoint
