#include "vrcoint/statistics.hpp"

#include "vrcoint/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace vrcoint {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

constexpr double kArSumTolerance = 1e-6;
constexpr double kAndrewsRhoClamp = 0.97;

double sum_of_squares(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

std::string_view to_string(TestKind kind) noexcept {
    switch (kind) {
        case TestKind::VR: return "vr";
        case TestKind::ADF: return "adf";
        case TestKind::MSB: return "msb";
        case TestKind::Zalpha: return "zalpha";
    }
    return "?";
}

std::optional<TestKind> parse_test_kind(std::string_view text) {
    const auto key = lower(text);
    if (key == "vr") return TestKind::VR;
    if (key == "adf") return TestKind::ADF;
    if (key == "msb") return TestKind::MSB;
    if (key == "zalpha" || key == "za") return TestKind::Zalpha;
    return std::nullopt;
}

std::string_view to_string(LagCriterion criterion) noexcept {
    switch (criterion) {
        case LagCriterion::AIC: return "aic";
        case LagCriterion::BIC: return "bic";
        case LagCriterion::MAIC: return "maic";
        case LagCriterion::MBIC: return "mbic";
    }
    return "?";
}

std::optional<LagCriterion> parse_criterion(std::string_view text) {
    const auto key = lower(text);
    if (key == "aic") return LagCriterion::AIC;
    if (key == "bic") return LagCriterion::BIC;
    if (key == "maic") return LagCriterion::MAIC;
    if (key == "mbic") return LagCriterion::MBIC;
    return std::nullopt;
}

std::string_view to_string(KernelType kernel) noexcept {
    return kernel == KernelType::QuadraticSpectral ? "qs" : "bartlett";
}

std::optional<KernelType> parse_kernel(std::string_view text) {
    const auto key = lower(text);
    if (key == "qs") return KernelType::QuadraticSpectral;
    if (key == "bartlett") return KernelType::Bartlett;
    return std::nullopt;
}

// --- variance ratio ---------------------------------------------------------

double vr_statistic(std::span<const double> u_hat) {
    if (u_hat.size() < 2) raise(ErrorCode::SampleTooSmall, "VR statistic needs T >= 2");
    const double denom = sum_of_squares(u_hat);
    if (!(denom > 0.0)) raise(ErrorCode::DegenerateResiduals, "residuals are identically zero");
    double running = 0.0;
    double numer = 0.0;
    for (double u : u_hat) {
        running += u;
        numer += running * running;
    }
    const double T = static_cast<double>(u_hat.size());
    return numer / (T * T) / denom;
}

// --- ADF / MSB --------------------------------------------------------------

AdfRegression adf_regression(std::span<const double> u_hat, int p, int first_t) {
    const auto T = static_cast<int>(u_hat.size());
    if (p < 0) raise(ErrorCode::InvalidArgument, "lag order must be nonnegative");
    if (first_t < p + 2) raise(ErrorCode::InvalidArgument, "ADF fit must start at t >= p + 2");
    const int n = T - first_t + 1;
    if (n <= p + 1) {
        std::ostringstream msg;
        msg << "ADF regression with p=" << p << " has only " << n << " observations";
        raise(ErrorCode::SampleTooSmall, msg.str());
    }
    // 1-based accessors: u(t) = u_t, du(t) = u_t - u_{t-1}
    auto u = [&](int t) { return u_hat[static_cast<std::size_t>(t - 1)]; };
    auto du = [&](int t) { return u(t) - u(t - 1); };

    SeriesMatrix design(n, 1 + p);
    Vector response(n);
    for (int row = 0; row < n; ++row) {
        const int t = first_t + row;
        response(row) = du(t);
        design(row, 0) = u(t - 1);
        for (int j = 1; j <= p; ++j) design(row, j) = du(t - j);
    }
    const auto fit = least_squares(design, response);

    AdfRegression reg;
    reg.p = p;
    reg.first_t = first_t;
    reg.b0 = fit.coefficients(0);
    reg.pi = fit.coefficients.tail(p);
    reg.residuals = fit.residuals;
    reg.rss = fit.residuals.squaredNorm();
    reg.sum_lagged_sq = design.col(0).squaredNorm();
    const double s2 = reg.rss / static_cast<double>(n - (1 + p));
    reg.se_b0 = std::sqrt(s2 * fit.unscaled_covariance(0, 0));
    return reg;
}

double adf_statistic(std::span<const double> u_hat, int p) {
    if (static_cast<int>(u_hat.size()) < p + 4) {
        raise(ErrorCode::SampleTooSmall, "ADF statistic needs T >= p + 4");
    }
    const auto reg = adf_regression(u_hat, p, p + 2);
    if (!(reg.se_b0 > 0.0)) raise(ErrorCode::DegenerateResiduals, "ADF regression fits exactly");
    return reg.b0 / reg.se_b0;
}

double msb_statistic(std::span<const double> u_hat, int p) {
    if (static_cast<int>(u_hat.size()) < p + 4) {
        raise(ErrorCode::SampleTooSmall, "MSB statistic needs T >= p + 4");
    }
    const auto reg = adf_regression(u_hat, p, p + 2);
    const double T = static_cast<double>(u_hat.size());
    const double one_minus_pi = 1.0 - reg.pi.sum();
    if (std::abs(one_minus_pi) <= kArSumTolerance) {
        raise(ErrorCode::NearSingularARSum, "1 - sum(pi) is numerically zero");
    }
    const double s2_rp = reg.rss / T;
    const double s2 = s2_rp / (one_minus_pi * one_minus_pi);
    if (!(s2 > 0.0)) raise(ErrorCode::DegenerateResiduals, "MSB spectral estimate is zero");
    return std::sqrt(sum_of_squares(u_hat) / (T * T) / s2);
}

double lag_criterion_value(std::span<const double> u_hat, LagCriterion criterion, int p, int p_max) {
    const auto reg = adf_regression(u_hat, p, p_max + 2);
    const double T = static_cast<double>(u_hat.size());
    const double s2 = reg.rss / T;
    switch (criterion) {
        case LagCriterion::AIC: return std::log(s2) + 2.0 * p / T;
        case LagCriterion::BIC: return std::log(s2) + p * std::log(T) / T;
        case LagCriterion::MAIC:
        case LagCriterion::MBIC: {
            const double n_eff = T - p_max;
            const double s2_mod = T * s2 / n_eff;
            const double tau = reg.b0 * reg.b0 * reg.sum_lagged_sq / s2_mod;
            const double penalty = criterion == LagCriterion::MAIC ? 2.0 : std::log(n_eff);
            return std::log(s2_mod) + penalty * (p + tau) / n_eff;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

LagSelection select_lag(std::span<const double> u_hat, LagCriterion criterion, int p_max) {
    if (p_max < 0) raise(ErrorCode::InvalidArgument, "p_max must be nonnegative");
    if (static_cast<int>(u_hat.size()) <= p_max + 3) {
        std::ostringstream msg;
        msg << "lag selection with p_max=" << p_max << " needs T > " << p_max + 3;
        raise(ErrorCode::SampleTooSmall, msg.str());
    }
    LagSelection sel;
    sel.criterion = criterion;
    sel.p_max = p_max;
    sel.values.assign(static_cast<std::size_t>(p_max + 1), std::numeric_limits<double>::quiet_NaN());
    int best = -1;
    for (int p = 0; p <= p_max; ++p) {
        double value = std::numeric_limits<double>::quiet_NaN();
        try {
            value = lag_criterion_value(u_hat, criterion, p, p_max);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RankDeficient && e.code() != ErrorCode::SampleTooSmall) throw;
        }
        sel.values[static_cast<std::size_t>(p)] = value;
        if (!std::isfinite(value)) continue;
        // strict comparison keeps the smallest p on ties
        if (best < 0 || value < sel.values[static_cast<std::size_t>(best)]) best = p;
    }
    if (best < 0) raise(ErrorCode::DegenerateResiduals, "no lag order gives a finite criterion");
    sel.chosen_p = best;
    return sel;
}

int default_pmax(Eigen::Index T) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
}

// --- Z_alpha ----------------------------------------------------------------

double qs_kernel(double x) noexcept {
    if (x == 0.0) return 1.0;
    const double z = 6.0 * std::numbers::pi * x / 5.0;
    // series form near zero, where the closed form cancels catastrophically
    if (std::abs(z) < 1e-3) return 1.0 - z * z / 10.0;
    return 25.0 / (12.0 * std::numbers::pi * std::numbers::pi * x * x) *
           (std::sin(z) / z - std::cos(z));
}

double bartlett_kernel(double x) noexcept {
    const double a = std::abs(x);
    return a <= 1.0 ? 1.0 - a : 0.0;
}

double kernel_weight(KernelType kernel, double x) noexcept {
    return kernel == KernelType::QuadraticSpectral ? qs_kernel(x) : bartlett_kernel(x);
}

double andrews_bandwidth_from_rho(double rho, Eigen::Index n, KernelType kernel) noexcept {
    rho = std::clamp(rho, -kAndrewsRhoClamp, kAndrewsRhoClamp);
    const double rho2 = rho * rho;
    const double nn = static_cast<double>(n);
    if (kernel == KernelType::QuadraticSpectral) {
        const double alpha2 = 4.0 * rho2 / std::pow(1.0 - rho, 4);
        return 1.3221 * std::pow(alpha2 * nn, 0.2);
    }
    const double alpha1 = 4.0 * rho2 / ((1.0 - rho) * (1.0 - rho) * (1.0 + rho) * (1.0 + rho));
    return 1.1447 * std::cbrt(alpha1 * nn);
}

double andrews_bandwidth(std::span<const double> k_hat, const KernelSpec& kernel) {
    if (kernel.fixed_bandwidth) {
        if (!(*kernel.fixed_bandwidth >= 0.0)) {
            raise(ErrorCode::InvalidArgument, "fixed bandwidth must be nonnegative");
        }
        return *kernel.fixed_bandwidth;
    }
    if (k_hat.size() < 4) raise(ErrorCode::SampleTooSmall, "bandwidth selection needs length >= 4");
    double cross = 0.0;
    double lagged = 0.0;
    for (std::size_t t = 1; t < k_hat.size(); ++t) {
        cross += k_hat[t] * k_hat[t - 1];
        lagged += k_hat[t - 1] * k_hat[t - 1];
    }
    if (!(lagged > 0.0)) raise(ErrorCode::DegenerateResiduals, "bandwidth input is identically zero");
    return andrews_bandwidth_from_rho(cross / lagged, static_cast<Eigen::Index>(k_hat.size()),
                                      kernel.kernel);
}

ZalphaDetail zalpha_detail(std::span<const double> u_hat, const KernelSpec& kernel) {
    const auto T = u_hat.size();
    if (T < 4) raise(ErrorCode::SampleTooSmall, "Z_alpha statistic needs T >= 4");
    double cross = 0.0;
    double lagged = 0.0;
    for (std::size_t t = 1; t < T; ++t) {
        cross += u_hat[t] * u_hat[t - 1];
        lagged += u_hat[t - 1] * u_hat[t - 1];
    }
    if (!(lagged > 0.0)) raise(ErrorCode::DegenerateResiduals, "residuals are identically zero");

    ZalphaDetail out;
    out.alpha_hat = cross / lagged;
    // k[i] holds k_hat_{i+2}, i = 0..T-2
    std::vector<double> k(T - 1);
    for (std::size_t t = 1; t < T; ++t) k[t - 1] = u_hat[t] - out.alpha_hat * u_hat[t - 1];

    const double n = static_cast<double>(T - 1);
    out.s2_k = sum_of_squares(k) / n;
    out.bandwidth = andrews_bandwidth(k, kernel);
    out.kernel_lags = static_cast<int>(
        std::min<double>(std::floor(out.bandwidth), static_cast<double>(k.size() - 1)));

    double correction = 0.0;
    for (int h = 1; h <= out.kernel_lags; ++h) {
        double gamma = 0.0;
        for (std::size_t i = static_cast<std::size_t>(h); i < k.size(); ++i) {
            gamma += k[i] * k[i - static_cast<std::size_t>(h)];
        }
        correction += kernel_weight(kernel.kernel, h / out.bandwidth) * gamma;
    }
    out.s2_tb = out.s2_k + 2.0 * correction / n;
    out.lrv_nonpositive = !(out.s2_tb > 0.0);
    out.value = n * (out.alpha_hat - 1.0) - 0.5 * (out.s2_tb - out.s2_k) / (lagged / (n * n));
    return out;
}

double zalpha_statistic(std::span<const double> u_hat, const KernelSpec& kernel) {
    return zalpha_detail(u_hat, kernel).value;
}

// --- pipeline ---------------------------------------------------------------

TestStatistic statistic_from_residuals(TestKind kind, const ResidualSeries& residuals,
                                       std::span<const double> selection_u_hat,
                                       const TestOptions& options) {
    const auto u = as_span(residuals.u_hat);
    TestStatistic stat;
    stat.kind = kind;
    auto& s = stat.settings;
    s.dcase = residuals.dcase;
    s.mode = residuals.mode;
    s.T = residuals.u_hat.size();
    s.m = residuals.beta_hat.size();
    if (residuals.mode.is_gls() && residuals.mode.c_bar == 0.0) {
        s.notes.emplace_back("c_bar = 0: GLS step reduces to first differences with a level anchor");
    }

    switch (kind) {
        case TestKind::VR:
            stat.value = vr_statistic(u);
            break;
        case TestKind::ADF:
        case TestKind::MSB: {
            int p = 0;
            if (options.fixed_lag) {
                p = *options.fixed_lag;
            } else {
                const int p_max = options.p_max.value_or(default_pmax(s.T));
                const bool modified = options.criterion == LagCriterion::MAIC ||
                                      options.criterion == LagCriterion::MBIC;
                const auto source = modified ? selection_u_hat : u;
                p = select_lag(source, options.criterion, p_max).chosen_p;
                s.criterion = options.criterion;
                s.p_max = p_max;
            }
            s.lag = p;
            stat.value = kind == TestKind::ADF ? adf_statistic(u, p) : msb_statistic(u, p);
            break;
        }
        case TestKind::Zalpha: {
            if (residuals.mode.is_gls()) {
                raise(ErrorCode::InvalidConfig, "Z_alpha is only defined for OLS detrending");
            }
            const auto detail = zalpha_detail(u, options.kernel);
            stat.value = detail.value;
            s.kernel = options.kernel.kernel;
            s.bandwidth = detail.bandwidth;
            s.kernel_lags = detail.kernel_lags;
            s.lrv_nonpositive = detail.lrv_nonpositive;
            if (detail.lrv_nonpositive) {
                s.notes.emplace_back("nonpositive long-run variance estimate");
            }
            break;
        }
    }
    return stat;
}

TestStatistic run_test(const Vector& y, const SeriesMatrix& X, DeterministicCase dcase,
                       const DetrendMode& mode, TestKind kind, const TestOptions& options) {
    if (kind == TestKind::Zalpha && mode.is_gls()) {
        raise(ErrorCode::InvalidConfig, "Z_alpha is only defined for OLS detrending");
    }
    const auto residuals = cointegrating_residuals(y, X, dcase, mode);
    const bool need_ols_selection =
        mode.is_gls() && !options.fixed_lag && (kind == TestKind::ADF || kind == TestKind::MSB) &&
        (options.criterion == LagCriterion::MAIC || options.criterion == LagCriterion::MBIC);
    if (need_ols_selection) {
        const auto ols = cointegrating_residuals(y, X, dcase, DetrendMode::ols());
        return statistic_from_residuals(kind, residuals, as_span(ols.u_hat), options);
    }
    return statistic_from_residuals(kind, residuals, as_span(residuals.u_hat), options);
}

}  // namespace vrcoint
