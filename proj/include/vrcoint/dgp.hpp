#pragma once

#include "vrcoint/core.hpp"
#include "vrcoint/detrend.hpp"
#include "vrcoint/rng.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace vrcoint {

/// Short-run dynamics of xi_t in u_t = rho u_{t-1} + xi_t.
struct ShortRunDynamics {
    enum class Kind { IID, AR, MA, ARMA, GARCH };
    Kind kind = Kind::IID;
    double phi = 0.0;
    double theta = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;

    static ShortRunDynamics iid() noexcept { return {}; }
    static ShortRunDynamics ar(double phi) noexcept { return {Kind::AR, phi, 0.0, 0.0, 0.0}; }
    static ShortRunDynamics ma(double theta) noexcept { return {Kind::MA, 0.0, theta, 0.0, 0.0}; }
    static ShortRunDynamics arma(double phi, double theta) noexcept {
        return {Kind::ARMA, phi, theta, 0.0, 0.0};
    }
    static ShortRunDynamics garch(double a1, double a2) noexcept {
        return {Kind::GARCH, 0.0, 0.0, a1, a2};
    }
};

/// Throws InvalidConfig unless |phi|, |theta| < 1, a1, a2 >= 0 and a1 + a2 < 1.
void validate(const ShortRunDynamics& dynamics);

/// Labels such as "iid", "ar(0.6)", "ma(0.9)", "arma(0.3,0.6)", "garch(0.05,0.94)".
std::string to_string(const ShortRunDynamics& dynamics);
std::optional<ShortRunDynamics> parse_dynamics(std::string_view text);

enum class U0Rule { Zero, LargeFixed, LargeRandom };

struct DgpConfig {
    Eigen::Index T = 100;
    DeterministicCase dcase = DeterministicCase::D1;
    ShortRunDynamics dynamics;
    double r_squared = 0.0;  ///< sigma_ev^2, in [0, 1)
    double rho = 1.0;
    int burn_in = 100;
    U0Rule u0_rule = U0Rule::Zero;
    double lambda_u = 0.0;
};

/// rho_T = 1 + c / T
inline double local_rho(double c, Eigen::Index T) { return 1.0 + c / static_cast<double>(T); }

void validate(const DgpConfig& config);

struct Sample {
    Vector y;
    SeriesMatrix X;  ///< T x 1
};

/// y_t = d_t' tau + x_t + u_t, x_t = x0 + mu t + sum v_s. The error recursion
/// runs from t = -burn_in with zero starting values; with a large-u0 rule u_0
/// is replaced before t = 1 (unless lambda_u = 0, which keeps the burn-in
/// value).
Sample generate_sample(const DgpConfig& config, RngStream& rng);

/// lambda_u / sqrt(1 - rho^2) (LargeFixed) or a normal draw with that
/// standard deviation (LargeRandom); zero for U0Rule::Zero. Throws UnitRho
/// when |rho| >= 1 and a large rule is requested.
double large_u0(double lambda_u, double rho, U0Rule rule, RngStream& rng);

/// Long-run covariance of [xi_t, v_t]'.
Eigen::Matrix2d longrun_covariance(const ShortRunDynamics& dynamics, double sigma_ev);

/// Omega_12^2 / (Omega_11 Omega_22)
double implied_r_squared(const Eigen::Matrix2d& omega);

}  // namespace vrcoint
