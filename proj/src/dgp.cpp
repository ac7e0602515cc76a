#include "vrcoint/dgp.hpp"

#include "vrcoint/error.hpp"

#include <cmath>
#include <cstdio>
#include <regex>
#include <sstream>

namespace vrcoint {

void validate(const ShortRunDynamics& d) {
    using K = ShortRunDynamics::Kind;
    const bool uses_phi = d.kind == K::AR || d.kind == K::ARMA;
    const bool uses_theta = d.kind == K::MA || d.kind == K::ARMA;
    if (uses_phi && !(std::abs(d.phi) < 1.0)) raise(ErrorCode::InvalidConfig, "|phi| must be < 1");
    if (uses_theta && !(std::abs(d.theta) < 1.0)) {
        raise(ErrorCode::InvalidConfig, "|theta| must be < 1");
    }
    if (d.kind == K::GARCH && !(d.a1 >= 0.0 && d.a2 >= 0.0 && d.a1 + d.a2 < 1.0)) {
        raise(ErrorCode::InvalidConfig, "GARCH needs a1, a2 >= 0 and a1 + a2 < 1");
    }
}

std::string to_string(const ShortRunDynamics& d) {
    char buf[96];
    switch (d.kind) {
        case ShortRunDynamics::Kind::IID: return "iid";
        case ShortRunDynamics::Kind::AR: std::snprintf(buf, sizeof buf, "ar(%g)", d.phi); break;
        case ShortRunDynamics::Kind::MA: std::snprintf(buf, sizeof buf, "ma(%g)", d.theta); break;
        case ShortRunDynamics::Kind::ARMA:
            std::snprintf(buf, sizeof buf, "arma(%g,%g)", d.phi, d.theta);
            break;
        case ShortRunDynamics::Kind::GARCH:
            std::snprintf(buf, sizeof buf, "garch(%g,%g)", d.a1, d.a2);
            break;
    }
    return buf;
}

std::optional<ShortRunDynamics> parse_dynamics(std::string_view text) {
    static const std::regex pattern(
        R"(^\s*(iid|ar|ma|arma|garch)\s*(?:\(\s*([-+0-9.eE]+)\s*(?:,\s*([-+0-9.eE]+)\s*)?\))?\s*$)",
        std::regex::icase);
    std::cmatch match;
    const std::string s(text);
    if (!std::regex_match(s.c_str(), match, pattern)) return std::nullopt;
    std::string name = match[1];
    for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const bool has1 = match[2].matched;
    const bool has2 = match[3].matched;
    double p1 = 0.0;
    double p2 = 0.0;
    try {
        if (has1) p1 = std::stod(match[2]);
        if (has2) p2 = std::stod(match[3]);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (name == "iid" && !has1) return ShortRunDynamics::iid();
    if (name == "ar" && has1 && !has2) return ShortRunDynamics::ar(p1);
    if (name == "ma" && has1 && !has2) return ShortRunDynamics::ma(p1);
    if (name == "arma" && has2) return ShortRunDynamics::arma(p1, p2);
    if (name == "garch" && has2) return ShortRunDynamics::garch(p1, p2);
    return std::nullopt;
}

void validate(const DgpConfig& c) {
    validate(c.dynamics);
    if (c.T < 10) raise(ErrorCode::InvalidConfig, "T must be >= 10");
    if (!(c.r_squared >= 0.0 && c.r_squared < 1.0)) {
        raise(ErrorCode::InvalidConfig, "R^2 must lie in [0, 1)");
    }
    if (c.burn_in < 0) raise(ErrorCode::InvalidConfig, "burn_in must be >= 0");
    if (!std::isfinite(c.rho)) raise(ErrorCode::InvalidConfig, "rho must be finite");
}

double large_u0(double lambda_u, double rho, U0Rule rule, RngStream& rng) {
    if (rule == U0Rule::Zero) return 0.0;
    if (!(std::abs(rho) < 1.0)) raise(ErrorCode::UnitRho, "large u0 needs |rho| < 1");
    const double scale = lambda_u / std::sqrt(1.0 - rho * rho);
    return rule == U0Rule::LargeFixed ? scale : scale * rng.normal();
}

Sample generate_sample(const DgpConfig& c, RngStream& rng) {
    validate(c);
    const double sigma = std::sqrt(c.r_squared);
    const double sigma_c = std::sqrt(1.0 - c.r_squared);
    const auto& d = c.dynamics;
    using K = ShortRunDynamics::Kind;

    double x0 = 0.0;
    double mu = 0.0;
    double tau0 = 0.0;
    double tau1 = 0.0;
    if (c.dcase == DeterministicCase::D1) {
        x0 = 1.0;
        tau0 = 1.0;
    } else if (c.dcase == DeterministicCase::D2) {
        x0 = 1.0;
        mu = 1.0;
        tau0 = 1.0;
        tau1 = 1.0;
    }

    Sample s;
    s.y.resize(c.T);
    s.X.resize(c.T, 1);

    // state at t = -burn_in
    double u = 0.0;
    double xi_prev = 0.0;
    double eps_prev = 0.0;
    double h = 1.0;
    double v_sum = 0.0;
    for (Eigen::Index t = -c.burn_in + 1; t <= c.T; ++t) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double eps = z1;
        const double v = sigma * z1 + sigma_c * z2;

        double xi = 0.0;
        switch (d.kind) {
            case K::IID: xi = eps; break;
            case K::AR: xi = d.phi * xi_prev + eps; break;
            case K::MA: xi = eps - d.theta * eps_prev; break;
            case K::ARMA: xi = d.phi * xi_prev + eps - d.theta * eps_prev; break;
            case K::GARCH:
                h = (1.0 - d.a1 - d.a2) + d.a1 * xi_prev * xi_prev + d.a2 * h;
                xi = std::sqrt(h) * eps;
                break;
        }
        // lambda_u = 0 keeps the burn-in value, so the baseline design is nested
        if (t == 1 && c.u0_rule != U0Rule::Zero && c.lambda_u != 0.0) {
            u = large_u0(c.lambda_u, c.rho, c.u0_rule, rng);
        }
        u = c.rho * u + xi;
        xi_prev = xi;
        eps_prev = eps;

        if (t >= 1) {
            v_sum += v;
            const auto i = t - 1;
            const double td = static_cast<double>(t);
            const double x = x0 + mu * td + v_sum;
            s.X(i, 0) = x;
            s.y(i) = tau0 + tau1 * td + x + u;
        }
    }
    return s;
}

Eigen::Matrix2d longrun_covariance(const ShortRunDynamics& d, double sigma_ev) {
    using K = ShortRunDynamics::Kind;
    double phi = 0.0;
    double theta = 0.0;
    if (d.kind == K::AR || d.kind == K::ARMA) phi = d.phi;
    if (d.kind == K::MA || d.kind == K::ARMA) theta = d.theta;
    const double g = (1.0 - theta) / (1.0 - phi);
    Eigen::Matrix2d omega;
    omega << g * g, g * sigma_ev, g * sigma_ev, 1.0;
    return omega;
}

double implied_r_squared(const Eigen::Matrix2d& omega) {
    return omega(0, 1) * omega(0, 1) / (omega(0, 0) * omega(1, 1));
}

}  // namespace vrcoint
