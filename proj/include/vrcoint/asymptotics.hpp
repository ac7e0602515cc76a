#pragma once

#include "vrcoint/core.hpp"
#include "vrcoint/detrend.hpp"
#include "vrcoint/rng.hpp"
#include "vrcoint/statistics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace vrcoint {

/// Describes one limiting-distribution functional.
struct LimitSpec {
    TestKind test = TestKind::VR;
    DeterministicCase dcase = DeterministicCase::D0;
    DetrendMode detrend;
    int m = 1;
    double c = 0.0;          ///< local-to-unity parameter, rho_T = 1 + c/T
    double r_squared = 0.0;  ///< squared long-run correlation, in [0, 1)
    int grid_n = 10000;
    std::int64_t replications = 10000;
    std::uint64_t seed = 0;
};

/// Throws InvalidConfig for c > 0, R^2 outside [0, 1), grid_n < 100, m < 1,
/// or GLS/Z_alpha combinations the limit theory does not cover.
void validate(const LimitSpec& spec);

/// Brownian motions on the grid r_i = i / n, i = 1..n, built from normalized
/// partial sums of standard normals.
struct PathBundle {
    Vector w_perp;             ///< W_{xi.v}
    SeriesMatrix w_v;          ///< W_v, n x m
    Vector j_c;                ///< OU process J^c driven by B
    Vector driver_increments;  ///< dB = dW_{xi.v} + sqrt(R^2/(1-R^2)) d(m^{-1/2} 1'W_v)
    SeriesMatrix w_v_increments;
};

PathBundle simulate_paths(const LimitSpec& spec, RngStream& rng);

/// Continuous-time OLS detrending of a path on the grid r_i = i/n with
/// Riemann-sum integrals. D0 is the identity.
Vector detrend_path(std::span<const double> path, DeterministicCase dcase);

/// GLS counterpart: D1 leaves the path untouched, D2 subtracts
/// (lambda P(1) + 3 (1 - lambda) int s P(s) ds) r.
Vector gls_detrend_path(std::span<const double> path, DeterministicCase dcase, double c_bar);

/// One draw of the VR limit G_{VR,c} (or its GLS analogue). Throws
/// NumericalSingularity if int W_v W_v' is singular on the grid.
double limit_vr_draw(const LimitSpec& spec, RngStream& rng);

/// One draw of the ADF, MSB or Z_alpha local limit.
double limit_competitor_draw(const LimitSpec& spec, RngStream& rng);

/// Dispatches on spec.test.
double limit_draw(const LimitSpec& spec, RngStream& rng);

struct LimitSample {
    std::vector<double> draws;  ///< one per replication, in replication order
    std::int64_t resamples = 0;
};

/// Draws spec.replications values; replication r uses stream (seed, r).
/// Singular replications are redrawn from stream r + k * 2^40, k = 1, 2, ...
LimitSample simulate_limit(const LimitSpec& spec, unsigned workers = 1,
                           std::uint64_t first_stream = 0);

struct QuantileTable {
    TestKind test = TestKind::VR;
    DeterministicCase dcase = DeterministicCase::D0;
    DetrendMode detrend;
    int m = 1;
    std::vector<double> levels;
    std::vector<double> values;
    std::int64_t replications = 0;
    int grid_n = 0;
    std::uint64_t seed = 0;
    std::int64_t resamples = 0;
};

/// Null (c = 0, R^2 = 0) quantiles for every m in m_list.
std::vector<QuantileTable> tabulate_critical_values(TestKind test, DeterministicCase dcase,
                                                    const DetrendMode& detrend,
                                                    std::span<const int> m_list,
                                                    std::span<const double> levels,
                                                    std::int64_t replications, int grid_n,
                                                    std::uint64_t seed, unsigned workers = 1);

/// Tab-separated, one row per (table, level), values at 5 significant digits.
void write_quantile_tables(std::ostream& out, std::span<const QuantileTable> tables);
std::vector<QuantileTable> read_quantile_tables(std::istream& in);

/// Finds the matching critical value. GLS D1 limits do not depend on c_bar,
/// so c_bar is ignored there.
std::optional<double> lookup_critical_value(std::span<const QuantileTable> tables, TestKind test,
                                            DeterministicCase dcase, const DetrendMode& detrend,
                                            int m, double level);

struct CbarCalibration {
    double c_bar = 0.0;
    double power = 0.0;
    /// (c_bar, power) pairs evaluated by the search, in evaluation order.
    std::vector<std::pair<double, double>> evaluated;
};

/// c_bar on a 0.25 grid over [-100, 0] at which the GLS VR test has local
/// power closest to one half against c = c_bar when R^2 = 0.4, each
/// candidate using its own 5% null quantile and common random numbers.
CbarCalibration calibrate_cbar(DeterministicCase dcase, int m, std::int64_t replications,
                               int grid_n, std::uint64_t seed, unsigned workers = 1);

/// Rejection frequency at each c of c_grid against the empirical level
/// quantile of the c = 0 draws. Every c reuses the same streams, so the c = 0
/// entry equals ceil(level N) / N.
std::vector<double> local_power_curve(TestKind test, DeterministicCase dcase,
                                      const DetrendMode& detrend, int m, double r_squared,
                                      std::span<const double> c_grid, double level,
                                      std::int64_t replications, int grid_n, std::uint64_t seed,
                                      unsigned workers = 1);

/// Published GLS constants for the VR test, m = 1..5 (nullopt outside).
std::optional<double> published_cbar(DeterministicCase dcase, int m);

}  // namespace vrcoint
