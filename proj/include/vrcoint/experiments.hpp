#pragma once

#include "vrcoint/asymptotics.hpp"
#include "vrcoint/dgp.hpp"
#include "vrcoint/statistics.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vrcoint {

/// One test variant of a simulation study.
struct TestSpec {
    std::string label;  ///< e.g. "vr", "adf-gls*"
    TestKind kind = TestKind::VR;
    DetrendMode detrend;
    TestOptions options;
};

/// The nine variants compared in the finite-sample study for a case
/// (GLS constants from published_cbar with m = 1; no GLS variants for D0).
std::vector<TestSpec> standard_battery(DeterministicCase dcase);

/// Picks variants from standard_battery by label; throws InvalidConfig for
/// unknown labels.
std::vector<TestSpec> select_battery(DeterministicCase dcase, std::span<const std::string> labels);

struct ExperimentPlan {
    DeterministicCase dcase = DeterministicCase::D1;
    std::vector<ShortRunDynamics> dynamics{ShortRunDynamics::iid()};
    std::vector<double> r2_grid{0.0};
    std::vector<Eigen::Index> T_grid{100};
    std::vector<TestSpec> tests;
    int replications = 2000;
    double level = 0.05;
    std::vector<double> c_grid;       ///< nonpositive, must contain 0 for power studies
    std::vector<double> lambda_grid;  ///< large-u0 study only
    U0Rule u0_rule = U0Rule::LargeFixed;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

/// Throws InvalidConfig for fewer than 100 replications, an empty test list,
/// a level outside (0, 1) or a positive c.
void validate(const ExperimentPlan& plan);

/// c grid of `points` equidistant values from 0 down to -c_max.
std::vector<double> default_c_grid(double c_max = 60.0, int points = 21);

struct RejectionRow {
    std::string experiment;  ///< size, power, u0 or lap
    std::string test;
    DeterministicCase dcase = DeterministicCase::D1;
    DetrendMode detrend;
    std::string criterion;  ///< lag criterion, kernel, or "none"
    std::string dynamics;
    double r2 = 0.0;
    Eigen::Index T = 0;
    double c = 0.0;
    double lambda_u = 0.0;
    double value = 0.0;
    std::int64_t replications = 0;
    std::uint64_t seed = 0;
};

struct RejectionTable {
    std::vector<RejectionRow> rows;
    std::string plan_hash;  ///< FNV-1a digest of the plan, hex
};

std::string plan_hash(const ExperimentPlan& plan);

/// One simulated design point.
struct CellSpec {
    DeterministicCase dcase = DeterministicCase::D1;
    ShortRunDynamics dynamics;
    double r_squared = 0.0;
    Eigen::Index T = 100;
    double c = 0.0;  ///< rho = 1 + c / T
    U0Rule u0_rule = U0Rule::Zero;
    double lambda_u = 0.0;
};

/// Statistics of every test on the same replications: result[j][r] is test j
/// on replication r, which draws its sample from stream (seed, r). A test
/// that fails numerically on a sample records +infinity (never rejects).
std::vector<std::vector<double>> simulate_cell(const CellSpec& cell,
                                               std::span<const TestSpec> tests, int replications,
                                               std::uint64_t seed, unsigned workers = 1);

/// Share of values at or below `critical`.
double rejection_rate(std::span<const double> stats, double critical);

/// Null rejection frequencies at asymptotic critical values (m = 1).
/// Throws MissingCriticalValue when a test has no table entry.
RejectionTable empirical_size(const ExperimentPlan& plan, std::span<const QuantileTable> critvals);

/// Size-corrected power over plan.c_grid: the level quantile of the c = 0
/// draws is the critical value for every c, and all c share streams.
RejectionTable size_corrected_power(const ExperimentPlan& plan);

/// Size-corrected power at fixed c < 0 over plan.lambda_grid, with the
/// critical values of the lambda_u = 0 null.
RejectionTable large_u0_power(const ExperimentPlan& plan, double c);

void write_rejection_csv(std::ostream& out, std::span<const RejectionRow> rows);

/// Wide layout for plotting: one block per (experiment, dynamics, r2, T) with
/// x = c or lambda_u in rows and one column per test.
void write_pivot_csv(std::ostream& out, std::span<const RejectionRow> rows);

}  // namespace vrcoint
