#include "vrcoint/error.hpp"
#include "vrcoint/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace vrcoint;

namespace {

ExperimentPlan small_plan(DeterministicCase dcase, std::vector<std::string> labels, int reps = 500) {
    ExperimentPlan p;
    p.dcase = dcase;
    p.tests = select_battery(dcase, labels);
    p.replications = reps;
    p.seed = 99;
    p.T_grid = {100};
    return p;
}

double value_at(const RejectionTable& t, const std::string& test, double c) {
    for (const auto& r : t.rows) {
        if (r.test == test && r.c == c) return r.value;
    }
    ADD_FAILURE() << "no row for " << test << " at c=" << c;
    return NAN;
}

}  // namespace

TEST(Battery, StandardLabels) {
    const auto d1 = standard_battery(DeterministicCase::D1);
    ASSERT_EQ(d1.size(), 9u);
    EXPECT_EQ(d1[0].label, "vr");
    EXPECT_EQ(d1[1].detrend, DetrendMode::gls(-40.25));
    const auto d0 = standard_battery(DeterministicCase::D0);
    for (const auto& t : d0) EXPECT_FALSE(t.detrend.is_gls());
    const std::string bad[] = {"nope"};
    EXPECT_THROW(select_battery(DeterministicCase::D1, bad), Error);
}

TEST(Power, NullRowEqualsLevel) {
    auto plan = small_plan(DeterministicCase::D1, {"vr", "adf", "msb-gls*", "zalpha"});
    plan.c_grid = {0.0, -10.0};
    const auto t = size_corrected_power(plan);
    for (const auto& r : t.rows) {
        if (r.c == 0.0) EXPECT_DOUBLE_EQ(r.value, 0.05) << r.test;
    }
}

TEST(Power, DeterministicAcrossWorkers) {
    auto plan = small_plan(DeterministicCase::D2, {"vr-gls", "adf*"}, 200);
    plan.c_grid = {0.0, -15.0};
    plan.dynamics = {ShortRunDynamics::ar(0.5)};
    plan.r2_grid = {0.4};
    auto many = plan;
    many.workers = 4;
    std::ostringstream a, b;
    write_rejection_csv(a, size_corrected_power(plan).rows);
    write_rejection_csv(b, size_corrected_power(many).rows);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Power, ZeroLambdaMatchesPowerPoint) {
    auto plan = small_plan(DeterministicCase::D1, {"vr", "adf"}, 300);
    plan.c_grid = {0.0, -10.0};
    plan.lambda_grid = {0.0, 2.0};
    const auto power = size_corrected_power(plan);
    const auto u0 = large_u0_power(plan, -10.0);
    for (const auto& r : u0.rows) {
        if (r.lambda_u == 0.0) EXPECT_EQ(r.value, value_at(power, r.test, -10.0)) << r.test;
    }
}

TEST(Power, VrDetectsDistantAlternative) {
    auto plan = small_plan(DeterministicCase::D1, {"vr"}, 1000);
    plan.T_grid = {250};
    plan.c_grid = {0.0, -60.0};
    EXPECT_GT(value_at(size_corrected_power(plan), "vr", -60.0), 0.5);
}

TEST(Power, ZalphaBeatsMsbWithTrendAndCorrelation) {
    auto plan = small_plan(DeterministicCase::D2, {"zalpha", "msb-gls*"}, 1000);
    plan.r2_grid = {0.4};
    plan.c_grid = {0.0, -30.0};
    const auto t = size_corrected_power(plan);
    EXPECT_GT(value_at(t, "zalpha", -30.0), value_at(t, "msb-gls*", -30.0));
}

TEST(Size, MissingCriticalValue) {
    auto plan = small_plan(DeterministicCase::D1, {"vr"}, 100);
    try {
        empirical_size(plan, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingCriticalValue);
    }
}

TEST(Size, UsesSuppliedCriticalValue) {
    auto plan = small_plan(DeterministicCase::D1, {"vr"}, 400);
    QuantileTable q;
    q.test = TestKind::VR;
    q.dcase = DeterministicCase::D1;
    q.levels = {0.05};
    q.values = {1e9};
    const QuantileTable tables[] = {q};
    const auto t = empirical_size(plan, tables);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].value, 1.0);
    EXPECT_EQ(t.rows[0].experiment, "size");
}

TEST(Cells, SharedStreamsAcrossC) {
    CellSpec cell;
    cell.dcase = DeterministicCase::D1;
    const auto tests = select_battery(DeterministicCase::D1, std::vector<std::string>{"vr", "adf"});
    const auto a = simulate_cell(cell, tests, 50, 3);
    const auto b = simulate_cell(cell, tests, 50, 3, 3);
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.size(), 2u);
    ASSERT_EQ(a[0].size(), 50u);
}

TEST(Rates, RejectionRate) {
    const double s[] = {1, 2, 3, 4};
    EXPECT_EQ(rejection_rate(s, 2.0), 0.5);
    EXPECT_EQ(rejection_rate(s, 0.5), 0.0);
    const double inf[] = {INFINITY, 1.0};
    EXPECT_EQ(rejection_rate(inf, 5.0), 0.5);
}

TEST(Plan, Validation) {
    auto plan = small_plan(DeterministicCase::D1, {"vr"}, 50);
    EXPECT_THROW(validate(plan), Error);
    plan.replications = 500;
    plan.c_grid = {1.0};
    EXPECT_THROW(validate(plan), Error);
    plan.c_grid = {-5.0};
    EXPECT_THROW(size_corrected_power(plan), Error);
    const auto grid = default_c_grid(60, 21);
    ASSERT_EQ(grid.size(), 21u);
    EXPECT_EQ(grid.front(), 0.0);
    EXPECT_EQ(grid.back(), -60.0);
    auto other = small_plan(DeterministicCase::D1, {"vr"}, 500);
    EXPECT_EQ(plan_hash(other), plan_hash(small_plan(DeterministicCase::D1, {"vr"}, 500)));
    other.seed = 1;
    EXPECT_NE(plan_hash(other), plan_hash(small_plan(DeterministicCase::D1, {"vr"}, 500)));
}

TEST(Output, CsvLayouts) {
    auto plan = small_plan(DeterministicCase::D1, {"vr", "adf-gls"}, 100);
    plan.c_grid = {0.0, -5.0};
    const auto t = size_corrected_power(plan);
    std::ostringstream csv;
    write_rejection_csv(csv, t.rows);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "experiment,test,case,detrend,criterion,dynamics,r2,T,c,lambda_u,value,replications,seed");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 4);
    EXPECT_NE(csv.str().find("gls(-40.25)"), std::string::npos);

    std::ostringstream pivot;
    write_pivot_csv(pivot, t.rows);
    std::istringstream pin(pivot.str());
    std::getline(pin, line);
    EXPECT_EQ(line.rfind("# power", 0), 0u);
    std::getline(pin, line);
    EXPECT_EQ(line, "c,vr,adf-gls");
    std::getline(pin, line);
    EXPECT_EQ(line.rfind("0,0.05,0.05", 0), 0u);
}
