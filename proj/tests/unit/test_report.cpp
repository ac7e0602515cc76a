#include "vrcoint/error.hpp"
#include "vrcoint/report.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

using namespace vrcoint;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

DataSet parse(const std::string& text) {
    std::istringstream in(text);
    return read_table(in, "mem.csv");
}

std::string prices_csv(int rows) {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> z;
    std::ostringstream out;
    out << "date,btc,eth\n";
    double a = 0, b = 0;
    for (int i = 0; i < rows; ++i) {
        a += z(gen);
        b = a + z(gen);
        out << "2024-01-" << (i + 1) << ',' << std::exp(5 + 0.01 * a) << ',' << std::exp(3 + 0.01 * b) << '\n';
    }
    return out.str();
}

}  // namespace

TEST(ReadTable, LabelColumnAndDelimiters) {
    const auto d = parse("date,a,b\n2020-01-01,1,2\n2020-01-02,3,4.5\n");
    EXPECT_EQ(d.label_column, "date");
    ASSERT_EQ(d.columns, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(d.labels[1], "2020-01-02");
    EXPECT_EQ(d.values(1, 1), 4.5);

    const auto s = parse("\xEF\xBB\xBFx;y\n1;2\n3;4\n");
    EXPECT_TRUE(s.label_column.empty());
    EXPECT_EQ(s.columns[0], "x");
    EXPECT_EQ(s.values(1, 0), 3.0);

    const auto t = parse("x\ty\n1\t2\n");
    EXPECT_EQ(t.values(0, 1), 2.0);
}

TEST(ReadTable, Errors) {
    EXPECT_EQ(code_of([] { read_table("/nonexistent/file.csv"); }), ErrorCode::FileNotFound);
    EXPECT_EQ(code_of([] { parse(""); }), ErrorCode::EmptyInput);
    EXPECT_EQ(code_of([] { parse("a,b\n"); }), ErrorCode::EmptyInput);
    try {
        parse("a,b\n1,2\n3,oops\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonNumericData);
        EXPECT_NE(std::string(e.what()).find("oops"), std::string::npos);
    }
}

TEST(SelectColumns, LastAndLog) {
    const auto d = parse("date,a,b,c\nd1,1,2,3\nd2,4,5,6\nd3,7,8,9\n");
    const auto sel = select_columns(d, "c", {"a"}, 2, true);
    ASSERT_EQ(sel.y.size(), 2);
    EXPECT_DOUBLE_EQ(sel.y(0), std::log(6.0));
    EXPECT_DOUBLE_EQ(sel.X(1, 0), std::log(7.0));
    EXPECT_EQ(sel.first_row, 1u);
    EXPECT_EQ(sel.first_label, "d2");
    EXPECT_EQ(sel.last_label, "d3");

    EXPECT_EQ(code_of([&] { select_columns(d, "zz", {"a"}, std::nullopt, false); }), ErrorCode::ColumnNotFound);
    EXPECT_EQ(code_of([&] { select_columns(d, "a", {"a"}, std::nullopt, false); }), ErrorCode::RankDeficient);
    EXPECT_EQ(code_of([&] { select_columns(d, "a", {"b", "b"}, std::nullopt, false); }), ErrorCode::RankDeficient);
    EXPECT_EQ(code_of([&] { select_columns(d, "a", {"b"}, 10, false); }), ErrorCode::SampleTooSmall);
    const auto neg = parse("a,b\n1,-2\n");
    EXPECT_EQ(code_of([&] { select_columns(neg, "a", {"b"}, std::nullopt, true); }), ErrorCode::NonNumericData);
}

TEST(SelectColumns, CollinearColumnIsNamed) {
    std::ostringstream text;
    text << std::setprecision(17) << "y,x1,x2\n";
    for (int i = 1; i <= 30; ++i) text << std::sin(i) << ',' << std::cos(0.3 * i) << ',' << 2 * std::cos(0.3 * i) + 1 << '\n';
    const auto d = parse(text.str());
    const auto sel = select_columns(d, "y", {"x1", "x2"}, std::nullopt, false);
    EXPECT_TRUE(find_collinear_column(sel, DeterministicCase::D1));
    const auto ok = select_columns(d, "y", {"x1"}, std::nullopt, false);
    EXPECT_FALSE(find_collinear_column(ok, DeterministicCase::D1));
}

TEST(Report, DecisionAndNumericIdentity) {
    const auto d = parse(prices_csv(300));
    const auto sel = select_columns(d, "eth", {"btc"}, std::nullopt, true);
    const auto stat = run_test(sel.y, sel.X, DeterministicCase::D1, DetrendMode::ols(), TestKind::VR);

    QuantileTable q;
    q.test = TestKind::VR;
    q.dcase = DeterministicCase::D1;
    q.levels = {0.01, 0.05, 0.1};
    q.values = {stat.value / 2, stat.value * 2, stat.value * 3};
    q.seed = 7;
    const QuantileTable tables[] = {q};
    auto rep = make_report(stat, tables, 0.05, "table.tsv");
    ASSERT_TRUE(rep.decision);
    EXPECT_EQ(*rep.decision, Decision::Reject);
    EXPECT_EQ(make_report(stat, tables, 0.01, "table.tsv").decision, Decision::FailToReject);
    EXPECT_FALSE(make_report(stat, tables, 0.025, "table.tsv").decision);
    EXPECT_EQ(rep.critical_values.size(), 3u);
    EXPECT_EQ(rep.critvals_seed, 7u);

    rep.data_source = "mem.csv";
    rep.lhs = sel.lhs;
    rep.rhs = sel.rhs;
    rep.log_transform = true;
    std::ostringstream json, text;
    write_json(json, {rep});
    write_text(text, {rep});
    const auto j = nlohmann::json::parse(json.str());
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0]["test"], "vr");
    EXPECT_EQ(j[0]["decision"], "reject");
    EXPECT_EQ(j[0]["T"], 300);
    const double from_json = j[0]["statistic"];
    EXPECT_EQ(from_json, stat.value);
    EXPECT_NE(text.str().find(format_number(stat.value)), std::string::npos);
    EXPECT_EQ(std::stod(format_number(stat.value)), stat.value);
}

TEST(Report, NoTableMeansNoDecision) {
    const Vector y = Vector::LinSpaced(50, 0, 1).array().sin();
    SeriesMatrix x = Vector::LinSpaced(50, 0, 2).array().cos();
    const auto stat = run_test(y, x, DeterministicCase::D0, DetrendMode::ols(), TestKind::ADF);
    const auto rep = make_report(stat, {}, 0.05, "");
    EXPECT_FALSE(rep.decision);
    std::ostringstream json;
    write_json(json, {rep});
    EXPECT_TRUE(nlohmann::json::parse(json.str())[0]["decision"].is_null());
}

TEST(FormatNumber, RoundTrips) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(gen) * std::pow(10.0, double(i % 20) - 10);
        EXPECT_EQ(std::stod(format_number(x)), x);
    }
    EXPECT_EQ(format_number(0.05), "0.05");
    EXPECT_EQ(format_number(INFINITY), "inf");
}
