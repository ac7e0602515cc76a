// Command-line front end: test, tabulate, calibrate-cbar, simulate.

#include "vrcoint/asymptotics.hpp"
#include "vrcoint/error.hpp"
#include "vrcoint/experiments.hpp"
#include "vrcoint/report.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace vrcoint;

namespace {

#ifndef VRCOINT_DATA_DIR
#define VRCOINT_DATA_DIR "data"
#endif

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidCase:
        case ErrorCode::InvalidConfig:
            return kUsage;
        case ErrorCode::FileNotFound:
        case ErrorCode::ColumnNotFound:
        case ErrorCode::NonNumericData:
        case ErrorCode::EmptyInput:
        case ErrorCode::SampleTooSmall:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::MissingCriticalValue:
            return kData;
        default:
            return kNumerical;
    }
}

// Output goes to a temporary sibling and is renamed into place, so an
// interrupted run never leaves a partial file behind.
char g_temp_path[4096] = {0};

extern "C" void on_interrupt(int sig) {
    if (g_temp_path[0] != 0) ::unlink(g_temp_path);
    std::_Exit(128 + sig);
}

void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& body) {
    const std::string temp = path + ".tmp." + std::to_string(::getpid());
    std::snprintf(g_temp_path, sizeof g_temp_path, "%s", temp.c_str());
    {
        std::ofstream out(temp, std::ios::binary);
        if (!out) raise(ErrorCode::FileNotFound, "cannot write '" + temp + "'");
        body(out);
        out.flush();
        if (!out) raise(ErrorCode::FileNotFound, "write to '" + temp + "' failed");
    }
    std::filesystem::rename(temp, path);
    g_temp_path[0] = 0;
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
    } else {
        write_atomically(path, body);
    }
}

std::vector<std::string> split_list(const std::string& text, char delim = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, delim)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    raise(ErrorCode::InvalidArgument, std::string("invalid ") + what + ": '" + s + "'");
}

std::vector<double> parse_doubles(const std::vector<std::string>& items, const char* what) {
    std::vector<double> out;
    for (const auto& item : items) {
        for (const auto& part : split_list(item)) out.push_back(to_double(part, what));
    }
    return out;
}

/// "3", "1..5", "1-5" or "1,2,4"
std::vector<int> parse_m_range(const std::string& text) {
    std::vector<int> out;
    for (const auto& part : split_list(text)) {
        auto sep = part.find("..");
        std::size_t width = 2;
        if (sep == std::string::npos) {
            sep = part.find('-');
            width = 1;
        }
        if (sep != std::string::npos && sep > 0) {
            const int lo = static_cast<int>(to_double(part.substr(0, sep), "m range"));
            const int hi = static_cast<int>(to_double(part.substr(sep + width), "m range"));
            for (int m = lo; m <= hi; ++m) out.push_back(m);
        } else {
            out.push_back(static_cast<int>(to_double(part, "m")));
        }
    }
    for (int m : out) {
        if (m < 1) raise(ErrorCode::InvalidArgument, "m must be >= 1");
    }
    return out;
}

DeterministicCase case_or_throw(const std::string& s) {
    auto c = parse_case(s);
    if (!c) raise(ErrorCode::InvalidArgument, "unknown case '" + s + "' (d0, d1, d2)");
    return *c;
}

TestKind test_or_throw(const std::string& s) {
    auto t = parse_test_kind(s);
    if (!t) raise(ErrorCode::InvalidArgument, "unknown test '" + s + "' (vr, adf, msb, zalpha)");
    return *t;
}

DetrendKind detrend_or_throw(const std::string& s) {
    auto k = parse_detrend_kind(s);
    if (!k) raise(ErrorCode::InvalidArgument, "unknown detrending '" + s + "' (ols, gls)");
    return *k;
}

/// "auto" resolves to the published constant for (case, m).
double resolve_cbar(const std::string& spec, DeterministicCase dcase, int m) {
    if (spec == "auto") {
        const auto c = published_cbar(dcase, m);
        if (!c) {
            raise(ErrorCode::MissingCriticalValue,
                  "no published c_bar for case " + std::string(to_string(dcase)) + " and m = " +
                      std::to_string(m) + "; pass --cbar explicitly");
        }
        return *c;
    }
    return to_double(spec, "c_bar");
}

std::vector<QuantileTable> load_tables(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::FileNotFound, "cannot open critical value table '" + path + "'");
    return read_quantile_tables(in);
}

std::string default_critvals() { return std::string(VRCOINT_DATA_DIR) + "/critical_values.tsv"; }

// --- test -------------------------------------------------------------------

struct TestArgs {
    std::string input;
    std::string lhs;
    std::string rhs;
    std::string dcase = "d1";
    std::string detrend = "ols";
    std::string cbar = "auto";
    std::string test = "vr";
    std::string criterion = "aic";
    std::string kernel = "qs";
    std::optional<double> bandwidth;
    std::optional<int> lag;
    std::optional<int> p_max;
    double level = 0.05;
    std::optional<std::size_t> last;
    bool log = false;
    std::string format = "text";
    std::string critvals;
    std::string out;
};

int cmd_test(const TestArgs& a) {
    const auto dcase = case_or_throw(a.dcase);
    const auto kind = detrend_or_throw(a.detrend);
    const auto data = read_table(a.input);
    const auto rhs = split_list(a.rhs);
    const auto sel = select_columns(data, a.lhs, rhs, a.last, a.log);
    if (auto bad = find_collinear_column(sel, dcase)) {
        raise(ErrorCode::RankDeficient, "rhs column '" + *bad +
                                            "' is collinear with the other regressors and the "
                                            "deterministic terms");
    }
    const int m = static_cast<int>(rhs.size());
    DetrendMode mode = DetrendMode::ols();
    if (kind == DetrendKind::Gls) mode = DetrendMode::gls(resolve_cbar(a.cbar, dcase, m));

    TestOptions options;
    auto crit = parse_criterion(a.criterion);
    if (!crit) raise(ErrorCode::InvalidArgument, "unknown criterion '" + a.criterion + "'");
    options.criterion = *crit;
    auto kern = parse_kernel(a.kernel);
    if (!kern) raise(ErrorCode::InvalidArgument, "unknown kernel '" + a.kernel + "'");
    options.kernel.kernel = *kern;
    options.kernel.fixed_bandwidth = a.bandwidth;
    options.fixed_lag = a.lag;
    options.p_max = a.p_max;

    std::vector<TestKind> kinds;
    if (a.test == "all") {
        kinds = {TestKind::VR, TestKind::ADF, TestKind::MSB};
        if (!mode.is_gls()) kinds.push_back(TestKind::Zalpha);
    } else {
        for (const auto& t : split_list(a.test)) kinds.push_back(test_or_throw(t));
    }

    std::string critvals_path = a.critvals.empty() ? default_critvals() : a.critvals;
    std::vector<QuantileTable> tables;
    if (std::filesystem::exists(critvals_path)) {
        tables = load_tables(critvals_path);
    } else if (!a.critvals.empty()) {
        raise(ErrorCode::FileNotFound, "cannot open critical value table '" + a.critvals + "'");
    } else {
        critvals_path.clear();
    }

    std::vector<TestReport> reports;
    for (auto k : kinds) {
        TestStatistic stat;
        try {
            stat = run_test(sel.y, sel.X, dcase, mode, k, options);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DegenerateResiduals) {
                raise(ErrorCode::DegenerateResiduals,
                      "lhs column '" + sel.lhs + "' is an exact combination of the rhs columns");
            }
            throw;
        }
        auto report = make_report(stat, tables, a.level, critvals_path);
        report.data_source = data.source;
        report.lhs = sel.lhs;
        report.rhs = sel.rhs;
        report.first_label = sel.first_label;
        report.last_label = sel.last_label;
        report.log_transform = a.log;
        reports.push_back(std::move(report));
    }
    emit(a.out, [&](std::ostream& os) {
        if (a.format == "json") {
            write_json(os, reports);
        } else {
            write_text(os, reports);
        }
    });
    return kOk;
}

// --- tabulate ---------------------------------------------------------------

struct TabulateArgs {
    std::string test = "vr";
    std::string dcase = "d1";
    std::string detrend = "ols";
    std::string cbar = "auto";
    std::string m_range = "1";
    std::string levels = "0.01,0.025,0.05,0.075,0.1,0.15";
    std::int64_t reps = 10000;
    int grid = 10000;
    std::uint64_t seed = 20240101;
    unsigned workers = 1;
    std::string out;
};

int cmd_tabulate(const TabulateArgs& a) {
    const auto m_list = parse_m_range(a.m_range);
    const auto levels = parse_doubles({a.levels}, "level");
    std::vector<QuantileTable> tables;
    // lists expand to every valid combination; GLS with d0 and GLS Z_alpha are skipped
    const auto tests = split_list(a.test);
    const auto cases = split_list(a.dcase);
    const auto kinds = split_list(a.detrend);
    const bool single = tests.size() == 1 && cases.size() == 1 && kinds.size() == 1;
    for (const auto& ts : tests) {
        const auto test = test_or_throw(ts);
        for (const auto& cs : cases) {
            const auto dcase = case_or_throw(cs);
            for (const auto& ks : kinds) {
                const auto kind = detrend_or_throw(ks);
                const bool unsupported = kind == DetrendKind::Gls &&
                                         (dcase == DeterministicCase::D0 || test == TestKind::Zalpha);
                if (unsupported && !single) continue;
                for (int m : m_list) {
                    DetrendMode mode = DetrendMode::ols();
                    if (kind == DetrendKind::Gls) mode = DetrendMode::gls(resolve_cbar(a.cbar, dcase, m));
                    const int one[] = {m};
                    auto t = tabulate_critical_values(test, dcase, mode, one, levels, a.reps, a.grid,
                                                      a.seed, a.workers);
                    for (auto& table : t) {
                        if (table.resamples > 0) {
                            std::cerr << "note: " << to_string(test) << ' ' << to_string(dcase)
                                      << " m=" << m << ": " << table.resamples
                                      << " singular draws resampled\n";
                        }
                        tables.push_back(std::move(table));
                    }
                }
            }
        }
    }
    emit(a.out, [&](std::ostream& os) { write_quantile_tables(os, tables); });
    return kOk;
}

// --- calibrate-cbar ---------------------------------------------------------

struct CalibrateArgs {
    std::string dcase = "d1";
    int m = 1;
    std::int64_t reps = 10000;
    int grid = 10000;
    std::uint64_t seed = 20240101;
    unsigned workers = 1;
    bool verbose = false;
};

int cmd_calibrate(const CalibrateArgs& a) {
    const auto dcase = case_or_throw(a.dcase);
    const auto result = calibrate_cbar(dcase, a.m, a.reps, a.grid, a.seed, a.workers);
    if (a.verbose) {
        for (const auto& [c, p] : result.evaluated) {
            std::cout << "# c_bar=" << format_number(c) << " power=" << format_number(p) << '\n';
        }
    }
    std::cout << format_number(result.c_bar) << '\n';
    if (a.verbose) std::cout << "# power at c_bar: " << format_number(result.power) << '\n';
    return kOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string experiment = "size";
    std::string dcase = "d1";
    std::vector<std::string> dynamics{"iid"};
    std::vector<std::string> r2{"0"};
    std::vector<std::string> T{"100"};
    std::vector<std::string> tests;
    int reps = 2000;
    double level = 0.05;
    std::vector<std::string> c_grid;
    double c_max = 60.0;
    int c_points = 21;
    double c = -20.0;
    std::vector<std::string> lambda{"0", "0.5", "1", "1.5", "2", "2.5", "3"};
    std::string u0_rule = "fixed";
    std::uint64_t seed = 20240101;
    unsigned workers = 1;
    std::string critvals;
    std::string out;
    std::string pivot;
    // lap only
    std::string detrend = "ols";
    std::string cbar = "auto";
    int m = 1;
    int grid = 10000;
};

std::vector<double> c_grid_of(const SimulateArgs& a) {
    if (a.c_grid.empty()) return default_c_grid(a.c_max, a.c_points);
    return parse_doubles(a.c_grid, "c");
}

int cmd_simulate(const SimulateArgs& a) {
    const auto dcase = case_or_throw(a.dcase);
    std::vector<RejectionRow> rows;
    std::string hash;

    if (a.experiment == "lap") {
        const auto kind = detrend_or_throw(a.detrend);
        DetrendMode mode = DetrendMode::ols();
        if (kind == DetrendKind::Gls) mode = DetrendMode::gls(resolve_cbar(a.cbar, dcase, a.m));
        const auto c_grid = c_grid_of(a);
        const auto r2s = parse_doubles(a.r2, "r2");
        std::vector<std::string> labels = a.tests;
        if (labels.empty()) labels = {"vr", "adf", "msb", "zalpha"};
        for (const auto& label : labels) {
            const auto test = test_or_throw(label);
            if (test == TestKind::Zalpha && mode.is_gls()) continue;
            for (double r2 : r2s) {
                const auto power = local_power_curve(test, dcase, mode, a.m, r2, c_grid, a.level,
                                                     a.reps, a.grid, a.seed, a.workers);
                for (std::size_t i = 0; i < c_grid.size(); ++i) {
                    RejectionRow row;
                    row.experiment = "lap";
                    row.test = std::string(to_string(test)) + (mode.is_gls() ? "-gls" : "");
                    row.dcase = dcase;
                    row.detrend = mode;
                    row.criterion = "none";
                    row.dynamics = "limit(m=" + std::to_string(a.m) + ")";
                    row.r2 = r2;
                    row.T = a.grid;
                    row.c = c_grid[i];
                    row.value = power[i];
                    row.replications = a.reps;
                    row.seed = a.seed;
                    rows.push_back(std::move(row));
                }
            }
        }
    } else {
        ExperimentPlan plan;
        plan.dcase = dcase;
        plan.dynamics.clear();
        for (const auto& d : a.dynamics) {
            auto dyn = parse_dynamics(d);
            if (!dyn) raise(ErrorCode::InvalidArgument, "unknown dynamics '" + d + "'");
            plan.dynamics.push_back(*dyn);
        }
        plan.r2_grid = parse_doubles(a.r2, "r2");
        plan.T_grid.clear();
        for (double t : parse_doubles(a.T, "T")) plan.T_grid.push_back(static_cast<Eigen::Index>(t));
        plan.tests = a.tests.empty() ? standard_battery(dcase) : select_battery(dcase, a.tests);
        plan.replications = a.reps;
        plan.level = a.level;
        plan.seed = a.seed;
        plan.workers = a.workers;
        if (a.u0_rule == "fixed") {
            plan.u0_rule = U0Rule::LargeFixed;
        } else if (a.u0_rule == "random") {
            plan.u0_rule = U0Rule::LargeRandom;
        } else {
            raise(ErrorCode::InvalidArgument, "unknown u0 rule '" + a.u0_rule + "' (fixed, random)");
        }

        RejectionTable table;
        if (a.experiment == "size") {
            const auto tables = load_tables(a.critvals.empty() ? default_critvals() : a.critvals);
            table = empirical_size(plan, tables);
        } else if (a.experiment == "power") {
            plan.c_grid = c_grid_of(a);
            table = size_corrected_power(plan);
        } else if (a.experiment == "u0") {
            plan.lambda_grid = parse_doubles(a.lambda, "lambda");
            table = large_u0_power(plan, a.c);
        } else {
            raise(ErrorCode::InvalidArgument,
                  "unknown experiment '" + a.experiment + "' (size, power, lap, u0)");
        }
        rows = std::move(table.rows);
        hash = table.plan_hash;
    }

    emit(a.out, [&](std::ostream& os) { write_rejection_csv(os, rows); });
    if (!a.pivot.empty()) emit(a.pivot, [&](std::ostream& os) { write_pivot_csv(os, rows); });
    if (!hash.empty()) std::cerr << "plan " << hash << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);

    CLI::App app{"Residual-based no-cointegration tests: variance ratio, ADF, MSB and Z_alpha"};
    app.require_subcommand(1);

    TestArgs ta;
    auto* test = app.add_subcommand("test", "run tests on a delimited data file");
    test->add_option("input", ta.input, "CSV file with a header row")->required();
    test->add_option("--lhs", ta.lhs, "left-hand side column")->required();
    test->add_option("--rhs", ta.rhs, "comma-separated right-hand side columns")->required();
    test->add_option("--case", ta.dcase, "deterministics: d0, d1, d2")->capture_default_str();
    test->add_option("--detrend", ta.detrend, "ols or gls")->capture_default_str();
    test->add_option("--cbar", ta.cbar, "GLS constant: auto or a value")->capture_default_str();
    test->add_option("--test", ta.test, "vr, adf, msb, zalpha, comma list or all")->capture_default_str();
    test->add_option("--criterion", ta.criterion, "aic, bic, maic, mbic")->capture_default_str();
    test->add_option("--kernel", ta.kernel, "qs or bartlett")->capture_default_str();
    test->add_option("--bandwidth", ta.bandwidth, "fixed kernel bandwidth (default: plug-in)");
    test->add_option("--lag", ta.lag, "fixed ADF/MSB lag (skips selection)");
    test->add_option("--pmax", ta.p_max, "largest lag considered by the criterion");
    test->add_option("--level", ta.level, "decision level")->capture_default_str();
    test->add_option("--last", ta.last, "use only the last N rows");
    test->add_flag("--log", ta.log, "apply the natural log to the selected columns");
    test->add_option("--format", ta.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    test->add_option("--critvals", ta.critvals, "critical value table (default: shipped table)");
    test->add_option("--out", ta.out, "output file (default: stdout)");

    TabulateArgs tb;
    auto* tab = app.add_subcommand("tabulate", "tabulate null quantiles of the limit distributions");
    tab->add_option("--test", tb.test, "test or comma list")->capture_default_str();
    tab->add_option("--case", tb.dcase, "case or comma list")->capture_default_str();
    tab->add_option("--detrend", tb.detrend, "ols, gls or both as a list")->capture_default_str();
    tab->add_option("--cbar", tb.cbar, "GLS constant: auto or a value")->capture_default_str();
    tab->add_option("--m-range", tb.m_range, "e.g. 1..5 or 1,3")->capture_default_str();
    tab->add_option("--levels", tb.levels, "comma-separated levels")->capture_default_str();
    tab->add_option("--reps", tb.reps, "replications")->capture_default_str();
    tab->add_option("--grid", tb.grid, "grid steps per path")->capture_default_str();
    tab->add_option("--seed", tb.seed, "random seed")->capture_default_str();
    tab->add_option("--workers", tb.workers, "threads (0: all cores)")->capture_default_str();
    tab->add_option("--out", tb.out, "output file (default: stdout)");

    CalibrateArgs cb;
    auto* cal = app.add_subcommand("calibrate-cbar", "find c_bar with local power 1/2 at R^2 = 0.4");
    cal->add_option("--case", cb.dcase, "d1 or d2")->capture_default_str();
    cal->add_option("--m", cb.m, "number of regressors")->capture_default_str();
    cal->add_option("--reps", cb.reps, "replications")->capture_default_str();
    cal->add_option("--grid", cb.grid, "grid steps per path")->capture_default_str();
    cal->add_option("--seed", cb.seed, "random seed")->capture_default_str();
    cal->add_option("--workers", cb.workers, "threads (0: all cores)")->capture_default_str();
    cal->add_flag("--verbose", cb.verbose, "print every evaluated c_bar");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "finite-sample and local asymptotic studies");
    sim->add_option("--experiment", sa.experiment, "size, power, lap or u0")->capture_default_str();
    sim->add_option("--case", sa.dcase, "d0, d1 or d2")->capture_default_str();
    sim->add_option("--dynamics", sa.dynamics, "iid, ar(phi), ma(theta), arma(phi,theta), garch(a1,a2)")
        ->delimiter(';');
    sim->add_option("--r2", sa.r2, "R^2 values")->delimiter(',');
    sim->add_option("--T", sa.T, "sample sizes")->delimiter(',');
    sim->add_option("--tests", sa.tests,
                    "test labels (vr, vr-gls, adf, adf-gls, adf*, adf-gls*, msb, msb-gls*, zalpha; "
                    "lap: vr, adf, msb, zalpha)")
        ->delimiter(',');
    sim->add_option("--reps", sa.reps, "replications")->capture_default_str();
    sim->add_option("--level", sa.level, "nominal level")->capture_default_str();
    sim->add_option("--c-grid", sa.c_grid, "explicit c values")->delimiter(',');
    sim->add_option("--c-max", sa.c_max, "default grid runs from 0 to -c_max")->capture_default_str();
    sim->add_option("--c-points", sa.c_points, "points of the default grid")->capture_default_str();
    sim->add_option("--c", sa.c, "alternative for the u0 experiment")->capture_default_str();
    sim->add_option("--lambda", sa.lambda, "lambda_u grid for the u0 experiment")->delimiter(',');
    sim->add_option("--u0-rule", sa.u0_rule, "fixed or random")->capture_default_str();
    sim->add_option("--seed", sa.seed, "random seed")->capture_default_str();
    sim->add_option("--workers", sa.workers, "threads (0: all cores)")->capture_default_str();
    sim->add_option("--critvals", sa.critvals, "critical value table for the size experiment");
    sim->add_option("--out", sa.out, "long-format results (default: stdout)");
    sim->add_option("--pivot", sa.pivot, "plot-ready wide file");
    sim->add_option("--detrend", sa.detrend, "lap: ols or gls")->capture_default_str();
    sim->add_option("--cbar", sa.cbar, "lap: GLS constant")->capture_default_str();
    sim->add_option("--m", sa.m, "lap: number of regressors")->capture_default_str();
    sim->add_option("--grid", sa.grid, "lap: grid steps per path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*test) return cmd_test(ta);
        if (*tab) return cmd_tabulate(tb);
        if (*cal) return cmd_calibrate(cb);
        if (*sim) return cmd_simulate(sa);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
