#include "vrcoint/experiments.hpp"

#include "vrcoint/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace vrcoint {

namespace {

constexpr double kNoRejection = std::numeric_limits<double>::infinity();

TestSpec make_spec(std::string label, TestKind kind, DetrendMode detrend, LagCriterion criterion) {
    TestSpec spec;
    spec.label = std::move(label);
    spec.kind = kind;
    spec.detrend = detrend;
    spec.options.criterion = criterion;
    return spec;
}

std::string criterion_label(const TestSpec& t) {
    switch (t.kind) {
        case TestKind::VR: return "none";
        case TestKind::ADF:
        case TestKind::MSB:
            return t.options.fixed_lag ? "p=" + std::to_string(*t.options.fixed_lag)
                                       : std::string(to_string(t.options.criterion));
        case TestKind::Zalpha: return std::string(to_string(t.options.kernel.kernel));
    }
    return "none";
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x + 0.0);  // no "-0"
    return buf;
}

RejectionRow base_row(const std::string& experiment, const TestSpec& t, const ExperimentPlan& plan,
                      const CellSpec& cell) {
    RejectionRow row;
    row.experiment = experiment;
    row.test = t.label;
    row.dcase = plan.dcase;
    row.detrend = t.detrend;
    row.criterion = criterion_label(t);
    row.dynamics = to_string(cell.dynamics);
    row.r2 = cell.r_squared;
    row.T = cell.T;
    row.c = cell.c;
    row.lambda_u = cell.lambda_u;
    row.replications = plan.replications;
    row.seed = plan.seed;
    return row;
}

/// Visits every (dynamics, R^2, T) cell of the plan.
template <typename F>
void for_each_cell(const ExperimentPlan& plan, F&& body) {
    for (const auto& dyn : plan.dynamics) {
        for (double r2 : plan.r2_grid) {
            for (auto T : plan.T_grid) {
                CellSpec cell;
                cell.dcase = plan.dcase;
                cell.dynamics = dyn;
                cell.r_squared = r2;
                cell.T = T;
                body(cell);
            }
        }
    }
}

std::vector<double> null_critical_values(const std::vector<std::vector<double>>& null_stats,
                                         double level) {
    std::vector<double> cv;
    cv.reserve(null_stats.size());
    for (const auto& s : null_stats) cv.push_back(empirical_quantile(s, level));
    return cv;
}

}  // namespace

std::vector<TestSpec> standard_battery(DeterministicCase dcase) {
    std::vector<TestSpec> tests;
    const auto cbar = published_cbar(dcase, 1);
    const bool gls = cbar.has_value();
    tests.push_back(make_spec("vr", TestKind::VR, DetrendMode::ols(), LagCriterion::AIC));
    if (gls) tests.push_back(make_spec("vr-gls", TestKind::VR, DetrendMode::gls(*cbar), LagCriterion::AIC));
    tests.push_back(make_spec("adf", TestKind::ADF, DetrendMode::ols(), LagCriterion::AIC));
    if (gls) tests.push_back(make_spec("adf-gls", TestKind::ADF, DetrendMode::gls(*cbar), LagCriterion::AIC));
    tests.push_back(make_spec("adf*", TestKind::ADF, DetrendMode::ols(), LagCriterion::MAIC));
    if (gls) tests.push_back(make_spec("adf-gls*", TestKind::ADF, DetrendMode::gls(*cbar), LagCriterion::MAIC));
    tests.push_back(make_spec("msb", TestKind::MSB, DetrendMode::ols(), LagCriterion::AIC));
    if (gls) tests.push_back(make_spec("msb-gls*", TestKind::MSB, DetrendMode::gls(*cbar), LagCriterion::MAIC));
    tests.push_back(make_spec("zalpha", TestKind::Zalpha, DetrendMode::ols(), LagCriterion::AIC));
    return tests;
}

std::vector<TestSpec> select_battery(DeterministicCase dcase, std::span<const std::string> labels) {
    const auto all = standard_battery(dcase);
    std::vector<TestSpec> out;
    for (const auto& label : labels) {
        auto it = std::find_if(all.begin(), all.end(), [&](const TestSpec& t) { return t.label == label; });
        if (it == all.end()) {
            raise(ErrorCode::InvalidConfig,
                  "unknown test '" + label + "' for case " + std::string(to_string(dcase)));
        }
        out.push_back(*it);
    }
    return out;
}

void validate(const ExperimentPlan& plan) {
    if (plan.replications < 100) raise(ErrorCode::InvalidConfig, "replications must be >= 100");
    if (plan.tests.empty()) raise(ErrorCode::InvalidConfig, "plan has no tests");
    if (plan.dynamics.empty() || plan.r2_grid.empty() || plan.T_grid.empty()) {
        raise(ErrorCode::InvalidConfig, "plan has an empty dynamics, R^2 or T grid");
    }
    if (!(plan.level > 0.0 && plan.level < 1.0)) raise(ErrorCode::InvalidConfig, "level must lie in (0, 1)");
    for (double c : plan.c_grid) {
        if (!(c <= 0.0)) raise(ErrorCode::InvalidConfig, "c grid must be nonpositive");
    }
    for (const auto& d : plan.dynamics) validate(d);
    for (const auto& t : plan.tests) {
        validate(plan.dcase, t.detrend);
        if (t.kind == TestKind::Zalpha && t.detrend.is_gls()) {
            raise(ErrorCode::InvalidConfig, "Z_alpha is only defined for OLS detrending");
        }
    }
}

std::vector<double> default_c_grid(double c_max, int points) {
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) grid.push_back(i == 0 ? 0.0 : -c_max * i / (points - 1));
    return grid;
}

std::string plan_hash(const ExperimentPlan& plan) {
    std::ostringstream desc;
    desc << to_string(plan.dcase) << '|' << plan.replications << '|' << fmt(plan.level) << '|'
         << plan.seed << '|' << static_cast<int>(plan.u0_rule) << '|';
    for (const auto& d : plan.dynamics) desc << to_string(d) << ',';
    desc << '|';
    for (double r : plan.r2_grid) desc << fmt(r) << ',';
    desc << '|';
    for (auto T : plan.T_grid) desc << T << ',';
    desc << '|';
    for (const auto& t : plan.tests) {
        desc << t.label << ':' << to_string(t.kind) << ':' << to_string(t.detrend.kind) << ':'
             << fmt(t.detrend.c_bar) << ':' << criterion_label(t) << ',';
    }
    desc << '|';
    for (double c : plan.c_grid) desc << fmt(c) << ',';
    desc << '|';
    for (double l : plan.lambda_grid) desc << fmt(l) << ',';

    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : desc.str()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::vector<double>> simulate_cell(const CellSpec& cell,
                                               std::span<const TestSpec> tests, int replications,
                                               std::uint64_t seed, unsigned workers) {
    if (replications < 1) raise(ErrorCode::InvalidConfig, "replications must be >= 1");
    DgpConfig config;
    config.T = cell.T;
    config.dcase = cell.dcase;
    config.dynamics = cell.dynamics;
    config.r_squared = cell.r_squared;
    config.rho = local_rho(cell.c, cell.T);
    config.u0_rule = cell.u0_rule;
    config.lambda_u = cell.lambda_u;
    validate(config);

    const auto reps = static_cast<std::size_t>(replications);
    std::vector<std::vector<double>> out(tests.size(), std::vector<double>(reps, kNoRejection));
    parallel_for(reps, workers, [&](std::size_t r) {
        RngStream rng(seed, r);
        const auto sample = generate_sample(config, rng);
        // residuals are shared by every test with the same detrending
        std::vector<std::pair<DetrendMode, std::optional<ResidualSeries>>> cache;
        cache.reserve(tests.size() + 1);  // references into cache must stay valid
        auto residuals_for = [&](const DetrendMode& mode) -> const std::optional<ResidualSeries>& {
            for (const auto& [key, value] : cache) {
                if (key == mode) return value;
            }
            std::optional<ResidualSeries> res;
            try {
                res = cointegrating_residuals(sample.y, sample.X, cell.dcase, mode);
            } catch (const Error&) {
            }
            cache.emplace_back(mode, std::move(res));
            return cache.back().second;
        };
        for (std::size_t j = 0; j < tests.size(); ++j) {
            const auto& t = tests[j];
            const auto& res = residuals_for(t.detrend);
            const auto& ols = residuals_for(DetrendMode::ols());
            if (!res || !ols) continue;
            try {
                out[j][r] = statistic_from_residuals(t.kind, *res, as_span(ols->u_hat), t.options).value;
            } catch (const Error&) {
            }
        }
    });
    return out;
}

double rejection_rate(std::span<const double> stats, double critical) {
    if (stats.empty()) raise(ErrorCode::EmptyInput, "no statistics");
    const auto hits = std::count_if(stats.begin(), stats.end(), [&](double v) { return v <= critical; });
    return static_cast<double>(hits) / static_cast<double>(stats.size());
}

RejectionTable empirical_size(const ExperimentPlan& plan, std::span<const QuantileTable> critvals) {
    validate(plan);
    std::vector<double> cv;
    for (const auto& t : plan.tests) {
        const auto value = lookup_critical_value(critvals, t.kind, plan.dcase, t.detrend, 1, plan.level);
        if (!value) {
            raise(ErrorCode::MissingCriticalValue,
                  "no asymptotic critical value for " + t.label + " (" +
                      std::string(to_string(plan.dcase)) + ", m = 1, level " + fmt(plan.level) + ")");
        }
        cv.push_back(*value);
    }
    RejectionTable table;
    table.plan_hash = plan_hash(plan);
    for_each_cell(plan, [&](const CellSpec& cell) {
        const auto stats = simulate_cell(cell, plan.tests, plan.replications, plan.seed, plan.workers);
        for (std::size_t j = 0; j < plan.tests.size(); ++j) {
            auto row = base_row("size", plan.tests[j], plan, cell);
            row.value = rejection_rate(stats[j], cv[j]);
            table.rows.push_back(std::move(row));
        }
    });
    return table;
}

RejectionTable size_corrected_power(const ExperimentPlan& plan) {
    validate(plan);
    if (std::find(plan.c_grid.begin(), plan.c_grid.end(), 0.0) == plan.c_grid.end()) {
        raise(ErrorCode::InvalidConfig, "size-corrected power needs c = 0 in the grid");
    }
    RejectionTable table;
    table.plan_hash = plan_hash(plan);
    for_each_cell(plan, [&](CellSpec cell) {
        cell.c = 0.0;
        const auto null_stats = simulate_cell(cell, plan.tests, plan.replications, plan.seed, plan.workers);
        const auto cv = null_critical_values(null_stats, plan.level);
        for (double c : plan.c_grid) {
            cell.c = c;
            const auto stats = c == 0.0 ? null_stats
                                        : simulate_cell(cell, plan.tests, plan.replications, plan.seed,
                                                        plan.workers);
            for (std::size_t j = 0; j < plan.tests.size(); ++j) {
                auto row = base_row("power", plan.tests[j], plan, cell);
                row.value = rejection_rate(stats[j], cv[j]);
                table.rows.push_back(std::move(row));
            }
        }
    });
    return table;
}

RejectionTable large_u0_power(const ExperimentPlan& plan, double c) {
    validate(plan);
    if (!(c < 0.0)) raise(ErrorCode::InvalidConfig, "large-u0 power needs c < 0");
    if (plan.lambda_grid.empty()) raise(ErrorCode::InvalidConfig, "empty lambda grid");
    RejectionTable table;
    table.plan_hash = plan_hash(plan);
    for_each_cell(plan, [&](CellSpec cell) {
        const auto null_stats = simulate_cell(cell, plan.tests, plan.replications, plan.seed, plan.workers);
        const auto cv = null_critical_values(null_stats, plan.level);
        cell.c = c;
        cell.u0_rule = plan.u0_rule;
        for (double lambda : plan.lambda_grid) {
            cell.lambda_u = lambda;
            const auto stats = simulate_cell(cell, plan.tests, plan.replications, plan.seed, plan.workers);
            for (std::size_t j = 0; j < plan.tests.size(); ++j) {
                auto row = base_row("u0", plan.tests[j], plan, cell);
                row.value = rejection_rate(stats[j], cv[j]);
                table.rows.push_back(std::move(row));
            }
        }
    });
    return table;
}

void write_rejection_csv(std::ostream& out, std::span<const RejectionRow> rows) {
    out << "experiment,test,case,detrend,criterion,dynamics,r2,T,c,lambda_u,value,replications,seed\n";
    for (const auto& r : rows) {
        std::string detrend(to_string(r.detrend.kind));
        if (r.detrend.is_gls()) detrend += "(" + fmt(r.detrend.c_bar) + ")";
        out << r.experiment << ',' << r.test << ',' << to_string(r.dcase) << ',' << detrend << ','
            << r.criterion << ",\"" << r.dynamics << "\"," << fmt(r.r2) << ',' << r.T << ','
            << fmt(r.c) << ',' << fmt(r.lambda_u) << ',' << fmt(r.value) << ',' << r.replications
            << ',' << r.seed << '\n';
    }
}

void write_pivot_csv(std::ostream& out, std::span<const RejectionRow> rows) {
    using Panel = std::tuple<std::string, std::string, double, Eigen::Index>;
    std::vector<Panel> panels;
    std::vector<std::string> tests;
    for (const auto& r : rows) {
        Panel p{r.experiment, r.dynamics, r.r2, r.T};
        if (std::find(panels.begin(), panels.end(), p) == panels.end()) panels.push_back(p);
        if (std::find(tests.begin(), tests.end(), r.test) == tests.end()) tests.push_back(r.test);
    }
    for (const auto& p : panels) {
        const auto& [experiment, dynamics, r2, T] = p;
        const bool by_lambda = experiment == "u0";
        out << "# " << experiment << " dynamics=" << dynamics << " r2=" << fmt(r2) << " T=" << T << '\n';
        out << (by_lambda ? "lambda_u" : "c");
        for (const auto& t : tests) out << ',' << t;
        out << '\n';
        std::vector<double> xs;
        std::map<std::pair<double, std::string>, double> cells;
        for (const auto& r : rows) {
            if (Panel{r.experiment, r.dynamics, r.r2, r.T} != p) continue;
            const double x = by_lambda ? r.lambda_u : r.c;
            if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
            cells[{x, r.test}] = r.value;
        }
        for (double x : xs) {
            out << fmt(x);
            for (const auto& t : tests) {
                out << ',';
                if (auto it = cells.find({x, t}); it != cells.end()) out << fmt(it->second);
            }
            out << '\n';
        }
        out << '\n';
    }
}

}  // namespace vrcoint
