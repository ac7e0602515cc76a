#include "vrcoint/asymptotics.hpp"
#include "vrcoint/dgp.hpp"
#include "vrcoint/error.hpp"
#include "vrcoint/statistics.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace vrcoint;

namespace {

template <typename T, typename Parse>
T parse_or_throw(const std::string& text, Parse parse, const char* what) {
    auto value = parse(text);
    if (!value) raise(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + text + "'");
    return *value;
}

DeterministicCase to_case(const std::string& s) { return parse_or_throw<DeterministicCase>(s, parse_case, "case"); }
TestKind to_test(const std::string& s) { return parse_or_throw<TestKind>(s, parse_test_kind, "test"); }

DetrendMode to_mode(const std::string& detrend, std::optional<double> c_bar, DeterministicCase dcase, int m) {
    const auto kind = parse_or_throw<DetrendKind>(detrend, parse_detrend_kind, "detrending");
    if (kind == DetrendKind::Ols) return DetrendMode::ols();
    if (!c_bar) c_bar = published_cbar(dcase, m);
    if (!c_bar) raise(ErrorCode::MissingCriticalValue, "no published c_bar; pass c_bar");
    return DetrendMode::gls(*c_bar);
}

std::span<const double> span_of(const std::vector<double>& v) { return {v.data(), v.size()}; }

py::dict settings_dict(const TestSettings& s) {
    py::dict d;
    d["case"] = std::string(to_string(s.dcase));
    d["detrend"] = std::string(to_string(s.mode.kind));
    d["c_bar"] = s.mode.is_gls() ? py::cast(s.mode.c_bar) : py::none();
    d["T"] = s.T;
    d["m"] = s.m;
    d["lag"] = s.lag ? py::cast(*s.lag) : py::none();
    d["criterion"] = s.criterion ? py::cast(std::string(to_string(*s.criterion))) : py::none();
    d["p_max"] = s.p_max ? py::cast(*s.p_max) : py::none();
    d["kernel"] = s.kernel ? py::cast(std::string(to_string(*s.kernel))) : py::none();
    d["bandwidth"] = s.bandwidth ? py::cast(*s.bandwidth) : py::none();
    d["kernel_lags"] = s.kernel_lags ? py::cast(*s.kernel_lags) : py::none();
    d["notes"] = s.notes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Residual-based no-cointegration tests (C++ core)";

    // messages start with the error code name, e.g. "RankDeficient: ..."
    py::register_exception<Error>(m, "VrcointError", PyExc_RuntimeError);

    m.def("vr_statistic", [](const std::vector<double>& u) { return vr_statistic(span_of(u)); },
          py::arg("u_hat"));
    m.def("adf_statistic", [](const std::vector<double>& u, int p) { return adf_statistic(span_of(u), p); },
          py::arg("u_hat"), py::arg("p"));
    m.def("msb_statistic", [](const std::vector<double>& u, int p) { return msb_statistic(span_of(u), p); },
          py::arg("u_hat"), py::arg("p"));
    m.def(
        "zalpha_statistic",
        [](const std::vector<double>& u, const std::string& kernel, std::optional<double> bandwidth) {
            KernelSpec spec;
            spec.kernel = parse_or_throw<KernelType>(kernel, parse_kernel, "kernel");
            spec.fixed_bandwidth = bandwidth;
            return zalpha_statistic(span_of(u), spec);
        },
        py::arg("u_hat"), py::arg("kernel") = "qs", py::arg("bandwidth") = py::none());
    m.def(
        "select_lag",
        [](const std::vector<double>& u, const std::string& criterion, int p_max) {
            const auto c = parse_or_throw<LagCriterion>(criterion, parse_criterion, "criterion");
            const auto sel = select_lag(span_of(u), c, p_max);
            return py::make_tuple(sel.chosen_p, sel.values);
        },
        py::arg("u_hat"), py::arg("criterion"), py::arg("p_max"),
        "Returns (chosen lag, criterion values for p = 0..p_max).");

    m.def(
        "residuals",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const std::string& dcase,
           const std::string& detrend, std::optional<double> c_bar) {
            const auto c = to_case(dcase);
            const auto mode = to_mode(detrend, c_bar, c, static_cast<int>(X.cols()));
            const auto r = cointegrating_residuals(y, X, c, mode);
            return py::make_tuple(r.u_hat, r.beta_hat);
        },
        py::arg("y"), py::arg("X"), py::arg("case") = "d1", py::arg("detrend") = "ols",
        py::arg("c_bar") = py::none(), "Returns (u_hat, beta_hat).");

    m.def(
        "run_test",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const std::string& test,
           const std::string& dcase, const std::string& detrend, std::optional<double> c_bar,
           const std::string& criterion, std::optional<int> lag, std::optional<int> p_max,
           const std::string& kernel, std::optional<double> bandwidth) {
            const auto c = to_case(dcase);
            const auto mode = to_mode(detrend, c_bar, c, static_cast<int>(X.cols()));
            TestOptions opt;
            opt.criterion = parse_or_throw<LagCriterion>(criterion, parse_criterion, "criterion");
            opt.fixed_lag = lag;
            opt.p_max = p_max;
            opt.kernel.kernel = parse_or_throw<KernelType>(kernel, parse_kernel, "kernel");
            opt.kernel.fixed_bandwidth = bandwidth;
            const auto stat = run_test(y, X, c, mode, to_test(test), opt);
            py::dict d;
            d["test"] = std::string(to_string(stat.kind));
            d["statistic"] = stat.value;
            d["settings"] = settings_dict(stat.settings);
            return d;
        },
        py::arg("y"), py::arg("X"), py::arg("test") = "vr", py::arg("case") = "d1",
        py::arg("detrend") = "ols", py::arg("c_bar") = py::none(), py::arg("criterion") = "aic",
        py::arg("lag") = py::none(), py::arg("p_max") = py::none(), py::arg("kernel") = "qs",
        py::arg("bandwidth") = py::none());

    m.def(
        "simulate_limit",
        [](const std::string& test, const std::string& dcase, const std::string& detrend,
           std::optional<double> c_bar, int m_, double c, double r2, int grid_n,
           std::int64_t replications, std::uint64_t seed, unsigned workers) {
            LimitSpec s;
            s.test = to_test(test);
            s.dcase = to_case(dcase);
            s.detrend = to_mode(detrend, c_bar, s.dcase, m_);
            s.m = m_;
            s.c = c;
            s.r_squared = r2;
            s.grid_n = grid_n;
            s.replications = replications;
            s.seed = seed;
            py::gil_scoped_release release;
            return simulate_limit(s, workers).draws;
        },
        py::arg("test") = "vr", py::arg("case") = "d0", py::arg("detrend") = "ols",
        py::arg("c_bar") = py::none(), py::arg("m") = 1, py::arg("c") = 0.0, py::arg("r2") = 0.0,
        py::arg("grid_n") = 10000, py::arg("replications") = 10000, py::arg("seed") = 0,
        py::arg("workers") = 1);

    m.def(
        "tabulate",
        [](const std::string& test, const std::string& dcase, const std::string& detrend,
           std::optional<double> c_bar, int m_, const std::vector<double>& levels,
           std::int64_t replications, int grid_n, std::uint64_t seed, unsigned workers) {
            const auto c = to_case(dcase);
            const auto mode = to_mode(detrend, c_bar, c, m_);
            const int one[] = {m_};
            std::vector<QuantileTable> tables;
            {
                py::gil_scoped_release release;
                tables = tabulate_critical_values(to_test(test), c, mode, one, span_of(levels),
                                                  replications, grid_n, seed, workers);
            }
            py::dict d;
            for (std::size_t i = 0; i < tables[0].levels.size(); ++i) d[py::float_(tables[0].levels[i])] = tables[0].values[i];
            return d;
        },
        py::arg("test") = "vr", py::arg("case") = "d0", py::arg("detrend") = "ols",
        py::arg("c_bar") = py::none(), py::arg("m") = 1,
        py::arg("levels") = std::vector<double>{0.01, 0.05, 0.1}, py::arg("replications") = 10000,
        py::arg("grid_n") = 10000, py::arg("seed") = 0, py::arg("workers") = 1,
        "Null quantiles as {level: value}.");

    m.def(
        "calibrate_cbar",
        [](const std::string& dcase, int m_, std::int64_t replications, int grid_n,
           std::uint64_t seed, unsigned workers) {
            CbarCalibration r;
            const auto c = to_case(dcase);
            {
                py::gil_scoped_release release;
                r = calibrate_cbar(c, m_, replications, grid_n, seed, workers);
            }
            return py::make_tuple(r.c_bar, r.power);
        },
        py::arg("case"), py::arg("m") = 1, py::arg("replications") = 10000,
        py::arg("grid_n") = 10000, py::arg("seed") = 0, py::arg("workers") = 1,
        "Returns (c_bar, power at c_bar).");

    m.def(
        "local_power_curve",
        [](const std::string& test, const std::string& dcase, const std::string& detrend,
           std::optional<double> c_bar, int m_, double r2, const std::vector<double>& c_grid,
           double level, std::int64_t replications, int grid_n, std::uint64_t seed, unsigned workers) {
            const auto c = to_case(dcase);
            const auto mode = to_mode(detrend, c_bar, c, m_);
            py::gil_scoped_release release;
            return local_power_curve(to_test(test), c, mode, m_, r2, span_of(c_grid), level,
                                     replications, grid_n, seed, workers);
        },
        py::arg("test"), py::arg("case") = "d0", py::arg("detrend") = "ols",
        py::arg("c_bar") = py::none(), py::arg("m") = 1, py::arg("r2") = 0.0,
        py::arg("c_grid") = std::vector<double>{0.0}, py::arg("level") = 0.05,
        py::arg("replications") = 2000, py::arg("grid_n") = 1000, py::arg("seed") = 0,
        py::arg("workers") = 1);

    m.def(
        "generate_sample",
        [](int T, const std::string& dcase, const std::string& dynamics, double r2, double c,
           std::uint64_t seed, std::uint64_t stream) {
            DgpConfig cfg;
            cfg.T = T;
            cfg.dcase = to_case(dcase);
            auto dyn = parse_dynamics(dynamics);
            if (!dyn) raise(ErrorCode::InvalidArgument, "unknown dynamics '" + dynamics + "'");
            cfg.dynamics = *dyn;
            cfg.r_squared = r2;
            cfg.rho = local_rho(c, T);
            RngStream rng(seed, stream);
            const auto s = generate_sample(cfg, rng);
            return py::make_tuple(s.y, Eigen::VectorXd(s.X.col(0)));
        },
        py::arg("T") = 100, py::arg("case") = "d1", py::arg("dynamics") = "iid", py::arg("r2") = 0.0,
        py::arg("c") = 0.0, py::arg("seed") = 0, py::arg("stream") = 0, "Returns (y, x).");

    m.def(
        "published_cbar",
        [](const std::string& dcase, int m_) { return published_cbar(to_case(dcase), m_); },
        py::arg("case"), py::arg("m") = 1);

    m.def(
        "longrun_covariance",
        [](const std::string& dynamics, double sigma_ev) {
            auto dyn = parse_dynamics(dynamics);
            if (!dyn) raise(ErrorCode::InvalidArgument, "unknown dynamics '" + dynamics + "'");
            return Eigen::MatrixXd(longrun_covariance(*dyn, sigma_ev));
        },
        py::arg("dynamics"), py::arg("sigma_ev"));
}
