#include "vrcoint/asymptotics.hpp"

#include "vrcoint/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace vrcoint {

namespace {

constexpr std::uint64_t kResampleStride = std::uint64_t{1} << 40;

/// A detrended path P~(r_i) together with its value at r = 0 and the slope of
/// the linear function that was subtracted (P~ = P - offset - slope * r).
struct DetrendedPath {
    Vector values;
    double at_zero = 0.0;
    double slope = 0.0;
};

double grid_mean(std::span<const double> p) {
    double s = 0.0;
    for (double x : p) s += x;
    return s / static_cast<double>(p.size());
}

/// (1/n) sum_i r_i P(r_i)
double grid_first_moment(std::span<const double> p) {
    const double n = static_cast<double>(p.size());
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (static_cast<double>(i + 1) / n) * p[i];
    return s / n;
}

DetrendedPath ols_path(std::span<const double> p, DeterministicCase dcase) {
    const auto n = static_cast<Eigen::Index>(p.size());
    DetrendedPath out;
    out.values = Eigen::Map<const Vector>(p.data(), n);
    if (dcase == DeterministicCase::D0) return out;
    const double a = grid_mean(p);
    if (dcase == DeterministicCase::D1) {
        out.values.array() -= a;
        out.at_zero = -a;
        return out;
    }
    const double b = grid_first_moment(p);
    // P - (4 - 6r) a - (12r - 6) b = P - (4a - 6b) - (12b - 6a) r
    const double offset = 4.0 * a - 6.0 * b;
    const double slope = 12.0 * b - 6.0 * a;
    const double nn = static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) -= offset + slope * (static_cast<double>(i + 1) / nn);
    }
    out.at_zero = -offset;
    out.slope = slope;
    return out;
}

double gls_lambda(double c_bar) {
    return (1.0 - c_bar) / (1.0 - c_bar + c_bar * c_bar / 3.0);
}

DetrendedPath gls_path(std::span<const double> p, DeterministicCase dcase, double c_bar) {
    const auto n = static_cast<Eigen::Index>(p.size());
    DetrendedPath out;
    out.values = Eigen::Map<const Vector>(p.data(), n);
    if (dcase != DeterministicCase::D2) return out;
    const double lambda = gls_lambda(c_bar);
    const double slope = lambda * p.back() + 3.0 * (1.0 - lambda) * grid_first_moment(p);
    const double nn = static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) out.values(i) -= slope * (static_cast<double>(i + 1) / nn);
    out.slope = slope;
    return out;
}

DetrendedPath transform(std::span<const double> p, const LimitSpec& spec) {
    return spec.detrend.is_gls() ? gls_path(p, spec.dcase, spec.detrend.c_bar)
                                 : ols_path(p, spec.dcase);
}

/// Detrended J^c and W_v and the projection residual U = J~ - W~ theta.
struct ProjectedLimit {
    PathBundle bundle;
    DetrendedPath j;
    std::vector<DetrendedPath> w;
    Vector theta;
    Vector u;
    double u_at_zero = 0.0;
};

ProjectedLimit project(const LimitSpec& spec, RngStream& rng) {
    ProjectedLimit out;
    out.bundle = simulate_paths(spec, rng);
    const auto n = out.bundle.j_c.size();
    out.j = transform(as_span(out.bundle.j_c), spec);
    SeriesMatrix w(n, spec.m);
    for (int k = 0; k < spec.m; ++k) {
        const Vector col = out.bundle.w_v.col(k);
        out.w.push_back(transform(as_span(col), spec));
        w.col(k) = out.w.back().values;
    }
    const Eigen::MatrixXd gram = w.transpose() * w;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const double scale = gram.diagonal().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
        ldlt.vectorD().minCoeff() < kRankTolerance * scale) {
        raise(ErrorCode::NumericalSingularity, "integral of W_v W_v' is singular on the grid");
    }
    out.theta = ldlt.solve(w.transpose() * out.j.values);
    out.u = out.j.values - w * out.theta;
    out.u_at_zero = out.j.at_zero;
    for (int k = 0; k < spec.m; ++k) out.u_at_zero -= out.theta(k) * out.w[k].at_zero;
    return out;
}

}  // namespace

void validate(const LimitSpec& spec) {
    std::ostringstream msg;
    if (spec.m < 1) msg << "m must be >= 1; ";
    if (!(spec.c <= 0.0)) msg << "c must be nonpositive; ";
    if (!(spec.r_squared >= 0.0 && spec.r_squared < 1.0)) msg << "R^2 must lie in [0, 1); ";
    if (spec.grid_n < 100) msg << "grid_n must be >= 100; ";
    if (spec.detrend.is_gls() && spec.dcase == DeterministicCase::D0) {
        msg << "GLS detrending needs case d1 or d2; ";
    }
    if (spec.detrend.is_gls() && !(spec.detrend.c_bar <= 0.0)) msg << "c_bar must be nonpositive; ";
    if (spec.detrend.is_gls() && spec.test == TestKind::Zalpha) {
        msg << "Z_alpha has no GLS limit; ";
    }
    const auto text = msg.str();
    if (!text.empty()) raise(ErrorCode::InvalidConfig, text);
}

PathBundle simulate_paths(const LimitSpec& spec, RngStream& rng) {
    const int n = spec.grid_n;
    const int m = spec.m;
    const double step = 1.0 / std::sqrt(static_cast<double>(n));
    const double loading = std::sqrt(spec.r_squared / (1.0 - spec.r_squared)) / std::sqrt(double(m));
    const double decay = std::exp(spec.c / static_cast<double>(n));

    PathBundle b;
    b.w_perp.resize(n);
    b.w_v.resize(n, m);
    b.j_c.resize(n);
    b.driver_increments.resize(n);
    b.w_v_increments.resize(n, m);

    double perp = 0.0;
    double ou = 0.0;
    std::vector<double> wv(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < n; ++i) {
        const double d_perp = step * rng.normal();
        double v_sum = 0.0;
        for (int k = 0; k < m; ++k) {
            const double dv = step * rng.normal();
            b.w_v_increments(i, k) = dv;
            wv[static_cast<std::size_t>(k)] += dv;
            b.w_v(i, k) = wv[static_cast<std::size_t>(k)];
            v_sum += dv;
        }
        const double d_driver = d_perp + loading * v_sum;
        perp += d_perp;
        ou = decay * ou + d_driver;
        b.w_perp(i) = perp;
        b.driver_increments(i) = d_driver;
        b.j_c(i) = ou;
    }
    return b;
}

Vector detrend_path(std::span<const double> path, DeterministicCase dcase) {
    if (path.empty()) return {};
    return ols_path(path, dcase).values;
}

Vector gls_detrend_path(std::span<const double> path, DeterministicCase dcase, double c_bar) {
    if (path.empty()) return {};
    return gls_path(path, dcase, c_bar).values;
}

double limit_vr_draw(const LimitSpec& spec, RngStream& rng) {
    if (spec.test != TestKind::VR) raise(ErrorCode::InvalidConfig, "limit_vr_draw needs test = vr");
    const auto p = project(spec, rng);
    // the Riemann-sum functional has the same form as the finite-sample ratio
    return vr_statistic(as_span(p.u));
}

double limit_competitor_draw(const LimitSpec& spec, RngStream& rng) {
    if (spec.test == TestKind::VR) {
        raise(ErrorCode::InvalidConfig, "limit_competitor_draw needs adf, msb or zalpha");
    }
    const auto p = project(spec, rng);
    const auto& u = p.u;
    const auto n = u.size();
    const double nn = static_cast<double>(n);

    // kappa' A kappa
    const double a_form = u.squaredNorm() / nn;

    // kappa' D kappa with delta_bar = sqrt(R^2/(1-R^2)) m^{-1/2} 1_m
    const double delta2 = spec.r_squared / (1.0 - spec.r_squared);
    const double delta_each = std::sqrt(delta2 / spec.m);
    const double d_form =
        1.0 + delta2 - 2.0 * delta_each * p.theta.sum() + p.theta.squaredNorm();

    // kappa' B kappa: forward Ito sum of U(t_{i-1}) against kappa' d[B, W_v']'
    double b_form = 0.0;
    double left = p.u_at_zero;
    const auto& db = p.bundle.driver_increments;
    const auto& dwv = p.bundle.w_v_increments;
    for (Eigen::Index i = 0; i < n; ++i) {
        b_form += left * (db(i) - dwv.row(i).dot(p.theta));
        left = u(i);
    }

    double ito = 0.0;  // int U dU
    if (spec.detrend.is_gls() && spec.dcase == DeterministicCase::D2) {
        // GLS D2 detrending leaves U correlated with its drift, so the
        // mean-reversion and detrending drifts are carried explicitly.
        const double cross_j = u.dot(p.bundle.j_c) / nn;
        double drift = p.j.slope;
        for (int k = 0; k < spec.m; ++k) drift -= p.theta(k) * p.w[static_cast<std::size_t>(k)].slope;
        ito = b_form + spec.c * cross_j - drift * u.sum() / nn;
    } else {
        ito = spec.c * a_form + b_form;
    }

    switch (spec.test) {
        case TestKind::ADF: return ito / std::sqrt(a_form * d_form);
        case TestKind::Zalpha: return ito / a_form;
        case TestKind::MSB: return std::sqrt(a_form / d_form);
        case TestKind::VR: break;
    }
    return 0.0;
}

double limit_draw(const LimitSpec& spec, RngStream& rng) {
    return spec.test == TestKind::VR ? limit_vr_draw(spec, rng) : limit_competitor_draw(spec, rng);
}

LimitSample simulate_limit(const LimitSpec& spec, unsigned workers, std::uint64_t first_stream) {
    validate(spec);
    if (spec.replications < 1) raise(ErrorCode::InvalidConfig, "replications must be >= 1");
    const auto reps = static_cast<std::size_t>(spec.replications);
    LimitSample out;
    out.draws.assign(reps, 0.0);
    std::vector<std::int64_t> redraws(reps, 0);
    parallel_for(reps, workers, [&](std::size_t r) {
        for (std::uint64_t k = 0;; ++k) {
            RngStream rng(spec.seed, first_stream + r + k * kResampleStride);
            try {
                out.draws[r] = limit_draw(spec, rng);
                redraws[r] = static_cast<std::int64_t>(k);
                return;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NumericalSingularity || k >= 100) throw;
            }
        }
    });
    for (auto k : redraws) out.resamples += k;
    return out;
}

std::vector<QuantileTable> tabulate_critical_values(TestKind test, DeterministicCase dcase,
                                                    const DetrendMode& detrend,
                                                    std::span<const int> m_list,
                                                    std::span<const double> levels,
                                                    std::int64_t replications, int grid_n,
                                                    std::uint64_t seed, unsigned workers) {
    if (replications < 1000) raise(ErrorCode::InvalidConfig, "tabulation needs >= 1000 replications");
    std::vector<QuantileTable> tables;
    for (int m : m_list) {
        LimitSpec spec;
        spec.test = test;
        spec.dcase = dcase;
        spec.detrend = detrend;
        spec.m = m;
        spec.grid_n = grid_n;
        spec.replications = replications;
        spec.seed = seed;
        const auto sample = simulate_limit(spec, workers);

        QuantileTable table;
        table.test = test;
        table.dcase = dcase;
        table.detrend = detrend;
        table.m = m;
        table.replications = replications;
        table.grid_n = grid_n;
        table.seed = seed;
        table.resamples = sample.resamples;
        std::vector<double> sorted = sample.draws;
        std::sort(sorted.begin(), sorted.end());
        for (double level : levels) {
            if (!(level > 0.0 && level < 1.0)) {
                raise(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1)");
            }
            table.levels.push_back(level);
            table.values.push_back(sorted[quantile_rank(sorted.size(), level) - 1]);
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

void write_quantile_tables(std::ostream& out, std::span<const QuantileTable> tables) {
    out << "test\tcase\tdetrend\tc_bar\tm\tlevel\tvalue\treplications\tgrid_n\tseed\n";
    char value[64];
    char level[64];
    char c_bar[64];
    for (const auto& t : tables) {
        std::snprintf(c_bar, sizeof c_bar, "%g", t.detrend.is_gls() ? t.detrend.c_bar : 0.0);
        for (std::size_t i = 0; i < t.levels.size(); ++i) {
            std::snprintf(level, sizeof level, "%g", t.levels[i]);
            std::snprintf(value, sizeof value, "%.5g", t.values[i]);
            out << to_string(t.test) << '\t' << to_string(t.dcase) << '\t'
                << to_string(t.detrend.kind) << '\t' << c_bar << '\t' << t.m << '\t' << level
                << '\t' << value << '\t' << t.replications << '\t' << t.grid_n << '\t' << t.seed
                << '\n';
        }
    }
}

std::vector<QuantileTable> read_quantile_tables(std::istream& in) {
    std::vector<QuantileTable> tables;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#' || line.rfind("test\t", 0) == 0) continue;
        std::istringstream row(line);
        std::array<std::string, 10> f;
        for (auto& field : f) {
            if (!std::getline(row, field, '\t')) {
                raise(ErrorCode::NonNumericData,
                      "critical value table line " + std::to_string(line_no) + " has too few fields");
            }
        }
        const auto test = parse_test_kind(f[0]);
        const auto dcase = parse_case(f[1]);
        const auto kind = parse_detrend_kind(f[2]);
        if (!test || !dcase || !kind) {
            raise(ErrorCode::NonNumericData,
                  "critical value table line " + std::to_string(line_no) + " is malformed");
        }
        QuantileTable key;
        key.test = *test;
        key.dcase = *dcase;
        key.detrend = {*kind, *kind == DetrendKind::Gls ? std::stod(f[3]) : 0.0};
        key.m = std::stoi(f[4]);
        key.replications = std::stoll(f[7]);
        key.grid_n = std::stoi(f[8]);
        key.seed = std::stoull(f[9]);
        auto it = std::find_if(tables.begin(), tables.end(), [&](const QuantileTable& t) {
            return t.test == key.test && t.dcase == key.dcase && t.detrend == key.detrend &&
                   t.m == key.m && t.replications == key.replications && t.grid_n == key.grid_n &&
                   t.seed == key.seed;
        });
        if (it == tables.end()) {
            tables.push_back(key);
            it = std::prev(tables.end());
        }
        it->levels.push_back(std::stod(f[5]));
        it->values.push_back(std::stod(f[6]));
    }
    return tables;
}

std::optional<double> lookup_critical_value(std::span<const QuantileTable> tables, TestKind test,
                                            DeterministicCase dcase, const DetrendMode& detrend,
                                            int m, double level) {
    for (const auto& t : tables) {
        if (t.test != test || t.dcase != dcase || t.m != m || t.detrend.kind != detrend.kind) continue;
        const bool cbar_matters = detrend.is_gls() && dcase == DeterministicCase::D2;
        if (cbar_matters && std::abs(t.detrend.c_bar - detrend.c_bar) > 1e-6) continue;
        for (std::size_t i = 0; i < t.levels.size(); ++i) {
            if (std::abs(t.levels[i] - level) < 1e-9) return t.values[i];
        }
    }
    return std::nullopt;
}

CbarCalibration calibrate_cbar(DeterministicCase dcase, int m, std::int64_t replications,
                               int grid_n, std::uint64_t seed, unsigned workers) {
    if (dcase == DeterministicCase::D0) {
        raise(ErrorCode::InvalidCase, "c_bar calibration needs case d1 or d2");
    }
    constexpr double kStep = 0.25;
    constexpr int kMaxIndex = 400;  // c_bar down to -100
    constexpr double kTargetPower = 0.5;
    constexpr double kLevel = 0.05;
    constexpr double kRSquared = 0.4;

    LimitSpec base;
    base.test = TestKind::VR;
    base.dcase = dcase;
    base.m = m;
    base.grid_n = grid_n;
    base.replications = replications;
    base.seed = seed;

    std::optional<double> d1_quantile;  // the D1 GLS null does not depend on c_bar
    std::map<int, double> cache;
    CbarCalibration result;
    auto power_at = [&](int index) {
        if (auto it = cache.find(index); it != cache.end()) return it->second;
        const double c_bar = -kStep * index;
        LimitSpec null_spec = base;
        null_spec.detrend = DetrendMode::gls(c_bar);
        double q = 0.0;
        if (dcase == DeterministicCase::D1 && d1_quantile) {
            q = *d1_quantile;
        } else {
            const auto null_draws = simulate_limit(null_spec, workers);
            q = empirical_quantile(null_draws.draws, kLevel);
            if (dcase == DeterministicCase::D1) d1_quantile = q;
        }
        LimitSpec alt_spec = null_spec;
        alt_spec.c = c_bar;
        alt_spec.r_squared = kRSquared;
        const auto alt = simulate_limit(alt_spec, workers, static_cast<std::uint64_t>(replications));
        const auto hits = std::count_if(alt.draws.begin(), alt.draws.end(),
                                        [&](double v) { return v <= q; });
        const double power = static_cast<double>(hits) / static_cast<double>(alt.draws.size());
        cache[index] = power;
        result.evaluated.emplace_back(c_bar, power);
        return power;
    };

    if (power_at(kMaxIndex) < kTargetPower) {
        raise(ErrorCode::NoSolutionInRange, "power stays below 1/2 for all c_bar in [-100, 0]");
    }
    // power rises as c_bar moves away from zero; bisect for the first grid
    // point at or above the target, then pick the closer neighbour
    int lo = 0;
    int hi = kMaxIndex;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (power_at(mid) >= kTargetPower ? hi : lo) = mid;
    }
    const double p_hi = power_at(hi);
    const double p_lo = power_at(lo);
    const int best = std::abs(p_lo - kTargetPower) < std::abs(p_hi - kTargetPower) ? lo : hi;
    result.c_bar = -kStep * best;
    result.power = cache.at(best);
    return result;
}

std::vector<double> local_power_curve(TestKind test, DeterministicCase dcase,
                                      const DetrendMode& detrend, int m, double r_squared,
                                      std::span<const double> c_grid, double level,
                                      std::int64_t replications, int grid_n, std::uint64_t seed,
                                      unsigned workers) {
    if (!(level > 0.0 && level < 1.0)) raise(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
    LimitSpec spec;
    spec.test = test;
    spec.dcase = dcase;
    spec.detrend = detrend;
    spec.m = m;
    spec.r_squared = r_squared;
    spec.grid_n = grid_n;
    spec.replications = replications;
    spec.seed = seed;

    spec.c = 0.0;
    const auto null_draws = simulate_limit(spec, workers);
    const double q = empirical_quantile(null_draws.draws, level);

    std::vector<double> power;
    power.reserve(c_grid.size());
    for (double c : c_grid) {
        if (!(c <= 0.0)) raise(ErrorCode::InvalidArgument, "c grid must be nonpositive");
        spec.c = c;
        const auto draws = c == 0.0 ? null_draws : simulate_limit(spec, workers);
        const auto hits = std::count_if(draws.draws.begin(), draws.draws.end(),
                                        [&](double v) { return v <= q; });
        power.push_back(static_cast<double>(hits) / static_cast<double>(draws.draws.size()));
    }
    return power;
}

std::optional<double> published_cbar(DeterministicCase dcase, int m) {
    static constexpr std::array<double, 5> kD1{-40.25, -46.25, -53.75, -55.75, -60.00};
    static constexpr std::array<double, 5> kD2{-48.25, -55.25, -56.50, -65.00, -68.75};
    if (m < 1 || m > 5) return std::nullopt;
    if (dcase == DeterministicCase::D1) return kD1[static_cast<std::size_t>(m - 1)];
    if (dcase == DeterministicCase::D2) return kD2[static_cast<std::size_t>(m - 1)];
    return std::nullopt;
}

}  // namespace vrcoint
