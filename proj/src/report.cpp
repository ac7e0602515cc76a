#include "vrcoint/report.hpp"

#include "vrcoint/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace vrcoint {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delim)) out.push_back(trim(field));
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::size_t column_index(const DataSet& data, const std::string& name) {
    for (std::size_t j = 0; j < data.columns.size(); ++j) {
        if (data.columns[j] == name) return j;
    }
    std::string known;
    for (const auto& c : data.columns) known += (known.empty() ? "" : ", ") + c;
    raise(ErrorCode::ColumnNotFound,
          "column '" + name + "' not found in " + data.source + " (numeric columns: " + known + ")");
}

}  // namespace

DataSet read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::FileNotFound, "cannot open '" + path + "'");
    return read_table(in, path);
}

DataSet read_table(std::istream& in, const std::string& source) {
    std::string header;
    if (!std::getline(in, header)) raise(ErrorCode::EmptyInput, source + " is empty");
    if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);  // UTF-8 BOM
    char delim = ',';
    for (char d : {',', ';', '\t'}) {
        if (header.find(d) != std::string::npos) {
            delim = d;
            break;
        }
    }
    const auto names = split(header, delim);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split(line, delim);
        if (fields.size() != names.size()) {
            raise(ErrorCode::NonNumericData, source + " row " + std::to_string(rows.size() + 2) +
                                                 " has " + std::to_string(fields.size()) +
                                                 " fields, header has " + std::to_string(names.size()));
        }
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) raise(ErrorCode::EmptyInput, source + " has no data rows");

    DataSet data;
    data.source = source;
    std::size_t first_numeric = 0;
    const bool label_first = std::any_of(rows.begin(), rows.end(),
                                         [](const auto& r) { return !parse_double(r[0]); });
    if (label_first) {
        data.label_column = names[0];
        first_numeric = 1;
        for (const auto& r : rows) data.labels.push_back(r[0]);
    }
    data.columns.assign(names.begin() + static_cast<std::ptrdiff_t>(first_numeric), names.end());
    data.values.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(data.columns.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = first_numeric; j < names.size(); ++j) {
            const auto v = parse_double(rows[i][j]);
            if (!v) {
                raise(ErrorCode::NonNumericData, source + " row " + std::to_string(i + 2) +
                                                     ", column '" + names[j] + "': '" + rows[i][j] +
                                                     "' is not numeric");
            }
            data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - first_numeric)) = *v;
        }
    }
    return data;
}

DataSelection select_columns(const DataSet& data, const std::string& lhs,
                             const std::vector<std::string>& rhs, std::optional<std::size_t> last,
                             bool log) {
    if (rhs.empty()) raise(ErrorCode::InvalidArgument, "at least one rhs column is needed");
    for (std::size_t j = 0; j < rhs.size(); ++j) {
        if (rhs[j] == lhs) {
            raise(ErrorCode::RankDeficient,
                  "column '" + lhs + "' is used as both lhs and rhs (perfect collinearity)");
        }
        for (std::size_t k = 0; k < j; ++k) {
            if (rhs[k] == rhs[j]) {
                raise(ErrorCode::RankDeficient, "rhs column '" + rhs[j] + "' is listed twice");
            }
        }
    }
    const auto rows = static_cast<std::size_t>(data.values.rows());
    const std::size_t n = last.value_or(rows);
    if (n > rows) {
        raise(ErrorCode::SampleTooSmall, "--last " + std::to_string(n) + " exceeds the " +
                                             std::to_string(rows) + " rows of " + data.source);
    }
    DataSelection sel;
    sel.lhs = lhs;
    sel.rhs = rhs;
    sel.first_row = rows - n;
    const auto start = static_cast<Eigen::Index>(sel.first_row);
    const auto len = static_cast<Eigen::Index>(n);
    sel.y = data.values.col(static_cast<Eigen::Index>(column_index(data, lhs))).segment(start, len);
    sel.X.resize(len, static_cast<Eigen::Index>(rhs.size()));
    for (std::size_t j = 0; j < rhs.size(); ++j) {
        sel.X.col(static_cast<Eigen::Index>(j)) =
            data.values.col(static_cast<Eigen::Index>(column_index(data, rhs[j]))).segment(start, len);
    }
    if (!data.labels.empty() && n > 0) {
        sel.first_label = data.labels[sel.first_row];
        sel.last_label = data.labels.back();
    }
    if (log) {
        auto check = [&](double v, const std::string& col) {
            if (!(v > 0.0)) {
                raise(ErrorCode::NonNumericData, "--log: column '" + col + "' has a nonpositive value");
            }
        };
        for (Eigen::Index i = 0; i < len; ++i) {
            check(sel.y(i), lhs);
            sel.y(i) = std::log(sel.y(i));
            for (Eigen::Index j = 0; j < sel.X.cols(); ++j) {
                check(sel.X(i, j), rhs[static_cast<std::size_t>(j)]);
                sel.X(i, j) = std::log(sel.X(i, j));
            }
        }
    }
    return sel;
}

std::optional<std::string> find_collinear_column(const DataSelection& sel, DeterministicCase dcase) {
    const auto T = sel.X.rows();
    const auto d = deterministic_regressors(dcase, T);
    for (Eigen::Index j = 0; j < sel.X.cols(); ++j) {
        SeriesMatrix others(T, d.cols() + sel.X.cols() - 1);
        others.leftCols(d.cols()) = d;
        Eigen::Index k = d.cols();
        for (Eigen::Index i = 0; i < sel.X.cols(); ++i) {
            if (i != j) others.col(k++) = sel.X.col(i);
        }
        const Vector target = sel.X.col(j);
        const double scale = target.norm();
        if (!(scale > 0.0)) return sel.rhs[static_cast<std::size_t>(j)];
        if (others.cols() == 0) continue;
        const Vector resid = target - others * others.colPivHouseholderQr().solve(target);
        if (resid.norm() < 1e-8 * scale) return sel.rhs[static_cast<std::size_t>(j)];
    }
    return std::nullopt;
}

std::string_view to_string(Decision d) noexcept {
    return d == Decision::Reject ? "reject" : "fail-to-reject";
}

TestReport make_report(const TestStatistic& stat, std::span<const QuantileTable> tables,
                       double level, const std::string& critvals_source) {
    TestReport r;
    r.statistic = stat;
    r.level = level;
    r.critvals_source = critvals_source;
    const auto& s = stat.settings;
    for (const auto& t : tables) {
        if (t.test != stat.kind || t.dcase != s.dcase || t.m != s.m || t.detrend.kind != s.mode.kind) {
            continue;
        }
        const bool cbar_matters = s.mode.is_gls() && s.dcase == DeterministicCase::D2;
        if (cbar_matters && std::abs(t.detrend.c_bar - s.mode.c_bar) > 1e-6) continue;
        for (std::size_t i = 0; i < t.levels.size(); ++i) {
            r.critical_values.emplace(t.levels[i], t.values[i]);
        }
        if (!r.critvals_seed) r.critvals_seed = t.seed;
    }
    for (const auto& [lv, cv] : r.critical_values) {
        if (std::abs(lv - level) < 1e-9) {
            r.decision = stat.value < cv ? Decision::Reject : Decision::FailToReject;
        }
    }
    return r;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

namespace {

std::string test_label(const TestReport& r) {
    std::string label(to_string(r.statistic.kind));
    if (r.statistic.settings.mode.is_gls()) label += "-gls";
    return label;
}

nlohmann::ordered_json settings_json(const TestSettings& s) {
    nlohmann::ordered_json j;
    j["detrend"] = std::string(to_string(s.mode.kind));
    if (s.mode.is_gls()) j["c_bar"] = s.mode.c_bar;
    if (s.lag) j["lag"] = *s.lag;
    if (s.criterion) j["criterion"] = std::string(to_string(*s.criterion));
    if (s.p_max) j["p_max"] = *s.p_max;
    if (s.kernel) j["kernel"] = std::string(to_string(*s.kernel));
    if (s.bandwidth) j["bandwidth"] = *s.bandwidth;
    if (s.kernel_lags) j["kernel_lags"] = *s.kernel_lags;
    if (s.lrv_nonpositive) j["lrv_nonpositive"] = true;
    if (!s.notes.empty()) j["notes"] = s.notes;
    return j;
}

}  // namespace

void write_text(std::ostream& out, const std::vector<TestReport>& reports) {
    if (reports.empty()) return;
    const auto& first = reports.front();
    out << "data: " << first.data_source;
    if (!first.first_label.empty()) out << " [" << first.first_label << " .. " << first.last_label << "]";
    out << "\nlhs: " << first.lhs << "  rhs:";
    for (const auto& c : first.rhs) out << ' ' << c;
    out << (first.log_transform ? "  (natural log)" : "") << '\n';
    out << "case: " << to_string(first.statistic.settings.dcase) << "  T: " << first.statistic.settings.T
        << "  m: " << first.statistic.settings.m << '\n';
    out << "critical values: " << (first.critvals_source.empty() ? "none" : first.critvals_source);
    if (first.critvals_seed) out << " (seed " << *first.critvals_seed << ")";
    out << "\n\n";
    for (const auto& r : reports) {
        const auto& s = r.statistic.settings;
        out << std::left << std::setw(8) << test_label(r) << ' ' << format_number(r.statistic.value);
        out << "  decision@" << format_number(r.level) << ": "
            << (r.decision ? std::string(to_string(*r.decision)) : std::string("n/a"));
        out << '\n';
        out << "    settings:";
        if (s.mode.is_gls()) out << " c_bar=" << format_number(s.mode.c_bar);
        if (s.lag) out << " lag=" << *s.lag;
        if (s.criterion) out << " criterion=" << to_string(*s.criterion);
        if (s.p_max) out << " p_max=" << *s.p_max;
        if (s.kernel) out << " kernel=" << to_string(*s.kernel);
        if (s.bandwidth) out << " bandwidth=" << format_number(*s.bandwidth);
        if (s.kernel_lags) out << " kernel_lags=" << *s.kernel_lags;
        out << '\n';
        if (!r.critical_values.empty()) {
            out << "    critical values:";
            for (const auto& [lv, cv] : r.critical_values) {
                out << ' ' << format_number(lv) << '=' << format_number(cv);
            }
            out << '\n';
        }
        for (const auto& note : s.notes) out << "    note: " << note << '\n';
    }
}

void write_json(std::ostream& out, const std::vector<TestReport>& reports) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        const auto& s = r.statistic.settings;
        nlohmann::ordered_json j;
        j["test"] = test_label(r);
        j["case"] = std::string(to_string(s.dcase));
        j["detrend"] = std::string(to_string(s.mode.kind));
        j["m"] = s.m;
        j["T"] = s.T;
        j["statistic"] = r.statistic.value;
        auto cvs = nlohmann::ordered_json::object();
        for (const auto& [lv, cv] : r.critical_values) cvs[format_number(lv)] = cv;
        j["critical_values"] = cvs;
        j["level"] = r.level;
        j["decision"] = r.decision ? nlohmann::ordered_json(std::string(to_string(*r.decision)))
                                   : nlohmann::ordered_json(nullptr);
        j["settings"] = settings_json(s);
        j["seed"] = r.critvals_seed ? nlohmann::ordered_json(*r.critvals_seed)
                                    : nlohmann::ordered_json(nullptr);
        nlohmann::ordered_json data;
        data["source"] = r.data_source;
        data["lhs"] = r.lhs;
        data["rhs"] = r.rhs;
        data["first"] = r.first_label;
        data["last"] = r.last_label;
        data["log"] = r.log_transform;
        data["critvals"] = r.critvals_source;
        j["data"] = data;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

}  // namespace vrcoint
