#pragma once

#include "vrcoint/asymptotics.hpp"
#include "vrcoint/statistics.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vrcoint {

/// A delimited text table with a header row. A leading column holding any
/// non-numeric entry (dates, labels) is kept apart from the numeric block.
struct DataSet {
    std::string source;
    std::string label_column;         ///< empty when every column is numeric
    std::vector<std::string> labels;  ///< one per row when label_column is set
    std::vector<std::string> columns;
    Eigen::MatrixXd values;  ///< rows x columns
};

/// Delimiter is the first of ',', ';', '\t' found in the header.
/// Throws FileNotFound, EmptyInput or NonNumericData (with row and column).
DataSet read_table(const std::string& path);
DataSet read_table(std::istream& in, const std::string& source);

struct DataSelection {
    Vector y;
    SeriesMatrix X;
    std::string lhs;
    std::vector<std::string> rhs;
    std::size_t first_row = 0;  ///< 0-based data row of y(0)
    std::string first_label;
    std::string last_label;
};

/// Picks lhs and rhs columns, optionally keeps only the last `last` rows and
/// applies the natural log. Throws ColumnNotFound, SampleTooSmall (last >
/// rows), NonNumericData (log of a nonpositive value) and RankDeficient when
/// a column is used twice.
DataSelection select_columns(const DataSet& data, const std::string& lhs,
                             const std::vector<std::string>& rhs, std::optional<std::size_t> last,
                             bool log);

/// Name of an rhs column that is (numerically) a linear combination of the
/// other rhs columns and the deterministic terms, if any.
std::optional<std::string> find_collinear_column(const DataSelection& sel, DeterministicCase dcase);

enum class Decision { Reject, FailToReject };

std::string_view to_string(Decision d) noexcept;

struct TestReport {
    TestStatistic statistic;
    std::map<double, double> critical_values;  ///< level -> value
    double level = 0.05;
    std::optional<Decision> decision;  ///< unset when no critical value is available
    std::string critvals_source;
    std::optional<std::uint64_t> critvals_seed;
    // provenance
    std::string data_source;
    std::string lhs;
    std::vector<std::string> rhs;
    std::string first_label;
    std::string last_label;
    bool log_transform = false;
};

/// Fills critical values for every tabulated level and the decision
/// (reject when statistic < critical value at `level`).
TestReport make_report(const TestStatistic& stat, std::span<const QuantileTable> tables,
                       double level, const std::string& critvals_source);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

void write_text(std::ostream& out, const std::vector<TestReport>& reports);
void write_json(std::ostream& out, const std::vector<TestReport>& reports);

}  // namespace vrcoint
