#include "vrcoint/detrend.hpp"

#include "vrcoint/error.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace vrcoint {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

}  // namespace

int deterministic_dimension(DeterministicCase dcase) noexcept {
    switch (dcase) {
        case DeterministicCase::D0: return 0;
        case DeterministicCase::D1: return 1;
        case DeterministicCase::D2: return 2;
    }
    return 0;
}

std::string_view to_string(DeterministicCase dcase) noexcept {
    switch (dcase) {
        case DeterministicCase::D0: return "d0";
        case DeterministicCase::D1: return "d1";
        case DeterministicCase::D2: return "d2";
    }
    return "?";
}

std::optional<DeterministicCase> parse_case(std::string_view text) {
    const auto key = lower(text);
    if (key == "d0") return DeterministicCase::D0;
    if (key == "d1") return DeterministicCase::D1;
    if (key == "d2") return DeterministicCase::D2;
    return std::nullopt;
}

std::string_view to_string(DetrendKind kind) noexcept {
    return kind == DetrendKind::Ols ? "ols" : "gls";
}

std::optional<DetrendKind> parse_detrend_kind(std::string_view text) {
    const auto key = lower(text);
    if (key == "ols") return DetrendKind::Ols;
    if (key == "gls") return DetrendKind::Gls;
    return std::nullopt;
}

void validate(DeterministicCase dcase, const DetrendMode& mode) {
    if (!mode.is_gls()) return;
    if (dcase == DeterministicCase::D0) {
        raise(ErrorCode::InvalidCase, "GLS detrending is undefined without deterministic terms (d0)");
    }
    if (!(mode.c_bar <= 0.0)) {
        std::ostringstream msg;
        msg << "GLS constant c_bar must be nonpositive, got " << mode.c_bar;
        raise(ErrorCode::InvalidArgument, msg.str());
    }
}

SeriesMatrix deterministic_regressors(DeterministicCase dcase, Eigen::Index T) {
    const int p = deterministic_dimension(dcase);
    SeriesMatrix d(T, p);
    if (p >= 1) d.col(0).setOnes();
    if (p >= 2) d.col(1) = Eigen::VectorXd::LinSpaced(T, 1.0, static_cast<double>(T));
    return d;
}

SeriesMatrix ols_detrend(const SeriesMatrix& z, DeterministicCase dcase) {
    if (dcase == DeterministicCase::D0) return z;
    const auto T = z.rows();
    if (T <= deterministic_dimension(dcase)) {
        raise(ErrorCode::DimensionMismatch, "sample too short to remove deterministic terms");
    }
    return least_squares(deterministic_regressors(dcase, T), z).residuals;
}

SeriesMatrix quasi_difference(const SeriesMatrix& a, double rho) {
    SeriesMatrix out(a.rows(), a.cols());
    if (a.rows() == 0) return out;
    out.row(0) = a.row(0);
    const auto n = a.rows() - 1;
    out.bottomRows(n) = a.bottomRows(n) - rho * a.topRows(n);
    return out;
}

SeriesMatrix gls_detrend(const SeriesMatrix& z, DeterministicCase dcase, double c_bar) {
    validate(dcase, DetrendMode::gls(c_bar));
    const auto T = z.rows();
    if (T < 3) raise(ErrorCode::SampleTooSmall, "GLS detrending needs T >= 3");
    const double rho_bar = 1.0 + c_bar / static_cast<double>(T);
    const SeriesMatrix d = deterministic_regressors(dcase, T);
    const auto fit = least_squares(quasi_difference(d, rho_bar), quasi_difference(z, rho_bar));
    return z - d * fit.coefficients;
}

SeriesMatrix detrend(const SeriesMatrix& z, DeterministicCase dcase, const DetrendMode& mode) {
    return mode.is_gls() ? gls_detrend(z, dcase, mode.c_bar) : ols_detrend(z, dcase);
}

}  // namespace vrcoint
