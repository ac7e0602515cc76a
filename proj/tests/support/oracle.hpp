#pragma once

// Straight-line reference implementations used to cross-check the library.
// They share no code with it: normal equations in long double solved by
// Gauss-Jordan elimination with partial pivoting.

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Row = std::vector<double>;

struct Fit {
    std::vector<double> coef;
    std::vector<double> resid;
    double rss = 0.0;
    std::vector<std::vector<long double>> inv_xtx;
};

inline Fit ols(const std::vector<Row>& X, const std::vector<double>& y) {
    const std::size_t n = X.size();
    const std::size_t k = X.at(0).size();
    std::vector<std::vector<long double>> a(k, std::vector<long double>(2 * k + 1, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c) a[r][c] += (long double)X[i][r] * X[i][c];
            a[r][2 * k] += (long double)X[i][r] * y[i];
        }
    }
    for (std::size_t r = 0; r < k; ++r) a[r][k + r] = 1.0L;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::fabs((double)a[r][col]) > std::fabs((double)a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        const long double d = a[col][col];
        if (d == 0.0L) throw std::runtime_error("oracle: singular normal equations");
        for (auto& v : a[col]) v /= d;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const long double f = a[r][col];
            for (std::size_t c = 0; c <= 2 * k; ++c) a[r][c] -= f * a[col][c];
        }
    }
    Fit fit;
    fit.coef.resize(k);
    fit.inv_xtx.assign(k, std::vector<long double>(k));
    for (std::size_t r = 0; r < k; ++r) {
        fit.coef[r] = (double)a[r][2 * k];
        for (std::size_t c = 0; c < k; ++c) fit.inv_xtx[r][c] = a[r][k + c];
    }
    fit.resid.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double e = y[i];
        for (std::size_t r = 0; r < k; ++r) e -= (long double)X[i][r] * fit.coef[r];
        fit.resid[i] = (double)e;
        fit.rss += (double)(e * e);
    }
    return fit;
}

/// Dickey-Fuller regression over t = first..T (1-based).
inline Fit adf_fit(const std::vector<double>& u, int p, int first) {
    std::vector<Row> X;
    std::vector<double> y;
    const int T = (int)u.size();
    for (int t = first; t <= T; ++t) {
        Row row{u[t - 2]};
        for (int j = 1; j <= p; ++j) row.push_back(u[t - 1 - j] - u[t - 2 - j]);
        X.push_back(row);
        y.push_back(u[t - 1] - u[t - 2]);
    }
    return ols(X, y);
}

inline double adf(const std::vector<double>& u, int p) {
    const auto f = adf_fit(u, p, p + 2);
    const double n = (double)f.resid.size();
    const double s2 = f.rss / (n - (p + 1));
    return f.coef[0] / std::sqrt(s2 * (double)f.inv_xtx[0][0]);
}

inline double msb(const std::vector<double>& u, int p) {
    const auto f = adf_fit(u, p, p + 2);
    const double T = (double)u.size();
    double pi = 0.0;
    for (int j = 1; j <= p; ++j) pi += f.coef[j];
    double ss = 0.0;
    for (double v : u) ss += v * v;
    const double s2 = (f.rss / T) / ((1 - pi) * (1 - pi));
    return std::sqrt(ss / (T * T) / s2);
}

/// kind: 0 AIC, 1 BIC, 2 MAIC, 3 MBIC
inline double criterion(const std::vector<double>& u, int kind, int p, int p_max) {
    const auto f = adf_fit(u, p, p_max + 2);
    const double T = (double)u.size();
    const double s2 = f.rss / T;
    if (kind == 0) return std::log(s2) + 2.0 * p / T;
    if (kind == 1) return std::log(s2) + p * std::log(T) / T;
    double lagged = 0.0;
    for (int t = p_max + 2; t <= (int)u.size(); ++t) lagged += u[t - 2] * u[t - 2];
    const double ne = T - p_max;
    const double s2m = T * s2 / ne;
    const double tau = f.coef[0] * f.coef[0] * lagged / s2m;
    return std::log(s2m) + (kind == 2 ? 2.0 : std::log(ne)) * (p + tau) / ne;
}

inline double vr(const std::vector<double>& u) {
    double cum = 0.0, num = 0.0, den = 0.0;
    for (double v : u) {
        cum += v;
        num += cum * cum;
        den += v * v;
    }
    const double T = (double)u.size();
    return num / (T * T) / den;
}

/// Random walk of length T from a seeded Mersenne Twister.
inline std::vector<double> random_walk(std::size_t T, unsigned seed = 42) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<double> u(T);
    double level = 0.0;
    for (auto& v : u) v = (level += nd(gen));
    return u;
}

}  // namespace oracle
