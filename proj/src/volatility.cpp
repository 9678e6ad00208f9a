#include "hetvol/volatility.hpp"

#include "hetvol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hetvol {

double mean_of(const std::vector<double>& x) {
    if (x.empty()) throw DataError("mean of empty series");
    return std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
}

double sd_of(const std::vector<double>& x) {
    const double m = mean_of(x);
    double s2 = 0.0;
    for (double v : x) s2 += (v - m) * (v - m);
    return std::sqrt(s2 / double(x.size()));
}

DayResult compute_realized_variance(const IntradayDay& day) {
    const std::size_t n = day.price.size();
    if (n < 2)
        throw DataError("day " + day.date + " rejected: fewer than 2 observations");
    DayResult out;
    out.returns.reserve(n - 1);
    double prev = day.price[0];
    if (prev <= 0.0) throw DataError("day " + day.date + ": non-positive price");
    for (std::size_t i = 1; i < n; ++i) {
        const double p = day.price[i];
        if (p <= 0.0) throw DataError("day " + day.date + ": non-positive price");
        const double r = std::log(p) - std::log(prev);
        out.returns.push_back(r);
        out.rv += r * r;
        prev = p;
    }
    return out;
}

ErrorBand rv_error_band(const std::vector<double>& returns) {
    if (returns.empty()) throw DataError("rv_error_band: empty return vector");
    double s2 = 0.0, s4 = 0.0;
    for (double r : returns) {
        s2 += r * r;
        s4 += r * r * r * r;
    }
    ErrorBand b;
    b.plain = std::sqrt(2.0 / 3.0 * s4);
    if (s2 == 0.0)
        throw NumericalError("rv_error_band: all returns zero, log band degenerate");
    b.log_scale = std::sqrt(2.0 / 3.0 * s4 / (s2 * s2));
    return b;
}

LogVolSeries log_vol_series(const RVSeries& rv) {
    LogVolSeries out;
    out.omega.reserve(rv.rv.size());
    for (std::size_t i = 0; i < rv.rv.size(); ++i) {
        if (rv.rv[i] <= 0.0) {
            const std::string day = i < rv.dates.size() ? rv.dates[i] : std::to_string(i);
            throw DataError("log_vol_series: rv <= 0 on day " + day);
        }
        out.omega.push_back(0.5 * std::log(rv.rv[i]));
    }
    out.mean_omega = mean_of(out.omega);
    return out;
}

std::vector<double> sample_autocov(const std::vector<double>& x, int max_lag) {
    const int T = int(x.size());
    if (max_lag >= T)
        throw ConfigError("sample_autocov: max lag must be smaller than series length");
    if (max_lag < 0) throw ConfigError("sample_autocov: negative lag");
    const double m = mean_of(x);
    std::vector<double> g(max_lag + 1, 0.0);
    for (int h = 0; h <= max_lag; ++h) {
        double s = 0.0;
        for (int i = 0; i + h < T; ++i) s += (x[i] - m) * (x[i + h] - m);
        g[h] = s / double(T);
    }
    return g;
}

std::vector<double> sample_acf(const std::vector<double>& x, int max_lag) {
    std::vector<double> g = sample_autocov(x, max_lag);
    if (g[0] <= 0.0) throw NumericalError("sample_acf: degenerate series, zero variance");
    std::vector<double> r(g.size());
    for (std::size_t h = 0; h < g.size(); ++h) r[h] = g[h] / g[0];
    return r;
}

double silverman_bandwidth(const std::vector<double>& x) {
    if (x.size() < 2) return 1.0;
    const double s = sd_of(x);
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double p) {
        const double idx = p * double(sorted.size() - 1);
        const std::size_t lo = std::size_t(idx);
        const double frac = idx - double(lo);
        return lo + 1 < sorted.size() ? sorted[lo] * (1 - frac) + sorted[lo + 1] * frac
                                      : sorted[lo];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = std::min(s, iqr / 1.34);
    if (spread <= 0.0) spread = s > 0.0 ? s : 1.0;
    return 0.9 * spread * std::pow(double(x.size()), -0.2);
}

KdeCurve kde_density(const std::vector<double>& x, double bandwidth,
                     const std::vector<double>& grid) {
    if (x.empty()) throw DataError("kde_density: empty series");
    KdeCurve out;
    out.bandwidth = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(x);
    if (out.bandwidth <= 0.0) throw ConfigError("kde_density: bandwidth must be positive");
    out.x = grid;
    out.density.resize(grid.size(), 0.0);
    const double h = out.bandwidth;
    const double norm = 1.0 / (double(x.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double s = 0.0;
        for (double xi : x) {
            const double u = (grid[g] - xi) / h;
            s += std::exp(-0.5 * u * u);
        }
        out.density[g] = norm * s;
    }
    return out;
}

NormalityDiagnostics normality_diagnostics(const std::vector<double>& x) {
    const int T = int(x.size());
    if (T < 8) throw DataError("normality_diagnostics: need at least 8 observations");
    const double m = mean_of(x);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= T; m3 /= T; m4 /= T;
    if (m2 <= 0.0) throw NumericalError("normality_diagnostics: zero variance");
    NormalityDiagnostics nd;
    nd.skewness = m3 / std::pow(m2, 1.5);
    nd.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    nd.jarque_bera = double(T) / 6.0 *
                     (nd.skewness * nd.skewness +
                      0.25 * nd.excess_kurtosis * nd.excess_kurtosis);
    return nd;
}

} // namespace hetvol
