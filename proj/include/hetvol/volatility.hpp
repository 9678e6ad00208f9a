#ifndef HETVOL_VOLATILITY_HPP
#define HETVOL_VOLATILITY_HPP

#include <string>
#include <vector>

namespace hetvol {

// One trading day of intraday observations. Timestamps are seconds within
// the day, strictly increasing; prices strictly positive.
struct IntradayDay {
    std::string date; // ISO-8601
    std::vector<double> time_s;
    std::vector<double> price;
};

struct IntradaySeries {
    std::string symbol;
    std::vector<IntradayDay> days;
};

struct RVSeries {
    std::string symbol;
    std::vector<std::string> dates;
    std::vector<double> rv;   // realized variance per accepted day
    std::vector<int> n_obs;   // observations per accepted day
};

struct LogVolSeries {
    std::vector<double> omega; // log realized volatility, 0.5*ln(rv)
    double mean_omega = 0.0;
};

struct SampleMoments {
    std::vector<double> autocov; // gamma_hat(0..L), divisor T
    std::vector<double> acf;     // rho_hat(0..L)
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

struct DayResult {
    double rv = 0.0;
    std::vector<double> returns;
};

// Realized variance of one day: sum of squared log-returns.
// Throws DataError on fewer than 2 observations or non-positive prices.
DayResult compute_realized_variance(const IntradayDay& day);

struct ErrorBand {
    double plain;     // sqrt(2/3 * sum r^4), denominator for sigma^2-hat
    double log_scale; // sqrt(2/3 * sum r^4 / (sum r^2)^2), for ln sigma^2-hat
};

// Asymptotic error-band denominators. Throws NumericalError when all
// returns are zero (log form degenerates).
ErrorBand rv_error_band(const std::vector<double>& returns);

// omega_t = 0.5 * ln(rv_t); requires rv > 0 everywhere, names the first
// offending day otherwise.
LogVolSeries log_vol_series(const RVSeries& rv);

// Mean-centered sample autocovariance with divisor T (not T-h).
std::vector<double> sample_autocov(const std::vector<double>& x, int max_lag);

std::vector<double> sample_acf(const std::vector<double>& x, int max_lag);

struct KdeCurve {
    std::vector<double> x;
    std::vector<double> density;
    double bandwidth = 0.0;
};

// Gaussian-kernel density estimate. bandwidth <= 0 selects Silverman's rule.
KdeCurve kde_density(const std::vector<double>& x, double bandwidth,
                     const std::vector<double>& grid);

double silverman_bandwidth(const std::vector<double>& x);

struct NormalityDiagnostics {
    double skewness;
    double excess_kurtosis;
    double jarque_bera;
};

NormalityDiagnostics normality_diagnostics(const std::vector<double>& x);

double mean_of(const std::vector<double>& x);
double sd_of(const std::vector<double>& x); // divisor T

} // namespace hetvol

#endif
