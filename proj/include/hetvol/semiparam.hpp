#ifndef HETVOL_SEMIPARAM_HPP
#define HETVOL_SEMIPARAM_HPP

#include <cstdint>
#include <vector>

namespace hetvol {

// Periodogram at Fourier frequencies lambda_j = 2 pi j/T, j = 1..floor((T-1)/2):
//   I(lambda_j) = |sum_t (x_t - xbar) e^{-i lambda_j t}|^2 / (2 pi T)
std::vector<double> periodogram(const std::vector<double>& x);

struct GPHResult {
    double d = 0.0;
    double se = 0.0;
    int m = 0; // frequencies used
};

// Log-periodogram regression of ln I(lambda_j) on -ln(4 sin^2(lambda_j/2)),
// j = 1..m; classical se with known error variance pi^2/6.
// m <= 1 selects the default floor(sqrt(T)).
GPHResult gph_estimate(const std::vector<double>& x, int m = 0);

struct HurstResult {
    double H = 0.5;
    double d = 0.0;           // H - 1/2
    bool trend_flag = false;  // H near 1: range dominated by a trend
    std::vector<int> block_sizes;
    std::vector<double> rs;   // mean R/S per block size
};

// Classical rescaled-range analysis over a geometric block grid
// (8 sizes from 16 to T/4), non-overlapping blocks.
HurstResult rs_hurst(const std::vector<double>& x);

// ARFIMA(0,d,0) generator: FFT fractional filter of Gaussian noise with
// 4x zero padding. Test oracle for the semiparametric estimators.
std::vector<double> arfima_simulate(int T, double d, std::uint64_t seed);

} // namespace hetvol

#endif
