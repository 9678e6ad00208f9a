#include "hetvol/semiparam.hpp"

#include "hetvol/errors.hpp"
#include "hetvol/fft.hpp"
#include "hetvol/rng.hpp"
#include "hetvol/volatility.hpp"

#include <cmath>
#include <numbers>

namespace hetvol {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<double> periodogram(const std::vector<double>& x) {
    const int T = int(x.size());
    if (T < 16) throw DataError("periodogram: need at least 16 observations");
    const double mean = mean_of(x);
    std::vector<cdouble> in(T);
    for (int t = 0; t < T; ++t) in[t] = cdouble(x[t] - mean, 0.0);
    const std::vector<cdouble> X = dft(in);
    const int m = (T - 1) / 2;
    std::vector<double> I(m);
    for (int j = 1; j <= m; ++j)
        I[j - 1] = std::norm(X[j]) / (2.0 * kPi * T);
    return I;
}

GPHResult gph_estimate(const std::vector<double>& x, int m) {
    const int T = int(x.size());
    const int mmax = (T - 1) / 2;
    if (m <= 1) m = int(std::floor(std::sqrt(double(T))));
    if (m < 2 || m > mmax)
        throw ConfigError("gph_estimate: bandwidth m out of range");
    const std::vector<double> I = periodogram(x);
    std::vector<double> xs(m), ys(m);
    for (int j = 1; j <= m; ++j) {
        const double lam = 2.0 * kPi * j / T;
        xs[j - 1] = -std::log(4.0 * std::sin(lam / 2.0) * std::sin(lam / 2.0));
        if (I[j - 1] <= 0.0)
            throw NumericalError("gph_estimate: zero periodogram ordinate");
        ys[j - 1] = std::log(I[j - 1]);
    }
    double sx = 0, sy = 0;
    for (int i = 0; i < m; ++i) { sx += xs[i]; sy += ys[i]; }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    GPHResult out;
    out.m = m;
    out.d = sxy / sxx;
    out.se = std::sqrt(kPi * kPi / 6.0 / sxx);
    return out;
}

HurstResult rs_hurst(const std::vector<double>& x) {
    const int T = int(x.size());
    if (T < 64) throw DataError("rs_hurst: need at least 64 observations");
    HurstResult out;
    const int n_lo = 16, n_hi = T / 4;
    const int points = 8;
    std::vector<double> lx, ly;
    for (int i = 0; i < points; ++i) {
        const double f = double(i) / double(points - 1);
        const int n = int(std::round(n_lo * std::pow(double(n_hi) / n_lo, f)));
        double acc = 0.0;
        int used = 0;
        for (int start = 0; start + n <= T; start += n) {
            double mean = 0.0;
            for (int t = 0; t < n; ++t) mean += x[start + t];
            mean /= n;
            double cum = 0.0, mn = 0.0, mxv = 0.0, s2 = 0.0;
            for (int t = 0; t < n; ++t) {
                const double dv = x[start + t] - mean;
                cum += dv;
                mn = std::min(mn, cum);
                mxv = std::max(mxv, cum);
                s2 += dv * dv;
            }
            const double S = std::sqrt(s2 / n);
            if (S <= 0.0) continue; // degenerate block skipped
            acc += (mxv - mn) / S;
            ++used;
        }
        if (used == 0) continue;
        out.block_sizes.push_back(n);
        out.rs.push_back(acc / used);
        lx.push_back(std::log(double(n)));
        ly.push_back(std::log(acc / used));
    }
    if (lx.size() < 3) throw NumericalError("rs_hurst: too few usable block sizes");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) { sx += lx[i]; sy += ly[i]; }
    const double mx = sx / double(lx.size()), my = sy / double(ly.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    out.H = sxy / sxx;
    out.d = out.H - 0.5;
    out.trend_flag = out.H >= 0.95;
    return out;
}

std::vector<double> arfima_simulate(int T, double d, std::uint64_t seed) {
    if (T < 1) throw ConfigError("arfima_simulate: T must be >= 1");
    // psi_k of (1-L)^{-d}: psi_0 = 1, psi_k = psi_{k-1} (k-1+d)/k
    const std::size_t n = next_pow2(std::size_t(4) * std::size_t(T));
    std::vector<double> psi(n, 0.0);
    psi[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k)
        psi[k] = psi[k - 1] * (double(k) - 1.0 + d) / double(k);
    Rng64 rng(seed, 3);
    std::vector<double> eps(n);
    for (double& e : eps) e = rng.normal();
    const std::vector<double> conv = fft_convolve(psi, eps);
    // discard the warm-up so every output has a full filter history
    std::vector<double> out(T);
    const std::size_t off = n - std::size_t(T);
    for (int t = 0; t < T; ++t) out[t] = conv[off + t];
    return out;
}

} // namespace hetvol
