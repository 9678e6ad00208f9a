#ifndef HETVOL_PROCESS_HPP
#define HETVOL_PROCESS_HPP

#include "hetvol/densities.hpp"
#include "hetvol/volatility.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hetvol {

using cdouble = std::complex<double>;

// Full model: heterogeneity density, coupling, public-news scale.
// E[c] is fixed to 1 (only the product E[c] sigma_eps is identified).
struct ModelSpec {
    Density density;
    Coupling coupling;
    double sigma_eps = 1.0;
    double mean_omega = 0.0;
};

struct MACoefficients {
    std::vector<double> beta_tilde; // 0..K
    std::vector<double> beta;       // 0..K-1
    int K = 0;
    double tail_sq_bound = 0.0; // estimate of sum_{k>K} beta_tilde_k^2
    bool summable = true;
};

// MA(inf) coefficients from the moment double recursion
//   beta_k  = E[psi phi^k] + sum_{i=1..k} beta_{i-1} E[psi phi^{k-i}]
//   btil_k  = E[phi^k]     + sum_{i=1..k} beta_{i-1} E[phi^{k-i}]
// Direct O(K^2) for small K, Newton power-series inversion (FFT) above.
// Rational coupling collapses btil to (1,0,0,...) exactly (algebraic identity).
MACoefficients ma_coefficients(const ModelSpec& m, int K);
MACoefficients ma_coefficients_from_moments(const std::vector<double>& mphi,
                                            const std::vector<double>& mpsiphi,
                                            int K, bool rational_exact = false);

int default_ma_truncation(const ModelSpec& m); // 1e4 for d<=0.3, 1e5 above

// Spectral density as an evaluator. `at` gives f_X(lambda) pointwise on
// (0, 2pi); `grid(N)` returns values at lambda_k = 2 pi k/N for k=0..N-1
// with the k=0 entry set to 0 (possibly divergent there).
struct Spectrum {
    std::function<double(double)> at;
    std::function<std::vector<double>(int)> grid;
    double sigma2 = 1.0;       // sigma_eps^2
    bool long_memory = false;
    double d_hint = 0.0;       // expected spectral exponent / 2 near 0
};

// Structural evaluator: exact N(z), D(z) per family (hypergeometric or
// quadrature), f = sigma^2/(2 pi) |N/(1 - z D)|^2.
Spectrum make_spectrum(const ModelSpec& m);
// Case-2 helper: phi a point mass at 0, E[psi] = psibar -> AR(1) spectrum.
Spectrum make_ar1_spectrum(double psibar, double sigma_eps);

enum class SpectrumMethod { Auto, BetaSum, Structural };

// Spec-facing operation: values of f_X on an explicit lambda grid.
// BetaSum evaluates |sum_k btil_k e^{-ik lambda}|^2 truncated at K.
std::vector<double> spectral_density(const ModelSpec& m,
                                     const std::vector<double>& lambda,
                                     SpectrumMethod method = SpectrumMethod::Auto,
                                     int K = -1);

// Eq.-(24)-style G(p,q,x) for real x in (-1,1) (both branches, as printed).
double g_pq(double p, double q, double x);

struct ModelACF {
    std::vector<double> gamma;
    std::vector<double> rho;
    std::string method; // "fft" | "ma-truncation"
};

struct FftAcfOptions {
    bool calibrate_wrap = true; // pin the h-constant alias term at h=0
    bool richardson = true;     // extrapolate over (N/2, N)
    int refine_levels = 46;     // geometric GL panels inside the first cell
};

// Autocovariance by spectral integration: measured local power
// A|2sin(l/2)|^{2a} integrated exactly (Riesz kernel coefficients),
// residual by trapezoid + inverse FFT, first cell by geometric
// Gauss-Legendre panels. N must be a power of two >= 4L.
ModelACF acf_via_fft(const Spectrum& s, int N, int L,
                     const FftAcfOptions& opts = {});
ModelACF acf_via_fft(const ModelSpec& m, int N, int L,
                     const FftAcfOptions& opts = {});

enum class TailMode { None, Auto };

// Autocovariance by direct convolution of the truncated MA coefficients.
// TailMode::Auto completes the tail with the power model beta_k ~ C k^{d-1}
// (exponent from d_hint when the model knows it, else from a log-log fit;
// amplitude from the last window). Documented bound: the raw truncation
// error is ~ K^{2d-1}, far above 1e-3 at practical K for long memory.
ModelACF acf_via_ma(const MACoefficients& ma, double sigma_eps, int L,
                    TailMode tail = TailMode::Auto, double d_hint = 0.0);

struct TailFit {
    double slope = 0.0;      // d log rho / d log h
    double implied_d = 0.0;  // (slope + 1)/2
    double curvature = 0.0;  // quadratic coefficient in log-log fit
    bool power_law = false;  // curvature test verdict
    int used_lo = 0, used_hi = 0;
    bool trimmed = false;    // non-positive rho trimmed from the range
};

TailFit tail_exponent(const std::vector<double>& rho, int h_lo, int h_hi);

// Aggregate-path simulation: truncated-MA filtering of Gaussian news.
struct AggregateOptions {
    int K = -1;        // MA truncation; -1 selects default_ma_truncation
    int burn_in = 0;   // kept for interface symmetry; the MA start is exact
};
LogVolSeries simulate_aggregate(const ModelSpec& m, int T, std::uint64_t seed,
                                const AggregateOptions& opts = {});

// MA filtering of Gaussian news with explicit coefficients (the kernel of
// simulate_aggregate; also usable for point-mass test models).
LogVolSeries simulate_ma(const std::vector<double>& beta_tilde, double sigma_eps,
                         double mean_omega, int T, std::uint64_t seed,
                         int burn_in = 0);

// Finite-n agent panel.
struct AgentPanel {
    std::vector<double> phi, psi, c;
    double eta_scale = 0.0;   // sigma_eta
    double spectral_radius = 0.0;
    bool rescaled = false;    // psi rescaled to enforce stationarity
    int redraws = 0;
};

struct PanelResult {
    LogVolSeries series;
    AgentPanel panel;
};

// Spectral radius of A = diag(phi) + (1/n) psi 1', by power iteration.
double panel_spectral_radius(const std::vector<double>& phi,
                             const std::vector<double>& psi);

AgentPanel draw_panel(const ModelSpec& m, std::size_t n, double sigma_eta,
                      std::uint64_t seed);

// Iterate an explicit panel: X_{i,t} = phi_i X_{i,t-1} + psi_i Xbar_{t-1}
//                                     + c_i eps_t + eta_{i,t}.
// The news stream eps is Rng64(seed, 1); agent noise uses per-agent streams.
LogVolSeries simulate_panel_path(const AgentPanel& p, double sigma_eps,
                                 double mean_omega, int T, int burn_in,
                                 std::uint64_t seed);

PanelResult simulate_panel(const ModelSpec& m, std::size_t n, int T,
                           int burn_in, std::uint64_t seed,
                           double sigma_eta = 0.0);

// Prop.-1 consistency check helper: relative spectral factorization error
// max_lambda |(1 - z S_psi(z)) B(z) - S_phi(z)| / |S_phi(z)| over a grid.
double prop1_factorization_error(const ModelSpec& m, int K, int n_lambda = 64);

} // namespace hetvol

#endif
