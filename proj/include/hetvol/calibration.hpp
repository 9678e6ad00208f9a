#ifndef HETVOL_CALIBRATION_HPP
#define HETVOL_CALIBRATION_HPP

#include "hetvol/process.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace hetvol {

// theta = (a_1..a_q, b_1..b_q, alpha, w, sigma_eps, d), dimension 2q+4.
// The estimation model is the Fourier+singular mixture with the coupling
// E[psi|phi] = -alpha (phi - 1).
struct ThetaVector {
    std::vector<double> a;
    std::vector<double> b;
    double alpha = 0.3;
    double w = 0.5;
    double sigma_eps = 0.5;
    double d = 0.25;

    int q() const { return int(a.size()); }
    int dim() const { return 2 * q() + 4; }
    std::vector<double> pack() const;
    static ThetaVector unpack(const std::vector<double>& x, int q);
    ModelSpec to_model() const;
};

// Theta-domain membership: f1 >= 0 on a 2001-point grid, 0 < d < 1,
// 0 <= w <= 1, sigma > 0. Stationarity (d < 1/2 when w < 1) is tracked
// separately; the optimizers treat both as barriers.
bool theta_feasible(const ThetaVector& t);
bool theta_stationary(const ThetaVector& t);

struct EtaOptions {
    int L = 120;
    int N = 1 << 13;  // fit-grade spectral grid
    int fourier_terms = 8192;
};

// eta_L(theta) = (gamma(1;theta)-gamma(0;theta), ..., gamma(L)-gamma(0)).
std::vector<double> model_eta(const ThetaVector& t, int L,
                              const EtaOptions& opts = {});

std::vector<double> sample_eta(const std::vector<double>& omega, int L);

// [Sigma^2]_{kl} = 1/2 sum_s (gamma(s)-gamma(s-k)-gamma(s-l)+gamma(s-k+l))^2,
// truncation S doubled adaptively until the increment is negligible.
struct Sigma2Options {
    int initial_S = 4096;
    int max_S = 1 << 17;
    double rel_increment_tol = 1e-8;
    double warn_tol = 1e-6;
    double error_tol = 1e-3;
};

struct Sigma2Result {
    Eigen::MatrixXd matrix;
    int S_used = 0;
    double last_increment = 0.0;
    double psd_clip = 0.0; // magnitude of negative-eigenvalue clipping
    bool tail_warning = false;
};

Sigma2Result sigma2_matrix(const ThetaVector& t, int L,
                           const Sigma2Options& opts = {});
// white-noise/AR-style closed input: build Sigma^2 from an explicit acov
Eigen::MatrixXd sigma2_from_gamma(const std::vector<double>& gamma_ext, int L,
                                  int S);

// quadratic form (eta_hat - eta)' W^{-1} (eta_hat - eta), Cholesky solve
double objective_quadratic(const std::vector<double>& eta_hat,
                           const std::vector<double>& eta_model,
                           const Eigen::MatrixXd& W);

struct NelderMeadOptions {
    double diameter_tol = 1e-8;
    double fspread_tol = 1e-10;
    int max_iter = 0; // 0 -> 200 * dim
};

struct NelderMeadResult {
    std::vector<double> x;
    double fval = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Standard simplex method (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2); infeasible points receive +infinity (extended-value barrier).
NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const std::vector<double>& steps,
    const NelderMeadOptions& opts = {});

struct EstimationResult {
    ThetaVector theta;
    double objective_value = 0.0;
    Eigen::MatrixXd A_L;
    std::vector<double> se; // sqrt(A_ii / T)
    int L_used = 0;
    int T = 0;
    bool converged = false;
    bool boundary_flag = false; // theta within 1e-4 of a Theta boundary
    std::vector<double> stage_objectives;
    std::vector<std::string> notes;
};

struct FitOptions {
    int L = 120;
    bool two_stage = true;      // W = I, then W = Sigma^2(theta-hat stage 1)
    EtaOptions eta;
    NelderMeadOptions nm;
    bool covariance = true;     // compute A_L and se at the optimum
    double sigma_start = -1.0;  // <= 0: sample sd of omega
};

// Appendix-E style "step by step" ladder: fit q=1 from the neutral start,
// then warm-start q=2..q_target with new coefficients zero-padded.
EstimationResult step_by_step_fit(const std::vector<double>& omega, int q_target,
                                  const FitOptions& opts = {});

// one Nelder-Mead run at fixed q from an explicit start
EstimationResult single_fit(const std::vector<double>& omega, const ThetaVector& start,
                            const Eigen::MatrixXd* W, const FitOptions& opts = {});

struct DeOptions {
    int population = 0;   // 0 -> 15 * dim
    int generations = 500;
    double F = 0.7;
    double CR = 0.9;
    std::uint64_t seed = 1;
    int L = 120;
    EtaOptions eta;
};

EstimationResult de_fit(const std::vector<double>& omega, int q,
                        const DeOptions& opts = {});

// generic differential evolution used by de_fit (exposed for benchmarks)
NelderMeadResult differential_evolution(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& lo, const std::vector<double>& hi,
    const DeOptions& opts);

// sandwich A_L = (G'VG)^-1 G'V S2 V G (G'VG)^-1 with V = W^-1; with W = S2
// this reduces to (G' S2^-1 G)^-1. W is the covariance-scale weight, i.e.
// the matrix appearing as W^-1 in the objective.
Eigen::MatrixXd asymptotic_covariance(const ThetaVector& t, int L,
                                      const Eigen::MatrixXd& W,
                                      const Eigen::MatrixXd& Sigma2,
                                      const EtaOptions& opts = {});

struct LProfile {
    std::vector<int> candidates;
    std::vector<double> frobenius;
    int best = 0;
};

LProfile optimal_L(const ThetaVector& t, const std::vector<int>& candidates,
                   bool optimal_weight = true, const EtaOptions& opts = {});

// gradient D(theta) of f(x; theta): components
//   w cos(n pi x), w sin(n pi x), 0 (alpha), f1 - f2, 0 (sigma),
//   (w-1) f2 [ln(1-x) + (3-2d)/((1-d)(2-d))]
std::vector<double> density_gradient(const ThetaVector& t, double x);

struct DensityBand {
    std::vector<double> x, f, lo, hi;
};

DensityBand density_confidence_band(const ThetaVector& t,
                                    const Eigen::MatrixXd& A_L, int T,
                                    const std::vector<double>& grid,
                                    double level = 0.95);

struct PeakSplit {
    std::size_t peak_index = 0;
    std::vector<double> before; // up to and including the peak
    std::vector<double> after;  // strictly after the peak
};

PeakSplit split_at_peak(const std::vector<double>& level_series);

} // namespace hetvol

#endif
