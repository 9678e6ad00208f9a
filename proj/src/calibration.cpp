#include "hetvol/calibration.hpp"

#include "hetvol/errors.hpp"
#include "hetvol/fft.hpp"
#include "hetvol/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hetvol {

std::vector<double> ThetaVector::pack() const {
    std::vector<double> x;
    x.reserve(dim());
    x.insert(x.end(), a.begin(), a.end());
    x.insert(x.end(), b.begin(), b.end());
    x.push_back(alpha);
    x.push_back(w);
    x.push_back(sigma_eps);
    x.push_back(d);
    return x;
}

ThetaVector ThetaVector::unpack(const std::vector<double>& x, int q) {
    if (int(x.size()) != 2 * q + 4)
        throw ConfigError("ThetaVector::unpack: wrong dimension");
    ThetaVector t;
    t.a.assign(x.begin(), x.begin() + q);
    t.b.assign(x.begin() + q, x.begin() + 2 * q);
    t.alpha = x[2 * q];
    t.w = x[2 * q + 1];
    t.sigma_eps = x[2 * q + 2];
    t.d = x[2 * q + 3];
    return t;
}

ModelSpec ThetaVector::to_model() const {
    ModelSpec m;
    MixtureDensity mx;
    mx.w = w;
    mx.regular.a = a;
    mx.regular.b = b;
    mx.singular.d = (w < 1.0) ? d : std::min(d, 0.49);
    m.density = mx;
    m.coupling = LinearCoupling{alpha};
    m.sigma_eps = sigma_eps;
    return m;
}

bool theta_feasible(const ThetaVector& t) {
    if (!(t.d > 0.0 && t.d < 1.0)) return false;
    if (!(t.w >= 0.0 && t.w <= 1.0)) return false;
    if (!(t.sigma_eps > 0.0)) return false;
    if (!std::isfinite(t.alpha)) return false;
    FourierDensity f1;
    f1.a = t.a;
    f1.b = t.b;
    for (int i = 0; i <= 2000; ++i) {
        const double x = -1.0 + 2.0 * i / 2000.0;
        if (f1.eval(x) < 0.0) return false;
    }
    return true;
}

bool theta_stationary(const ThetaVector& t) {
    return t.w >= 1.0 || t.d < 0.5;
}

std::vector<double> model_eta(const ThetaVector& t, int L, const EtaOptions& opts) {
    if (!theta_feasible(t) || !theta_stationary(t))
        throw ConfigError("model_eta: theta outside the feasible/stationary set");
    FftAcfOptions fo;
    fo.calibrate_wrap = false; // the wrap constant cancels in the differences
    fo.richardson = false;
    const ModelACF acf = acf_via_fft(t.to_model(), opts.N, L, fo);
    std::vector<double> eta(L);
    for (int h = 1; h <= L; ++h) eta[h - 1] = acf.gamma[h] - acf.gamma[0];
    return eta;
}

std::vector<double> sample_eta(const std::vector<double>& omega, int L) {
    const std::vector<double> g = sample_autocov(omega, L);
    std::vector<double> eta(L);
    for (int h = 1; h <= L; ++h) eta[h - 1] = g[h] - g[0];
    return eta;
}

Eigen::MatrixXd sigma2_from_gamma(const std::vector<double>& gamma_ext, int L, int S) {
    auto g = [&](long s) -> double {
        const std::size_t idx = std::size_t(s < 0 ? -s : s);
        return idx < gamma_ext.size() ? gamma_ext[idx] : 0.0;
    };
    Eigen::MatrixXd W(L, L);
    for (int k = 1; k <= L; ++k) {
        for (int l = k; l <= L; ++l) {
            double acc = 0.0;
            for (long s = -S; s <= S; ++s) {
                const double term = g(s) - g(s - k) - g(s - l) + g(s - k + l);
                acc += term * term;
            }
            W(k - 1, l - 1) = 0.5 * acc;
            W(l - 1, k - 1) = W(k - 1, l - 1);
        }
    }
    return W;
}

Sigma2Result sigma2_matrix(const ThetaVector& t, int L, const Sigma2Options& opts) {
    Sigma2Result out;
    int S = opts.initial_S;
    // model autocovariance far enough for the widest pass
    const int far = opts.max_S + L + 1;
    int N = 4 * far;
    N = int(next_pow2(std::size_t(N)));
    FftAcfOptions fo;
    const ModelACF acf = acf_via_fft(t.to_model(), N, far, fo);
    Eigen::MatrixXd prev = sigma2_from_gamma(acf.gamma, L, S);
    for (;;) {
        const int S2 = 2 * S;
        if (S2 + L >= far || S2 > opts.max_S) { out.matrix = prev; break; }
        Eigen::MatrixXd next = sigma2_from_gamma(acf.gamma, L, S2);
        out.last_increment = (next - prev).norm() / std::max(next.norm(), 1e-300);
        S = S2;
        prev = std::move(next);
        if (out.last_increment < opts.rel_increment_tol) { out.matrix = prev; break; }
    }
    out.S_used = S;
    if (out.last_increment >= opts.error_tol)
        throw NumericalError("sigma2_matrix: tail increment " +
                             std::to_string(out.last_increment) +
                             " above the error threshold (S cap too small)");
    out.tail_warning = out.last_increment >= opts.warn_tol;

    // PSD enforcement by eigenvalue clipping
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix);
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < 0.0) {
        out.psd_clip = -ev.minCoeff();
        Eigen::VectorXd cl = ev.cwiseMax(0.0);
        out.matrix = es.eigenvectors() * cl.asDiagonal() * es.eigenvectors().transpose();
    }
    return out;
}

double objective_quadratic(const std::vector<double>& eta_hat,
                           const std::vector<double>& eta_model,
                           const Eigen::MatrixXd& W) {
    const int L = int(eta_hat.size());
    if (int(eta_model.size()) != L || W.rows() != L || W.cols() != L)
        throw ConfigError("objective: dimension mismatch");
    Eigen::VectorXd r(L);
    for (int i = 0; i < L; ++i) r[i] = eta_hat[i] - eta_model[i];
    Eigen::LLT<Eigen::MatrixXd> llt(W);
    if (llt.info() != Eigen::Success)
        throw NumericalError("objective: weight matrix not positive definite");
    return r.dot(llt.solve(r));
}

// ---------------------------------------------------------------------------
// optimizers
// ---------------------------------------------------------------------------

NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const std::vector<double>& steps,
    const NelderMeadOptions& opts) {
    const int n = int(x0.size());
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : 200 * n;
    NelderMeadResult res;
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (int i = 0; i < n; ++i) pts[i + 1][i] += steps[i];
    for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);
    res.evaluations = n + 1;
    if (!std::isfinite(fv[0]))
        throw ConfigError("nelder_mead: infeasible start");

    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int i, int j) { return fv[i] < fv[j]; });
        std::vector<std::vector<double>> p2;
        std::vector<double> f2;
        for (int i : idx) { p2.push_back(pts[i]); f2.push_back(fv[i]); }
        pts = std::move(p2);
        fv = std::move(f2);
    };
    order();

    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        // termination: simplex diameter / f-spread
        double diam = 0.0;
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j < n; ++j)
                diam = std::max(diam, std::abs(pts[i][j] - pts[0][j]));
        const double fspread = std::isfinite(fv[n]) ? fv[n] - fv[0] : HUGE_VAL;
        if (diam < opts.diameter_tol || fspread < opts.fspread_tol) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) centroid[j] += pts[i][j] / double(n);
        auto blend = [&](double c) {
            std::vector<double> x(n);
            for (int j = 0; j < n; ++j)
                x[j] = centroid[j] + c * (pts[n][j] - centroid[j]);
            return x;
        };
        const std::vector<double> xr = blend(-1.0);
        const double fr = f(xr);
        ++res.evaluations;
        if (fr < fv[0]) {
            const std::vector<double> xe = blend(-2.0);
            const double fe = f(xe);
            ++res.evaluations;
            pts[n] = fe < fr ? xe : xr;
            fv[n] = std::min(fe, fr);
        } else if (fr < fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
        } else {
            const bool outside = fr < fv[n];
            const std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            ++res.evaluations;
            if (fc < std::min(fr, fv[n])) {
                pts[n] = xc;
                fv[n] = fc;
            } else {
                // shrink toward the best point
                for (int i = 1; i <= n; ++i) {
                    for (int j = 0; j < n; ++j)
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    fv[i] = f(pts[i]);
                }
                res.evaluations += n;
            }
        }
        order();
    }
    res.x = pts[0];
    res.fval = fv[0];
    return res;
}

NelderMeadResult differential_evolution(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& lo, const std::vector<double>& hi,
    const DeOptions& opts) {
    const int n = int(lo.size());
    const int np = opts.population > 0 ? opts.population : 15 * n;
    Rng64 rng(opts.seed, 11);
    std::vector<std::vector<double>> pop(np, std::vector<double>(n));
    std::vector<double> fv(np);
    NelderMeadResult res;
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < n; ++j)
            pop[i][j] = lo[j] + (hi[j] - lo[j]) * rng.uniform();
        fv[i] = f(pop[i]);
    }
    res.evaluations = np;
    std::vector<double> trial(n);
    for (int gen = 0; gen < opts.generations; ++gen) {
        for (int i = 0; i < np; ++i) {
            int r1, r2, r3;
            do { r1 = int(rng.uniform() * np); } while (r1 == i);
            do { r2 = int(rng.uniform() * np); } while (r2 == i || r2 == r1);
            do { r3 = int(rng.uniform() * np); } while (r3 == i || r3 == r1 || r3 == r2);
            const int jrand = int(rng.uniform() * n);
            for (int j = 0; j < n; ++j) {
                if (j == jrand || rng.uniform() < opts.CR) {
                    double v = pop[r1][j] + opts.F * (pop[r2][j] - pop[r3][j]);
                    v = std::clamp(v, lo[j], hi[j]);
                    trial[j] = v;
                } else {
                    trial[j] = pop[i][j];
                }
            }
            const double ft = f(trial);
            ++res.evaluations;
            if (ft <= fv[i]) {
                pop[i] = trial;
                fv[i] = ft;
            }
        }
        res.iterations = gen + 1;
    }
    int best = 0;
    for (int i = 1; i < np; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = pop[best];
    res.fval = fv[best];
    res.converged = std::isfinite(res.fval);
    return res;
}

// ---------------------------------------------------------------------------
// fitting
// ---------------------------------------------------------------------------

namespace {

// objective wrapper with the extended-value barrier
double barrier_objective(const std::vector<double>& x, int q,
                         const std::vector<double>& eta_hat,
                         const Eigen::MatrixXd& W, const EtaOptions& eo) {
    ThetaVector t = ThetaVector::unpack(x, q);
    if (!theta_feasible(t) || !theta_stationary(t)) return HUGE_VAL;
    try {
        const std::vector<double> eta = model_eta(t, int(eta_hat.size()), eo);
        return objective_quadratic(eta_hat, eta, W);
    } catch (const std::exception&) {
        return HUGE_VAL;
    }
}

std::vector<double> nm_steps(const ThetaVector& t) {
    std::vector<double> s(t.dim(), 0.05);
    const int q = t.q();
    s[2 * q] = 0.1;                                     // alpha
    s[2 * q + 1] = 0.1;                                 // w
    s[2 * q + 2] = std::max(0.1 * t.sigma_eps, 0.01);   // sigma
    s[2 * q + 3] = 0.05;                                // d
    return s;
}

bool near_boundary(const ThetaVector& t) {
    const double tol = 1e-4;
    if (t.w < tol || t.w > 1.0 - tol) return true;
    if (t.d < tol || t.d > 1.0 - tol) return true;
    if (t.w < 1.0 && t.d > 0.5 - tol) return true;
    return false;
}

} // namespace

EstimationResult single_fit(const std::vector<double>& omega, const ThetaVector& start,
                            const Eigen::MatrixXd* W, const FitOptions& opts) {
    const int L = opts.L;
    const int T = int(omega.size());
    if (T <= L) throw ConfigError("single_fit: series shorter than L");
    const std::vector<double> eta_hat = sample_eta(omega, L);
    const Eigen::MatrixXd Wmat = W ? *W : Eigen::MatrixXd::Identity(L, L);
    const int q = start.q();
    auto f = [&](const std::vector<double>& x) {
        return barrier_objective(x, q, eta_hat, Wmat, opts.eta);
    };
    NelderMeadResult nm = nelder_mead(f, start.pack(), nm_steps(start), opts.nm);
    EstimationResult out;
    out.theta = ThetaVector::unpack(nm.x, q);
    out.objective_value = nm.fval;
    out.converged = nm.converged;
    out.L_used = L;
    out.T = T;
    out.boundary_flag = near_boundary(out.theta);
    out.stage_objectives.push_back(nm.fval);
    if (opts.covariance) {
        Sigma2Result s2 = sigma2_matrix(out.theta, L);
        out.A_L = asymptotic_covariance(out.theta, L, Wmat, s2.matrix, opts.eta);
        out.se.resize(out.theta.dim());
        for (int i = 0; i < out.theta.dim(); ++i)
            out.se[i] = std::sqrt(std::max(out.A_L(i, i), 0.0) / double(T));
        if (out.boundary_flag)
            out.notes.push_back("theta near a boundary of Theta: the asymptotic "
                                "normal approximation is not valid there");
    }
    return out;
}

EstimationResult step_by_step_fit(const std::vector<double>& omega, int q_target,
                                  const FitOptions& opts) {
    const int L = opts.L;
    const int T = int(omega.size());
    if (q_target < 1) throw ConfigError("step_by_step_fit: q_target must be >= 1");
    if (T <= L || L < 2 * q_target + 4)
        throw ConfigError("step_by_step_fit: need T > L >= 2q+4");
    const std::vector<double> eta_hat = sample_eta(omega, L);

    ThetaVector t;
    t.a = {0.0};
    t.b = {0.0};
    t.alpha = 0.3;
    t.w = 0.5;
    t.sigma_eps = opts.sigma_start > 0.0 ? opts.sigma_start : sd_of(omega);
    t.d = 0.25;

    EstimationResult out;
    out.L_used = L;
    out.T = T;

    Eigen::MatrixXd W = Eigen::MatrixXd::Identity(L, L);
    // stage 1: identity weighting, q-ladder with zero-padded warm starts
    for (int q = 1; q <= q_target; ++q) {
        if (q > 1) {
            t.a.push_back(0.0);
            t.b.push_back(0.0);
        }
        auto f = [&](const std::vector<double>& x) {
            return barrier_objective(x, q, eta_hat, W, opts.eta);
        };
        NelderMeadResult nm = nelder_mead(f, t.pack(), nm_steps(t), opts.nm);
        t = ThetaVector::unpack(nm.x, q);
        out.stage_objectives.push_back(nm.fval);
        out.objective_value = nm.fval;
        out.converged = nm.converged;
    }

    // stage 2: re-weight with Sigma^2 at the stage-1 estimate and re-fit
    if (opts.two_stage) {
        try {
            Sigma2Result s2 = sigma2_matrix(t, L);
            if (s2.psd_clip > 0.0)
                out.notes.push_back("Sigma^2 eigenvalue clip: " +
                                    std::to_string(s2.psd_clip));
            // keep the weight usable for the Cholesky solve
            Eigen::MatrixXd Ws = s2.matrix;
            const double ridge = 1e-10 * Ws.trace() / L;
            for (int i = 0; i < L; ++i) Ws(i, i) += ridge;
            auto f = [&](const std::vector<double>& x) {
                return barrier_objective(x, q_target, eta_hat, Ws, opts.eta);
            };
            NelderMeadResult nm = nelder_mead(f, t.pack(), nm_steps(t), opts.nm);
            t = ThetaVector::unpack(nm.x, q_target);
            W = Ws;
            out.stage_objectives.push_back(nm.fval);
            out.objective_value = nm.fval;
            out.converged = nm.converged;
        } catch (const std::exception& e) {
            out.notes.push_back(std::string("stage-2 weighting failed, keeping "
                                            "stage-1 estimate: ") + e.what());
        }
    }

    out.theta = t;
    out.boundary_flag = near_boundary(t);
    if (opts.covariance) {
        try {
            Sigma2Result s2 = sigma2_matrix(t, L);
            out.A_L = asymptotic_covariance(t, L, W, s2.matrix, opts.eta);
            out.se.resize(t.dim());
            for (int i = 0; i < t.dim(); ++i)
                out.se[i] = std::sqrt(std::max(out.A_L(i, i), 0.0) / double(T));
            if (out.boundary_flag)
                out.notes.push_back("theta near a boundary of Theta: the asymptotic "
                                    "normal approximation is not valid there");
        } catch (const std::exception& e) {
            out.notes.push_back(std::string("covariance unavailable: ") + e.what());
        }
    }
    return out;
}

EstimationResult de_fit(const std::vector<double>& omega, int q, const DeOptions& opts) {
    const int L = opts.L;
    const int T = int(omega.size());
    if (T <= L) throw ConfigError("de_fit: series shorter than L");
    const std::vector<double> eta_hat = sample_eta(omega, L);
    const Eigen::MatrixXd W = Eigen::MatrixXd::Identity(L, L);
    const int dim = 2 * q + 4;
    std::vector<double> lo(dim), hi(dim);
    for (int j = 0; j < 2 * q; ++j) { lo[j] = -0.5; hi[j] = 0.5; }
    lo[2 * q] = -1.0;      hi[2 * q] = 1.0;       // alpha
    lo[2 * q + 1] = 0.0;   hi[2 * q + 1] = 1.0;   // w
    const double sd = sd_of(omega);
    lo[2 * q + 2] = 0.05 * sd; hi[2 * q + 2] = 3.0 * sd; // sigma
    lo[2 * q + 3] = 1e-3;  hi[2 * q + 3] = 0.499;  // d
    auto project = [&](const std::vector<double>& x) {
        ThetaVector t = ThetaVector::unpack(x, q);
        // shrink the Fourier part toward zero until f1 >= 0 on the grid
        for (int tries = 0; tries < 60 && !theta_feasible(t); ++tries) {
            for (double& v : t.a) v *= 0.8;
            for (double& v : t.b) v *= 0.8;
        }
        return t;
    };
    auto f = [&](const std::vector<double>& x) {
        const ThetaVector t = project(x);
        if (!theta_feasible(t) || !theta_stationary(t)) return HUGE_VAL;
        try {
            return objective_quadratic(eta_hat, model_eta(t, L, opts.eta), W);
        } catch (const std::exception&) {
            return HUGE_VAL;
        }
    };
    NelderMeadResult de = differential_evolution(f, lo, hi, opts);
    EstimationResult out;
    out.theta = project(de.x);
    out.objective_value = de.fval;
    out.converged = de.converged;
    out.L_used = L;
    out.T = T;
    out.boundary_flag = near_boundary(out.theta);
    return out;
}

Eigen::MatrixXd asymptotic_covariance(const ThetaVector& t, int L,
                                      const Eigen::MatrixXd& W,
                                      const Eigen::MatrixXd& Sigma2,
                                      const EtaOptions& opts) {
    const int dim = t.dim();
    Eigen::MatrixXd G(L, dim);
    const std::vector<double> x0 = t.pack();
    for (int j = 0; j < dim; ++j) {
        const double h = std::max(1e-5, 1e-5 * std::abs(x0[j]));
        std::vector<double> xp = x0, xm = x0;
        xp[j] += h;
        xm[j] -= h;
        ThetaVector tp = ThetaVector::unpack(xp, t.q());
        ThetaVector tm = ThetaVector::unpack(xm, t.q());
        // fall back to one-sided differences at the domain edge
        const bool okp = theta_feasible(tp) && theta_stationary(tp);
        const bool okm = theta_feasible(tm) && theta_stationary(tm);
        if (!okp && !okm)
            throw NumericalError("asymptotic_covariance: theta pinned on the boundary");
        const std::vector<double> ep =
            model_eta(okp ? tp : t, L, opts);
        const std::vector<double> em =
            model_eta(okm ? tm : t, L, opts);
        const double denom = (okp && okm) ? 2.0 * h : h;
        for (int i = 0; i < L; ++i) G(i, j) = (ep[i] - em[i]) / denom;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(W);
    if (llt.info() != Eigen::Success)
        throw NumericalError("asymptotic_covariance: W not positive definite");
    const Eigen::MatrixXd VG = llt.solve(G); // V = W^-1
    const Eigen::MatrixXd GVG = G.transpose() * VG;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(GVG);
    if (!lu.isInvertible()) {
        // name the flat direction
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(GVG);
        int flat = 0;
        es.eigenvalues().minCoeff(&flat);
        throw NumericalError(
            "asymptotic_covariance: G'WG is rank deficient (flat direction near "
            "parameter index " + std::to_string(flat) + ")");
    }
    const Eigen::MatrixXd Binv = lu.inverse();
    return Binv * VG.transpose() * Sigma2 * VG * Binv;
}

LProfile optimal_L(const ThetaVector& t, const std::vector<int>& candidates,
                   bool optimal_weight, const EtaOptions& opts) {
    if (candidates.empty()) throw ConfigError("optimal_L: no candidates");
    LProfile out;
    out.candidates = candidates;
    double best = HUGE_VAL;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const int L = candidates[i];
        Sigma2Result s2 = sigma2_matrix(t, L);
        Eigen::MatrixXd ridgeW = s2.matrix;
        const double ridge = 1e-10 * ridgeW.trace() / L;
        for (int j = 0; j < L; ++j) ridgeW(j, j) += ridge;
        const Eigen::MatrixXd W =
            optimal_weight ? ridgeW : Eigen::MatrixXd::Identity(L, L);
        const Eigen::MatrixXd A = asymptotic_covariance(t, L, W, s2.matrix, opts);
        out.frobenius.push_back(A.norm());
        if (out.frobenius.back() < best) {
            best = out.frobenius.back();
            out.best = int(i);
        }
    }
    return out;
}

std::vector<double> density_gradient(const ThetaVector& t, double x) {
    const int q = t.q();
    std::vector<double> D(t.dim(), 0.0);
    for (int n = 1; n <= q; ++n) {
        D[n - 1] = t.w * std::cos(n * std::numbers::pi * x);
        D[q + n - 1] = t.w * std::sin(n * std::numbers::pi * x);
    }
    FourierDensity f1;
    f1.a = t.a;
    f1.b = t.b;
    const double f1x = f1.eval(x);
    const double f2x = SingularBeta{t.d}.eval(x);
    D[2 * q] = 0.0; // alpha
    D[2 * q + 1] = f1x - (std::isinf(f2x) ? 0.0 : f2x);
    D[2 * q + 2] = 0.0; // sigma
    if (x >= 0.0 && x < 1.0 && !std::isinf(f2x)) {
        D[2 * q + 3] = (t.w - 1.0) * f2x *
                       (std::log(1.0 - x) +
                        (3.0 - 2.0 * t.d) / ((1.0 - t.d) * (2.0 - t.d)));
    } else if (x == 1.0) {
        D[2 * q + 3] = (t.w < 1.0 && t.d > 0.0)
                           ? std::numeric_limits<double>::infinity()
                           : 0.0;
    }
    return D;
}

DensityBand density_confidence_band(const ThetaVector& t,
                                    const Eigen::MatrixXd& A_L, int T,
                                    const std::vector<double>& grid, double level) {
    DensityBand out;
    out.x = grid;
    const double z = [&] {
        // inverse normal for the two-sided level (bisection on erfc)
        const double p = 0.5 + 0.5 * level;
        double lo = 0.0, hi = 10.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (0.5 * std::erfc(-mid / std::numbers::sqrt2) < p ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    const Density den = MixtureDensity{t.w, FourierDensity{t.a, t.b}, SingularBeta{t.d}};
    for (double x : grid) {
        const double f = density_eval(den, x);
        const std::vector<double> D = density_gradient(t, x);
        double quad = 0.0;
        bool unbounded = false;
        for (int i = 0; i < t.dim() && !unbounded; ++i) {
            if (std::isinf(D[i])) { unbounded = true; break; }
            for (int j = 0; j < t.dim(); ++j) quad += D[i] * A_L(i, j) * D[j];
        }
        const double half = unbounded || std::isinf(f)
                                ? std::numeric_limits<double>::infinity()
                                : z * std::sqrt(std::max(quad, 0.0) / double(T));
        out.f.push_back(f);
        out.lo.push_back(f - half);
        out.hi.push_back(f + half);
    }
    return out;
}

PeakSplit split_at_peak(const std::vector<double>& level_series) {
    if (level_series.empty()) throw DataError("split_at_peak: empty series");
    PeakSplit out;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < level_series.size(); ++i)
        if (level_series[i] > level_series[peak]) peak = i; // ties: earliest
    out.peak_index = peak;
    out.before.assign(level_series.begin(), level_series.begin() + peak + 1);
    out.after.assign(level_series.begin() + peak + 1, level_series.end());
    return out;
}

} // namespace hetvol
