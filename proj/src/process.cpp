#include "hetvol/process.hpp"

#include "hetvol/errors.hpp"
#include "hetvol/fft.hpp"
#include "hetvol/quadrature.hpp"
#include "hetvol/rng.hpp"
#include "hetvol/special.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

namespace hetvol {

namespace {
constexpr double kPi = std::numbers::pi;

// truncated power-series inverse of a (a[0] = 1) by Newton doubling
std::vector<double> series_inverse(const std::vector<double>& a, int n) {
    std::vector<double> b{1.0 / a[0]};
    int m = 1;
    while (m < n) {
        const int m2 = std::min(2 * m, n);
        std::vector<double> atr(a.begin(), a.begin() + std::min<std::size_t>(m2, a.size()));
        std::vector<double> ab = fft_convolve(atr, b);
        ab.resize(m2);
        for (double& v : ab) v = -v;
        ab[0] += 2.0;
        std::vector<double> nb = fft_convolve(b, ab);
        nb.resize(m2);
        b = std::move(nb);
        m = m2;
    }
    b.resize(n);
    return b;
}

// log-log tail slope of |beta_tilde| over [K/2, K]; consecutive pairs are
// averaged first so an alternating component does not bias the fit.
struct TailSlope {
    double slope = -2.0;
    double amp = 0.0;
    bool ok = false;
};

TailSlope fit_tail_slope(const std::vector<double>& bt) {
    const int K = int(bt.size()) - 1;
    TailSlope out;
    if (K < 64) return out;
    const int lo = K / 2;
    std::vector<double> xs, ys;
    for (int k = lo; k + 1 <= K; k += 2) {
        const double v = 0.5 * (bt[k] + bt[k + 1]);
        if (v <= 0.0) return out; // not a positive power tail
        xs.push_back(std::log(k + 0.5));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 8) return out;
    const double n = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0) return out;
    out.slope = (n * sxy - sx * sy) / denom;
    out.amp = std::exp((sy - out.slope * sx) / n);
    out.ok = true;
    return out;
}

} // namespace

MACoefficients ma_coefficients_from_moments(const std::vector<double>& mphi,
                                            const std::vector<double>& mpsiphi,
                                            int K, bool rational_exact) {
    if (K < 0) throw ConfigError("ma_coefficients: K must be >= 0");
    if (int(mphi.size()) < K + 1 || int(mpsiphi.size()) < K + 1)
        throw ConfigError("ma_coefficients: moment tables shorter than K+1");
    MACoefficients out;
    out.K = K;
    if (rational_exact) {
        out.beta_tilde.assign(K + 1, 0.0);
        out.beta_tilde[0] = 1.0;
    }
    if (K <= 4096) {
        std::vector<double> beta(K + 1, 0.0);
        for (int k = 0; k <= K; ++k) {
            double s = mpsiphi[k];
            for (int i = 1; i <= k; ++i) s += beta[i - 1] * mpsiphi[k - i];
            beta[k] = s;
        }
        if (!rational_exact) {
            out.beta_tilde.assign(K + 1, 0.0);
            for (int k = 0; k <= K; ++k) {
                double s = mphi[k];
                for (int i = 1; i <= k; ++i) s += beta[i - 1] * mphi[k - i];
                out.beta_tilde[k] = s;
            }
        }
        beta.resize(std::max(K, 1));
        out.beta = std::move(beta);
    } else {
        // A(x) = 1 - x S_psi(x); beta = S_psi/A, btil = S_phi/A
        std::vector<double> A(K + 1, 0.0);
        A[0] = 1.0;
        for (int k = 1; k <= K; ++k) A[k] = -mpsiphi[k - 1];
        const std::vector<double> invA = series_inverse(A, K + 1);
        std::vector<double> spsi(mpsiphi.begin(), mpsiphi.begin() + K + 1);
        std::vector<double> b = fft_convolve(spsi, invA);
        b.resize(K);
        out.beta = std::move(b);
        if (!rational_exact) {
            std::vector<double> sphi(mphi.begin(), mphi.begin() + K + 1);
            std::vector<double> bt = fft_convolve(sphi, invA);
            bt.resize(K + 1);
            out.beta_tilde = std::move(bt);
        }
    }
    const TailSlope ts = fit_tail_slope(out.beta_tilde);
    if (ts.ok) {
        out.summable = ts.slope < -0.5;
        if (out.summable && ts.slope > -1.5) {
            const double p2 = 2.0 * ts.slope + 1.0; // exponent of the squared tail sum
            if (p2 < 0.0)
                out.tail_sq_bound = ts.amp * ts.amp * std::pow(double(K), p2) / (-p2);
        }
    } else {
        double tail = 0.0;
        for (int k = std::max(0, K - 16); k <= K; ++k)
            tail = std::max(tail, out.beta_tilde[k] * out.beta_tilde[k]);
        out.tail_sq_bound = tail * 16.0;
    }
    return out;
}

MACoefficients ma_coefficients(const ModelSpec& m, int K) {
    const bool rational = std::holds_alternative<RationalCoupling>(m.coupling);
    const MomentTable t = moment_table(m.density, m.coupling, K);
    return ma_coefficients_from_moments(t.mphi, t.mpsiphi, K, rational);
}

namespace {

double model_tail_d(const ModelSpec& m) {
    if (std::holds_alternative<RationalCoupling>(m.coupling)) return 0.0;
    if (const auto* af = std::get_if<AffineCoupling>(&m.coupling)) {
        if (std::abs(af->phibar - af->alpha) >= 1e-12) return 0.0; // short memory
    }
    return std::visit(
        [&](const auto& den) -> double {
            using T = std::decay_t<decltype(den)>;
            if constexpr (std::is_same_v<T, MixtureDensity>)
                return den.w < 1.0 ? den.singular.d : 0.0;
            else if constexpr (std::is_same_v<T, BetaNegAlpha>) {
                double beta_exp = 1.0; // Linear/Affine couplings vanish like (1-phi)^1
                if (const auto* pl = std::get_if<PowerLawCoupling>(&m.coupling))
                    beta_exp = pl->beta;
                return std::min(-den.alpha, beta_exp);
            } else if constexpr (std::is_same_v<T, StretchedBeta>)
                return 1.0 - den.q;
            else
                return den.w > 0.0 ? 1.0 - den.q : 0.0;
        },
        m.density);
}

} // namespace

int default_ma_truncation(const ModelSpec& m) {
    const double d = model_tail_d(m);
    return d > 0.3 ? 100000 : 10000;
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------
namespace {

cdouble pow_c(cdouble base, double e) { return std::pow(base, cdouble(e, 0.0)); }

// analytic tails of the Fourier-moment series
cdouble tail_l1(cdouble z) { return -std::log(1.0 - z) / z; }            // sum z^k/(k+1)
cdouble tail_l1m(cdouble z) { return std::log(1.0 + z) / z; }            // sum (-z)^k/(k+1)
cdouble tail_f2(cdouble z) {                                             // sum z^k/((k+1)(k+2))
    return (z + (1.0 - z) * std::log(1.0 - z)) / (z * z);
}
cdouble tail_f2m(cdouble z) {
    return (-z + (1.0 + z) * std::log(1.0 + z)) / (z * z);
}

struct FourierSeriesEval {
    std::vector<double> res; // residual coefficients after the two-term tail model
    double u = 0, v = 0, u2 = 0, v2 = 0;

    void build(const FourierDensity& f1, int Kp) {
        u = f1.eval(1.0);
        v = f1.eval(-1.0);
        // f1'(x) at the endpoints: sine terms only survive
        double d1 = 0.0;
        for (std::size_t n = 0; n < f1.b.size(); ++n)
            d1 += f1.b[n] * (n + 1) * kPi * ((n + 1) % 2 == 0 ? 1.0 : -1.0);
        u2 = -d1;
        v2 = d1;
        const std::vector<double> e1 = [&] {
            FourierDensity tmp = f1;
            Density dd = MixtureDensity{1.0, tmp, SingularBeta{0.25}};
            return moments_phi(dd, Kp);
        }();
        res.resize(Kp + 1);
        for (int k = 0; k <= Kp; ++k) {
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            res[k] = e1[k] - (u + sgn * v) / (k + 1.0) -
                     (u2 + sgn * v2) / ((k + 1.0) * (k + 2.0));
        }
    }

    cdouble at(cdouble z, int terms = -1) const {
        const int n = terms < 0 ? int(res.size()) : std::min<int>(terms, int(res.size()));
        cdouble acc(0, 0), zp(1, 0);
        for (int k = 0; k < n; ++k) {
            acc += res[k] * zp;
            zp *= z;
        }
        return acc + u * tail_l1(z) + v * tail_l1m(z) + u2 * tail_f2(z) + v2 * tail_f2m(z);
    }
};

cdouble coupling_transform(const Coupling& c, cdouble N, cdouble z) {
    // D(z) = E[g(phi)/(1 - z phi)] expressed through N(z) = E[1/(1-z phi)]
    if (std::holds_alternative<RationalCoupling>(c)) return -(N - 1.0) / z;
    if (const auto* lin = std::get_if<LinearCoupling>(&c))
        return lin->alpha * (N - (N - 1.0) / z);
    if (const auto* af = std::get_if<AffineCoupling>(&c))
        return -af->alpha * (N - 1.0) / z + af->phibar * N;
    throw NumericalError("coupling_transform: power-law coupling needs quadrature");
}

// complex quadrature of E[w(phi)/(1-z phi)] for densities without closed forms
cdouble density_complex_expectation(const Density& den, cdouble z,
                                    const std::function<double(double)>& weight) {
    auto make = [&](bool imag_part) {
        return [&, imag_part](double x) {
            const double fx = density_eval(den, x);
            if (std::isinf(fx)) return 0.0;
            const cdouble val = 1.0 / (1.0 - z * x);
            return weight(x) * fx * (imag_part ? val.imag() : val.real());
        };
    };
    const bool on_unit = std::holds_alternative<BetaNegAlpha>(den);
    const double lo = on_unit ? 0.0 : -1.0;
    double re, im;
    if (on_unit) {
        // both endpoints singular: split at 1/2, mirror the left half so the
        // singular point sits at the right end of each piece
        auto fr = make(false), fi = make(true);
        re = integrate_singular_right(fr, 0.5, 1.0, 1e-12, 1e-9).value +
             integrate_singular_right([&](double x) { return fr(1.0 - x); }, 0.5, 1.0, 1e-12, 1e-9).value;
        im = integrate_singular_right(fi, 0.5, 1.0, 1e-12, 1e-9).value +
             integrate_singular_right([&](double x) { return fi(1.0 - x); }, 0.5, 1.0, 1e-12, 1e-9).value;
    } else {
        re = integrate_singular_right(make(false), lo, 1.0, 1e-12, 1e-9).value;
        im = integrate_singular_right(make(true), lo, 1.0, 1e-12, 1e-9).value;
    }
    return {re, im};
}

} // namespace

Spectrum make_ar1_spectrum(double psibar, double sigma_eps) {
    Spectrum s;
    s.sigma2 = sigma_eps * sigma_eps;
    s.long_memory = false;
    s.d_hint = 0.0;
    const double sig2 = s.sigma2;
    s.at = [psibar, sig2](double lam) {
        const cdouble z = std::polar(1.0, -lam);
        return sig2 / (2.0 * kPi) / std::norm(1.0 - z * psibar);
    };
    auto at = s.at;
    s.grid = [at](int N) {
        std::vector<double> f(N, 0.0);
        for (int k = 1; k < N; ++k) f[k] = at(2.0 * kPi * k / N);
        return f;
    };
    return s;
}

Spectrum make_spectrum(const ModelSpec& m) {
    Spectrum s;
    s.sigma2 = m.sigma_eps * m.sigma_eps;
    s.d_hint = model_tail_d(m);
    s.long_memory = s.d_hint > 0.0;
    const double sig2 = s.sigma2;

    const bool powerlaw = std::holds_alternative<PowerLawCoupling>(m.coupling);

    if (const auto* mx = std::get_if<MixtureDensity>(&m.density); mx && !powerlaw) {
        auto fe = std::make_shared<FourierSeriesEval>();
        fe->build(mx->regular, 32768);
        const double w = mx->w, d = mx->singular.d;
        const Coupling cpl = m.coupling;
        auto Nfun = [fe, w, d](cdouble z, int terms) -> cdouble {
            const cdouble n1 = fe->at(z, terms);
            const cdouble n2 = hyp2f1(1.0, 2.0, 3.0 - d, z);
            return w * n1 + (1.0 - w) * n2;
        };
        s.at = [Nfun, cpl, sig2](double lam) {
            const cdouble z = std::polar(1.0, -lam);
            const cdouble N = Nfun(z, 8192);
            const cdouble D = coupling_transform(cpl, N, z);
            return sig2 / (2.0 * kPi) * std::norm(N / (1.0 - z * D));
        };
        // grid path: residual series via one FFT (fold when Kp >= N)
        auto fe2 = fe;
        const Coupling cpl2 = m.coupling;
        s.grid = [fe2, w, d, cpl2, sig2](int N) {
            std::vector<cdouble> c(N, cdouble(0, 0));
            for (std::size_t k = 0; k < fe2->res.size(); ++k)
                c[k % N] += fe2->res[k];
            fft_pow2(c, false); // partial sums at z = e^{-i 2pi jk/N}
            std::vector<double> f(N, 0.0);
            for (int j = 1; j < N; ++j) {
                const double lam = 2.0 * kPi * j / N;
                const cdouble z = std::polar(1.0, -lam);
                const cdouble n1 = c[j] + fe2->u * tail_l1(z) + fe2->v * tail_l1m(z) +
                                   fe2->u2 * tail_f2(z) + fe2->v2 * tail_f2m(z);
                const cdouble n2 = hyp2f1(1.0, 2.0, 3.0 - d, z);
                const cdouble Nz = w * n1 + (1.0 - w) * n2;
                const cdouble D = coupling_transform(cpl2, Nz, z);
                f[j] = sig2 / (2.0 * kPi) * std::norm(Nz / (1.0 - z * D));
            }
            return f;
        };
        return s;
    }

    if (const auto* ba = std::get_if<BetaNegAlpha>(&m.density); ba && !powerlaw) {
        const double al = ba->alpha;
        const Coupling cpl = m.coupling;
        s.at = [al, cpl, sig2](double lam) {
            const cdouble z = std::polar(1.0, -lam);
            const cdouble N = pow_c(1.0 - z, al);
            const cdouble D = coupling_transform(cpl, N, z);
            return sig2 / (2.0 * kPi) * std::norm(N / (1.0 - z * D));
        };
    } else if (ba && powerlaw) {
        // closed form: N = (1-z)^alpha, D = G(1+a+b)/(G(1+a)G(1+b)) F(1,-a;1+b;z)
        const double al = ba->alpha;
        const double be = std::get<PowerLawCoupling>(m.coupling).beta;
        const double cgam = std::exp(std::lgamma(1.0 + al + be) - std::lgamma(1.0 + al) -
                                     std::lgamma(1.0 + be));
        s.at = [al, be, cgam, sig2](double lam) {
            const cdouble z = std::polar(1.0, -lam);
            const cdouble N = pow_c(1.0 - z, al);
            const cdouble D = cgam * hyp2f1(1.0, -al, 1.0 + be, z);
            return sig2 / (2.0 * kPi) * std::norm(N / (1.0 - z * D));
        };
    } else {
        // quadrature-backed evaluator (stretched Beta, bell mixture,
        // or power-law couplings on the mixture)
        const Density den = m.density;
        const Coupling cpl = m.coupling;
        s.at = [den, cpl, sig2](double lam) {
            const cdouble z = std::polar(1.0, -lam);
            const cdouble N = density_complex_expectation(den, z, [](double) { return 1.0; });
            cdouble D;
            if (std::holds_alternative<PowerLawCoupling>(cpl)) {
                const Coupling c2 = cpl;
                D = density_complex_expectation(
                    den, z, [c2](double x) { return coupling_g(c2, x); });
            } else {
                D = coupling_transform(cpl, N, z);
            }
            return sig2 / (2.0 * kPi) * std::norm(N / (1.0 - z * D));
        };
    }
    auto at = s.at;
    s.grid = [at](int N) {
        std::vector<double> f(N, 0.0);
        for (int k = 1; k < N; ++k) f[k] = at(2.0 * kPi * k / N);
        return f;
    };
    return s;
}

double g_pq(double p, double q, double x) {
    if (x >= 0.0)
        return std::pow(1.0 + x, -q) * hyp2f1(p + q - 1.0, q, p + q, 2.0 / (1.0 + 1.0 / x));
    return std::pow(1.0 - x, -q) * hyp2f1(1.0, q, p + q, 2.0 / (1.0 - 1.0 / x));
}

std::vector<double> spectral_density(const ModelSpec& m,
                                     const std::vector<double>& lambda,
                                     SpectrumMethod method, int K) {
    for (double l : lambda)
        if (l <= 0.0 || l >= 2.0 * kPi)
            throw ConfigError("spectral_density: lambda must lie in (0, 2pi)");
    if (method == SpectrumMethod::BetaSum) {
        if (K < 0) K = default_ma_truncation(m);
        const MACoefficients ma = ma_coefficients(m, K);
        std::vector<double> out(lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            const cdouble z = std::polar(1.0, -lambda[i]);
            cdouble acc(0, 0), zp(1, 0);
            for (int k = 0; k <= ma.K; ++k) {
                acc += ma.beta_tilde[k] * zp;
                zp *= z;
            }
            out[i] = m.sigma_eps * m.sigma_eps / (2.0 * kPi) * std::norm(acc);
        }
        return out;
    }
    const Spectrum s = make_spectrum(m);
    std::vector<double> out(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) out[i] = s.at(lambda[i]);
    return out;
}

// ---------------------------------------------------------------------------
// FFT autocovariance assembly
// ---------------------------------------------------------------------------
namespace {

std::vector<double> assemble_fft(const std::vector<double>& f, int N, int L,
                                 const Spectrum& s, const FftAcfOptions& opts) {
    const double eps = 2.0 * kPi / N;
    const double s1 = 2.0 * std::sin(eps / 2.0), s2 = 2.0 * std::sin(eps);
    if (!(f[1] > 0.0) || !(f[2] > 0.0))
        throw NumericalError("acf_via_fft: spectrum not positive near zero");
    double a2 = std::log(f[2] / f[1]) / std::log(s2 / s1);
    if (a2 <= -0.995)
        throw NumericalError(
            "acf_via_fft: spectral exponent " + std::to_string(a2) +
            " at the origin implies a non-stationary model (needs > -1)");
    const double A = f[1] / std::pow(s1, a2);
    const double a = 0.5 * a2;

    // exact transform of the subtracted A|2 sin(l/2)|^{2a}
    std::vector<double> ch(L + 1);
    sin_power_fourier(a, L, ch.data());

    std::vector<cdouble> r(N);
    r[0] = 0.0;
    for (int k = 1; k < N; ++k) {
        const double lam = eps * k;
        r[k] = f[k] - A * std::pow(std::abs(2.0 * std::sin(lam / 2.0)), a2);
    }
    const double r1 = r[1].real();
    std::vector<cdouble> rf = r;
    fft_pow2(rf, true); // S_h = sum_k r_k e^{+i 2pi k h/N}

    std::vector<double> gam(L + 1);
    double imag_peak = 0.0;
    for (int h = 0; h <= L; ++h) {
        imag_peak = std::max(imag_peak, std::abs(rf[h].imag()));
        gam[h] = 2.0 * kPi * A * ch[h] +
                 (2.0 * kPi / N) * (rf[h].real() - r1 * std::cos(eps * h));
    }

    // first cell [0, eps]: geometric Gauss-Legendre panels on the residual
    static const double gx[12] = {
        -0.981560634246719, -0.904117256370475, -0.769902674194305,
        -0.587317954286617, -0.367831498998180, -0.125233408511469,
        0.125233408511469,  0.367831498998180,  0.587317954286617,
        0.769902674194305,  0.904117256370475,  0.981560634246719};
    static const double gw[12] = {
        0.047175336386512, 0.106939325995318, 0.160078328543346,
        0.203167426723066, 0.233492536538355, 0.249147045813403,
        0.249147045813403, 0.233492536538355, 0.203167426723066,
        0.160078328543346, 0.106939325995318, 0.047175336386512};
    auto resid = [&](double lam) {
        return s.at(lam) - A * std::pow(std::abs(2.0 * std::sin(lam / 2.0)), a2);
    };
    std::vector<double> refine(L + 1, 0.0);
    double lo = eps;
    for (int lev = 0; lev < opts.refine_levels && lo > 1e-14; ++lev) {
        const double hi = lo, lo2 = 0.5 * lo;
        const double mid = 0.5 * (hi + lo2), half = 0.5 * (hi - lo2);
        for (int j = 0; j < 12; ++j) {
            const double lam = mid + half * gx[j];
            // factor 2: the mirror cell at 2pi - lam contributes identically
            const double rv = 2.0 * resid(lam) * half * gw[j];
            for (int h = 0; h <= L; ++h) refine[h] += rv * std::cos(lam * h);
        }
        lo = lo2;
    }

    // cells [eps, J eps]: swap the trapezoid for exact panels; the residual
    // still has steep (log-type) structure next to the origin
    const int J = std::min(8, N / 16);
    for (int c = 1; c < J; ++c) {
        const double l1 = c * eps, l2 = (c + 1) * eps;
        const double mid = 0.5 * (l1 + l2), half = 0.5 * (l2 - l1);
        for (int j = 0; j < 12; ++j) {
            const double lam = mid + half * gx[j];
            const double rv = 2.0 * resid(lam) * half * gw[j];
            for (int h = 0; h <= L; ++h) refine[h] += rv * std::cos(lam * h);
        }
        // remove this cell's trapezoid value (both mirror halves)
        const double rc = r[c].real(), rc1 = r[c + 1].real();
        for (int h = 0; h <= L; ++h)
            refine[h] -= eps * (rc * std::cos(l1 * h) + rc1 * std::cos(l2 * h));
    }
    for (int h = 0; h <= L; ++h) gam[h] += refine[h];

    const double scale = std::abs(gam[0]) + 1e-300;
    if (imag_peak > 1e-9 * scale)
        throw NumericalError("acf_via_fft: imaginary residue above tolerance");

    if (opts.calibrate_wrap) {
        // wrap-around of the residual transform is constant in h for h << N;
        // pin it by direct (non-oscillatory) integration at h = 0
        QuadResult direct = integrate(resid, eps, kPi, 1e-12 * scale, 1e-9);
        const double g0 = 2.0 * kPi * A * ch[0] + refine[0] + 2.0 * direct.value;
        const double c0 = gam[0] - g0;
        for (double& g : gam) g -= c0;
    }
    return gam;
}

} // namespace

ModelACF acf_via_fft(const Spectrum& s, int N, int L, const FftAcfOptions& opts) {
    if (!is_pow2(std::size_t(N))) throw ConfigError("acf_via_fft: N must be a power of two");
    if (N < 4 * L)
        throw ConfigError("acf_via_fft: N must be >= 4L to keep aliasing controlled "
                          "(requested N = " + std::to_string(N) + ", L = " + std::to_string(L) + ")");
    const std::vector<double> f = s.grid(N);
    FftAcfOptions opts_eff = opts;
    if (f[1] > 0.0 && f[2] > 0.0) {
        // wrap-around decays exponentially for short-memory spectra, where
        // calibration and N-extrapolation would only inject noise
        const double eps = 2.0 * kPi / N;
        const double a2 = std::log(f[2] / f[1]) /
                          std::log(2.0 * std::sin(eps) / (2.0 * std::sin(eps / 2.0)));
        if (a2 > -0.05) {
            opts_eff.calibrate_wrap = false;
            opts_eff.richardson = false;
        }
    }
    std::vector<double> gam = assemble_fft(f, N, L, s, opts_eff);
    if (opts_eff.richardson && N >= 8 * L) {
        std::vector<double> fsub(N / 2);
        fsub[0] = 0.0;
        for (int k = 1; k < N / 2; ++k) fsub[k] = f[2 * k];
        const std::vector<double> gh = assemble_fft(fsub, N / 2, L, s, opts_eff);
        for (int h = 0; h <= L; ++h) gam[h] = 2.0 * gam[h] - gh[h];
    }
    ModelACF out;
    out.method = "fft";
    out.gamma = std::move(gam);
    out.rho.resize(L + 1);
    if (out.gamma[0] <= 0.0) throw NumericalError("acf_via_fft: non-positive variance");
    for (int h = 0; h <= L; ++h) out.rho[h] = out.gamma[h] / out.gamma[0];
    return out;
}

ModelACF acf_via_fft(const ModelSpec& m, int N, int L, const FftAcfOptions& opts) {
    return acf_via_fft(make_spectrum(m), N, L, opts);
}

ModelACF acf_via_ma(const MACoefficients& ma, double sigma_eps, int L, TailMode tail,
                    double d_hint) {
    const int K = ma.K;
    if (L > K) throw ConfigError("acf_via_ma: L exceeds truncation K");
    const double sig2 = sigma_eps * sigma_eps;
    ModelACF out;
    out.method = "ma-truncation";
    out.gamma.resize(L + 1);
    for (int h = 0; h <= L; ++h) {
        double sum = 0.0;
        const double* bt = ma.beta_tilde.data();
        for (int k = 0; k + h <= K; ++k) sum += bt[k] * bt[k + h];
        out.gamma[h] = sig2 * sum;
    }

    if (tail == TailMode::Auto && K >= 4096) {
        // complete the truncated tail with the model beta_k ~ C k^{d-1};
        // the exponent comes from the model when known, else from a log fit
        double p = 0.0;
        bool have_p = false;
        if (d_hint > 0.0 && d_hint < 0.5) {
            p = d_hint - 1.0;
            have_p = true;
        } else {
            const TailSlope ts = fit_tail_slope(ma.beta_tilde);
            if (ts.ok && ts.slope > -0.999 && ts.slope < -0.5) {
                p = ts.slope;
                have_p = true;
            }
        }
        if (have_p) {
            // amplitude from the last window; averaging cancels any
            // alternating component
            const int win = std::min(4096, K / 4);
            double acc = 0.0;
            for (int k = K - win + 1; k <= K; ++k)
                acc += ma.beta_tilde[k] * std::pow(double(k), -p);
            const double C = acc / double(win);
            if (C > 0.0) {
                // direct tail block K+1..4K with precomputed powers
                const int M = 4 * K;
                std::vector<double> xp(M + L + 2);
                for (int x = K + 1; x <= M + L + 1; ++x)
                    xp[x - K - 1] = std::pow(double(x), p);
                for (int h = 0; h <= L; ++h) {
                    // cross block: exact beta_k against the model tail
                    double cross = 0.0;
                    for (int k = K - h + 1; k <= K; ++k)
                        cross += ma.beta_tilde[k] * xp[k + h - K - 1] / C;
                    double tsum = cross;
                    for (int k = K + 1; k <= M; ++k)
                        tsum += xp[k - K - 1] * xp[k + h - K - 1];
                    // analytic remainder: Int_{M+1/2}^inf x^{2p} (1+h/x)^p dx
                    // expanded in h/x (h/M <= L/(4K), converges immediately)
                    const double m0 = double(M) + 0.5;
                    double rem = 0.0, binom = 1.0, hpow = 1.0;
                    for (int j = 0; j <= 4; ++j) {
                        rem += binom * hpow * std::pow(m0, 2.0 * p - j + 1.0) /
                               (j - 2.0 * p - 1.0);
                        binom *= (p - j) / double(j + 1);
                        hpow *= double(h);
                    }
                    out.gamma[h] += sig2 * C * C * (tsum + rem);
                }
            }
        }
    }

    out.rho.resize(L + 1);
    if (out.gamma[0] <= 0.0) throw NumericalError("acf_via_ma: non-positive variance");
    for (int h = 0; h <= L; ++h) out.rho[h] = out.gamma[h] / out.gamma[0];
    return out;
}

TailFit tail_exponent(const std::vector<double>& rho, int h_lo, int h_hi) {
    if (h_lo < 1 || h_hi <= h_lo || h_hi >= int(rho.size()))
        throw ConfigError("tail_exponent: bad fit range");
    TailFit out;
    int hi = h_hi;
    while (hi > h_lo && rho[hi] <= 0.0) --hi;
    for (int h = h_lo; h <= hi; ++h)
        if (rho[h] <= 0.0) { hi = h - 1; break; }
    out.trimmed = hi != h_hi;
    if (hi - h_lo < 4)
        throw NumericalError("tail_exponent: fewer than 5 positive lags in range");
    out.used_lo = h_lo;
    out.used_hi = hi;
    std::vector<double> u, y;
    for (int h = h_lo; h <= hi; ++h) {
        u.push_back(std::log(double(h)));
        y.push_back(std::log(rho[h]));
    }
    const double n = double(u.size());
    const double um = std::accumulate(u.begin(), u.end(), 0.0) / n;
    double suu = 0, suy = 0, s2u = 0, s2y = 0, s22 = 0, sy = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double uc = u[i] - um;
        suu += uc * uc;
        suy += uc * y[i];
        s2u += uc * uc * uc;
        s2y += uc * uc * y[i];
        s22 += uc * uc * uc * uc;
        sy += y[i];
    }
    out.slope = suy / suu;
    out.implied_d = 0.5 * (out.slope + 1.0);
    // quadratic coefficient from the centered normal equations
    const double m00 = n, m11 = suu, m22 = s22, m01 = 0, m02 = suu, m12 = s2u;
    const double b0 = sy, b1 = suy, b2 = s2y;
    // solve 3x3 (symmetric) by elimination
    double a[3][4] = {{m00, m01, m02, b0}, {m01, m11, m12, b1}, {m02, m12, m22, b2}};
    for (int i = 0; i < 3; ++i) {
        int p = i;
        for (int r = i + 1; r < 3; ++r)
            if (std::abs(a[r][i]) > std::abs(a[p][i])) p = r;
        std::swap(a[i], a[p]);
        for (int r = i + 1; r < 3; ++r) {
            const double fctr = a[r][i] / a[i][i];
            for (int cc = i; cc < 4; ++cc) a[r][cc] -= fctr * a[i][cc];
        }
    }
    double sol[3];
    for (int i = 2; i >= 0; --i) {
        double acc = a[i][3];
        for (int cc = i + 1; cc < 3; ++cc) acc -= a[i][cc] * sol[cc];
        sol[i] = acc / a[i][i];
    }
    out.curvature = sol[2];
    out.power_law = std::abs(out.curvature) <= 0.5;
    return out;
}

// ---------------------------------------------------------------------------
// simulation
// ---------------------------------------------------------------------------

LogVolSeries simulate_ma(const std::vector<double>& beta_tilde, double sigma_eps,
                         double mean_omega, int T, std::uint64_t seed, int burn_in) {
    if (T < 1) throw ConfigError("simulate_ma: T must be >= 1");
    const int K = int(beta_tilde.size()) - 1;
    LogVolSeries out;
    out.omega.resize(T);
    if (sigma_eps == 0.0) {
        std::fill(out.omega.begin(), out.omega.end(), mean_omega);
        out.mean_omega = mean_omega;
        return out;
    }
    Rng64 rng(seed, 0);
    const int burn = std::max(0, burn_in);
    const std::size_t n_inn = std::size_t(K) + burn + T;
    std::vector<double> eps(n_inn);
    for (double& e : eps) e = sigma_eps * rng.normal();
    const std::vector<double> conv = fft_convolve(beta_tilde, eps);
    for (int t = 0; t < T; ++t) out.omega[t] = mean_omega + conv[K + burn + t];
    out.mean_omega = mean_of(out.omega);
    return out;
}

LogVolSeries simulate_aggregate(const ModelSpec& m, int T, std::uint64_t seed,
                                const AggregateOptions& opts) {
    if (T < 1) throw ConfigError("simulate_aggregate: T must be >= 1");
    const int K = opts.K > 0 ? opts.K : default_ma_truncation(m);
    const MACoefficients ma = ma_coefficients(m, K);
    if (!ma.summable)
        throw NumericalError("simulate_aggregate: non-stationary model (MA tail not square-summable)");
    return simulate_ma(ma.beta_tilde, m.sigma_eps, m.mean_omega, T, seed, opts.burn_in);
}

double panel_spectral_radius(const std::vector<double>& phi,
                             const std::vector<double>& psi) {
    const std::size_t n = phi.size();
    Rng64 rng(0x5eed);
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform() - 0.5;
    double lognorm_acc = 0.0;
    int count = 0;
    const int warm = 300, meas = 200;
    for (int it = 0; it < warm + meas; ++it) {
        double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = phi[i] * x[i] + psi[i] * mean;
            nrm += x[i] * x[i];
        }
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) return 0.0;
        for (double& v : x) v /= nrm;
        if (it >= warm) {
            lognorm_acc += std::log(nrm);
            ++count;
        }
    }
    return std::exp(lognorm_acc / count);
}

AgentPanel draw_panel(const ModelSpec& m, std::size_t n, double sigma_eta,
                      std::uint64_t seed) {
    if (n < 1) throw ConfigError("draw_panel: n must be >= 1");
    AgentPanel p;
    p.eta_scale = sigma_eta;
    const int max_redraws = 100;
    for (int attempt = 0;; ++attempt) {
        const PhiPsiSample s =
            sample_phi_psi(m.density, m.coupling, n, seed + 0x9e37 * attempt);
        p.phi = s.phi;
        p.psi = s.psi;
        p.redraws = attempt;
        p.spectral_radius = panel_spectral_radius(p.phi, p.psi);
        if (p.spectral_radius < 1.0) break;
        if (n >= 500) {
            const double sc = 0.99 / p.spectral_radius;
            for (double& v : p.psi) v *= sc;
            p.rescaled = true;
            p.spectral_radius = panel_spectral_radius(p.phi, p.psi);
            break;
        }
        if (attempt + 1 >= max_redraws)
            throw NumericalError("draw_panel: spectral radius >= 1 after " +
                                 std::to_string(max_redraws) + " redraws");
    }
    p.c.assign(n, 1.0); // E[c] = 1, zero-variance representative
    return p;
}

LogVolSeries simulate_panel_path(const AgentPanel& p, double sigma_eps,
                                 double mean_omega, int T, int burn_in,
                                 std::uint64_t seed) {
    if (T < 1) throw ConfigError("simulate_panel: T must be >= 1");
    const std::size_t n = p.phi.size();
    Rng64 news(seed, 1);
    std::vector<Rng64> agent_noise;
    if (p.eta_scale > 0.0) {
        agent_noise.reserve(n);
        for (std::size_t i = 0; i < n; ++i) agent_noise.emplace_back(seed, 0x100000 + i);
    }
    std::vector<double> x(n, 0.0);
    double xbar = 0.0;
    LogVolSeries out;
    out.omega.resize(T);
    for (int t = 0; t < burn_in + T; ++t) {
        const double e = sigma_eps * news.normal();
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double xi = p.phi[i] * x[i] + p.psi[i] * xbar + p.c[i] * e;
            if (p.eta_scale > 0.0) xi += p.eta_scale * agent_noise[i].normal();
            x[i] = xi;
            acc += xi;
        }
        xbar = acc / double(n);
        if (t >= burn_in) out.omega[t - burn_in] = mean_omega + xbar;
    }
    out.mean_omega = mean_of(out.omega);
    return out;
}

PanelResult simulate_panel(const ModelSpec& m, std::size_t n, int T, int burn_in,
                           std::uint64_t seed, double sigma_eta) {
    PanelResult out;
    out.panel = draw_panel(m, n, sigma_eta, seed);
    out.series = simulate_panel_path(out.panel, m.sigma_eps, m.mean_omega, T,
                                     burn_in, seed);
    return out;
}

double prop1_factorization_error(const ModelSpec& m, int K, int n_lambda) {
    const MomentTable t = moment_table(m.density, m.coupling, K);
    const MACoefficients ma = ma_coefficients_from_moments(
        t.mphi, t.mpsiphi, K, std::holds_alternative<RationalCoupling>(m.coupling));
    double worst = 0.0;
    // evaluate just inside the unit circle so the shared truncation tails
    // are suppressed by 0.99^K and the factorization itself is what is tested
    for (int i = 0; i < n_lambda; ++i) {
        const double lam = 0.3 + (kPi - 0.3) * double(i) / double(n_lambda - 1);
        const cdouble z = 0.99 * std::polar(1.0, -lam);
        cdouble sphi(0, 0), spsi(0, 0), B(0, 0), zp(1, 0);
        for (int k = 0; k <= K; ++k) {
            sphi += t.mphi[k] * zp;
            spsi += t.mpsiphi[k] * zp;
            B += ma.beta_tilde[k] * zp;
            zp *= z;
        }
        const cdouble lhs = (1.0 - z * spsi) * B;
        worst = std::max(worst, std::abs(lhs - sphi) / std::abs(sphi));
    }
    return worst;
}

} // namespace hetvol
