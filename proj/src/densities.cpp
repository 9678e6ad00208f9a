#include "hetvol/densities.hpp"

#include "hetvol/errors.hpp"
#include "hetvol/quadrature.hpp"
#include "hetvol/rng.hpp"
#include "hetvol/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hetvol {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

double FourierDensity::eval(double x) const {
    double v = 0.5;
    for (std::size_t n = 0; n < a.size(); ++n) v += a[n] * std::cos((n + 1) * kPi * x);
    for (std::size_t n = 0; n < b.size(); ++n) v += b[n] * std::sin((n + 1) * kPi * x);
    return v;
}

double SingularBeta::eval(double x) const {
    if (x < 0.0 || x > 1.0) return 0.0;
    if (x == 1.0) return d > 0.0 ? kInf : (1.0 - d) * (2.0 - d);
    return (1.0 - d) * (2.0 - d) * x * std::pow(1.0 - x, -d);
}

double bell_normalizer(double m, double sigma) {
    // substitute x = m + sigma*sqrt(2)*u:
    //   K = s*sqrt(2) Int_{u-}^{u+} (1 - m^2 - 2 sqrt2 m s u - 2 s^2 u^2) e^{-u^2} du
    const double s = sigma;
    const double ua = (-1.0 - m) / (s * std::numbers::sqrt2);
    const double ub = (1.0 - m) / (s * std::numbers::sqrt2);
    const double e_a = std::exp(-ua * ua), e_b = std::exp(-ub * ub);
    const double I0 = 0.5 * std::sqrt(kPi) * (std::erf(ub) - std::erf(ua));
    const double I1 = -0.5 * (e_b - e_a);
    const double I2 = -0.5 * (ub * e_b - ua * e_a) + 0.5 * I0;
    return s * std::numbers::sqrt2 *
           ((1.0 - m * m) * I0 - 2.0 * std::numbers::sqrt2 * m * s * I1 -
            2.0 * s * s * I2);
}

namespace {

double stretched_beta_density(double p, double q, double x) {
    if (x <= -1.0 || x >= 1.0) {
        if (x == 1.0 && q < 1.0) return kInf;
        if (x == 1.0 && q == 1.0) return std::pow(2.0, p - 1) / (std::pow(2.0, p + q - 1) * beta_fn(p, q));
        return 0.0;
    }
    const double lognorm = (p + q - 1) * std::log(2.0) +
                           std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
    return std::exp((p - 1) * std::log1p(x) + (q - 1) * std::log1p(-x) - lognorm);
}

double bell_density_part(double m, double sigma, double x) {
    if (x < -1.0 || x > 1.0) return 0.0;
    const double z = (x - m) / sigma;
    return (1.0 - x * x) * std::exp(-0.5 * z * z) / bell_normalizer(m, sigma);
}

} // namespace

double density_eval(const Density& f, double x) {
    if (x < -1.0 || x > 1.0)
        throw ConfigError("density_eval: x outside [-1,1]");
    return std::visit(
        [x](const auto& den) -> double {
            using T = std::decay_t<decltype(den)>;
            if constexpr (std::is_same_v<T, MixtureDensity>) {
                const double f1 = den.regular.eval(x);
                const double f2 = den.singular.eval(x);
                if (std::isinf(f2) && den.w < 1.0) return kInf;
                return den.w * f1 + (1.0 - den.w) * f2;
            } else if constexpr (std::is_same_v<T, BetaNegAlpha>) {
                const double al = den.alpha;
                if (x < 0.0) return 0.0;
                if (x == 0.0 || x == 1.0) return kInf;
                return std::pow(x, -al - 1.0) * std::pow(1.0 - x, al) /
                       beta_fn(-al, 1.0 + al);
            } else if constexpr (std::is_same_v<T, StretchedBeta>) {
                return stretched_beta_density(den.p, den.q, x);
            } else {
                const double sb = stretched_beta_density(den.p, den.q, x);
                if (std::isinf(sb)) return den.w > 0.0 ? kInf : 0.0;
                return den.w * sb + (1.0 - den.w) * bell_density_part(den.m, den.sigma, x);
            }
        },
        f);
}

double coupling_g(const Coupling& c, double phi) {
    return std::visit(
        [phi](const auto& cp) -> double {
            using T = std::decay_t<decltype(cp)>;
            if constexpr (std::is_same_v<T, RationalCoupling>) return -phi;
            else if constexpr (std::is_same_v<T, LinearCoupling>) return cp.alpha * (1.0 - phi);
            else if constexpr (std::is_same_v<T, AffineCoupling>) return -cp.alpha * phi + cp.phibar;
            else return std::pow(1.0 - phi, cp.beta);
        },
        c);
}

// ---------------------------------------------------------------------------
// moment machinery
// ---------------------------------------------------------------------------
namespace {

inline double back_cos(double Bk, int k, double w2, double sgn) {
    const double t = (k % 2 == 0) ? sgn * 2.0 * k / w2 : 0.0;
    return (t - Bk) * w2 / (double(k) * (k - 1));
}

std::vector<double> cos_moments_impl(int n, int K) {
    std::vector<double> B(std::max(K + 1, 2), 0.0);
    const double w2 = (n * kPi) * (n * kPi);
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    int ksw = std::min(K, int(n * kPi));
    if (ksw % 2 != 0) --ksw; // even entries only
    for (int k = 2; k <= ksw; k += 2)
        B[k] = sgn * 2.0 * k / w2 - double(k) * (k - 1) / w2 * B[k - 2];
    if (K > ksw) {
        int kstar = std::max(2 * K + 2, 4 * (int(n * kPi) + 1) + 16);
        if (kstar % 2 != 0) ++kstar;
        double val = sgn * 2.0 / (kstar + 1.0);
        for (int k = kstar; k - 2 > ksw; k -= 2) {
            val = back_cos(val, k, w2, sgn); // val becomes B_{k-2}
            if (k - 2 <= K) B[k - 2] = val;
        }
    }
    B.resize(K + 1);
    return B;
}

inline double back_sin(double Ck, int k, double w2, double npi, double sgn_sin) {
    const double t = (k % 2 == 1) ? sgn_sin * 2.0 / npi : 0.0;
    return (t - Ck) * w2 / (double(k) * (k - 1));
}

// C_{n,k} = Int_{-1}^1 x^k sin(n pi x) dx; odd k only.
// C_{n,1} = (-1)^{n-1} 2/(n pi); asymptotic C_k ~ (-1)^{n+1} 2 n pi / k^2.
std::vector<double> sin_moments_impl(int n, int K) {
    std::vector<double> C(std::max(K + 1, 2), 0.0);
    const double npi = n * kPi;
    const double w2 = npi * npi;
    const double sgn = (n % 2 == 1) ? 1.0 : -1.0; // (-1)^{n-1}
    if (K >= 1) C[1] = sgn * 2.0 / npi;
    int ksw = std::min(K, int(npi));
    if (ksw % 2 == 0) --ksw;
    for (int k = 3; k <= ksw; k += 2)
        C[k] = sgn * 2.0 / npi - double(k) * (k - 1) / w2 * C[k - 2];
    if (K > ksw) {
        int kstar = std::max(2 * K + 3, 4 * (int(npi) + 1) + 17);
        if (kstar % 2 == 0) ++kstar;
        double val = sgn * 2.0 * npi / (double(kstar) * kstar); // ~ (-1)^{n+1} 2 n pi/k^2
        // note: (-1)^{n+1} == (-1)^{n-1}
        for (int k = kstar; k - 2 > ksw; k -= 2) {
            val = back_sin(val, k, w2, npi, sgn);
            if (k - 2 <= K && k - 2 >= 1) C[k - 2] = val;
        }
    }
    C.resize(K + 1);
    return C;
}

std::vector<double> fourier_moments(const FourierDensity& f1, int K) {
    std::vector<double> m(K + 1, 0.0);
    for (int k = 0; k <= K; k += 2) m[k] = 1.0 / (k + 1.0); // (1/2) A_k
    for (std::size_t n = 0; n < f1.a.size(); ++n) {
        if (f1.a[n] == 0.0) continue;
        const std::vector<double> B = cos_moments_impl(int(n) + 1, K);
        for (int k = 0; k <= K; ++k) m[k] += f1.a[n] * B[k];
    }
    for (std::size_t n = 0; n < f1.b.size(); ++n) {
        if (f1.b[n] == 0.0) continue;
        const std::vector<double> C = sin_moments_impl(int(n) + 1, K);
        for (int k = 0; k <= K; ++k) m[k] += f1.b[n] * C[k];
    }
    return m;
}

// E2[phi^k] = Gamma(k+2) Gamma(3-d) / Gamma(k+3-d), ratio (k+1)/(k+2-d)
std::vector<double> singular_beta_moments(double d, int K) {
    std::vector<double> m(K + 1);
    m[0] = 1.0;
    for (int k = 1; k <= K; ++k) m[k] = m[k - 1] * (k + 1.0) / (k + 2.0 - d);
    return m;
}

std::vector<double> beta_neg_alpha_moments(double alpha, int K) {
    // E[phi^k] ratio (k-1-alpha)/k, E[phi^0] = 1
    std::vector<double> m(K + 1);
    m[0] = 1.0;
    for (int k = 1; k <= K; ++k) m[k] = m[k - 1] * (k - 1.0 - alpha) / k;
    return m;
}

std::vector<double> stretched_beta_moments(double p, double q, int K) {
    // M_{k+1} = ((p-q) M_k + k M_{k-1}) / (p+q+k)
    std::vector<double> m(K + 1);
    m[0] = 1.0;
    if (K >= 1) m[1] = (p - q) / (p + q);
    for (int k = 1; k < K; ++k)
        m[k + 1] = ((p - q) * m[k] + k * m[k - 1]) / (p + q + k);
    return m;
}

// G_k = Int_{-1}^1 x^k exp(-(x-m)^2/(2 s^2)) dx.
// Forward G_{k+1} = m G_k + s^2 (k G_{k-1} - b_k) is stable for k < 1/s^2,
// backward above; seeded with the two-term endpoint asymptotics.
std::vector<double> bell_gauss_integrals(double m, double s, int K) {
    std::vector<double> G(K + 1, 0.0);
    const double s2 = s * s;
    const double e_p = std::exp(-0.5 * (1.0 - m) * (1.0 - m) / s2);
    const double e_m = std::exp(-0.5 * (1.0 + m) * (1.0 + m) / s2);
    auto bk = [&](int k) { return e_p - ((k % 2 == 0) ? e_m : -e_m); };
    const double ua = (-1.0 - m) / (s * std::numbers::sqrt2);
    const double ub = (1.0 - m) / (s * std::numbers::sqrt2);
    G[0] = s * std::sqrt(kPi / 2.0) * (std::erf(ub) - std::erf(ua));
    if (K >= 1) G[1] = m * G[0] - s2 * bk(0);
    const int ksw = std::min(K, int(1.0 / s2));
    for (int k = 1; k + 1 <= ksw; ++k)
        G[k + 1] = m * G[k] + s2 * (k * G[k - 1] - bk(k));
    if (K > ksw) {
        const int kstar = std::max(2 * K + 4, 4 * int(1.0 / s2) + 32);
        // two-term endpoint asymptotics for the seed
        auto asym = [&](int k) {
            const double dp = 1.0 - (1.0 - m) / s2; // h'(1)/h(1) + 1 combined below
            const double dm = 1.0 + (1.0 + m) / s2;
            const double right = e_p / k * (1.0 - dp / k);
            const double left = ((k % 2 == 0) ? 1.0 : -1.0) * e_m / k * (1.0 - dm / k);
            return right + left;
        };
        double gk1 = asym(kstar + 1), gk = asym(kstar);
        for (int k = kstar; k - 1 > ksw; --k) {
            // G_{k-1} = (G_{k+1} - m G_k + s^2 b_k)/(s^2 k)
            const double gkm1 = (gk1 - m * gk + s2 * bk(k)) / (s2 * k);
            gk1 = gk;
            gk = gkm1;
            if (k - 1 <= K) G[k - 1] = gkm1;
        }
    }
    return G;
}

std::vector<double> bell_mixture_moments(const BellMixture& bm, int K) {
    std::vector<double> msb = stretched_beta_moments(bm.p, bm.q, K);
    std::vector<double> G = bell_gauss_integrals(bm.m, bm.sigma, K + 2);
    const double norm = G[0] - G[2];
    std::vector<double> m(K + 1);
    for (int k = 0; k <= K; ++k)
        m[k] = bm.w * msb[k] + (1.0 - bm.w) * (G[k] - G[k + 2]) / norm;
    return m;
}

} // namespace

std::vector<double> moments_phi(const Density& f, int K) {
    if (K < 0) throw ConfigError("moments_phi: K must be >= 0");
    return std::visit(
        [K](const auto& den) -> std::vector<double> {
            using T = std::decay_t<decltype(den)>;
            if constexpr (std::is_same_v<T, MixtureDensity>) {
                std::vector<double> m1 = fourier_moments(den.regular, K);
                std::vector<double> m2 = singular_beta_moments(den.singular.d, K);
                std::vector<double> m(K + 1);
                for (int k = 0; k <= K; ++k)
                    m[k] = den.w * m1[k] + (1.0 - den.w) * m2[k];
                return m;
            } else if constexpr (std::is_same_v<T, BetaNegAlpha>) {
                return beta_neg_alpha_moments(den.alpha, K);
            } else if constexpr (std::is_same_v<T, StretchedBeta>) {
                return stretched_beta_moments(den.p, den.q, K);
            } else {
                return bell_mixture_moments(den, K);
            }
        },
        f);
}

double moment_phi(const Density& f, int k) { return moments_phi(f, k)[k]; }

namespace {

// quadrature fallback for E[g(phi) phi^k] on densities without closed forms
double psi_phi_quadrature(const Density& f, const Coupling& c, int k) {
    auto integrand = [&](double x) {
        const double fx = density_eval(f, x);
        return std::isinf(fx) ? 0.0 : coupling_g(c, x) * std::pow(x, k) * fx;
    };
    const bool on_unit = std::holds_alternative<BetaNegAlpha>(f);
    const double lo = on_unit ? 0.0 : -1.0;
    QuadResult r = integrate_singular_right(integrand, lo, 1.0, 1e-13, 1e-11);
    return r.value;
}

} // namespace

std::vector<double> moments_psi_phi(const Density& f, const Coupling& c, int K) {
    if (K < 0) throw ConfigError("moments_psi_phi: K must be >= 0");
    if (std::holds_alternative<PowerLawCoupling>(c)) {
        const double beta = std::get<PowerLawCoupling>(c).beta;
        if (const auto* bna = std::get_if<BetaNegAlpha>(&f)) {
            // E[(1-phi)^beta phi^k], ratio (k-1-alpha)/(k+beta)
            std::vector<double> m(K + 1);
            const double al = bna->alpha;
            m[0] = std::exp(std::lgamma(1.0 + al + beta) - std::lgamma(1.0 + al) -
                            std::lgamma(1.0 + beta));
            for (int k = 1; k <= K; ++k)
                m[k] = m[k - 1] * (k - 1.0 - al) / (k + beta);
            return m;
        }
        std::vector<double> m(K + 1);
        for (int k = 0; k <= K; ++k) m[k] = psi_phi_quadrature(f, c, k);
        return m;
    }
    std::vector<double> mp = moments_phi(f, K + 1);
    std::vector<double> m(K + 1);
    if (std::holds_alternative<RationalCoupling>(c)) {
        for (int k = 0; k <= K; ++k) m[k] = -mp[k + 1];
    } else if (const auto* lin = std::get_if<LinearCoupling>(&c)) {
        for (int k = 0; k <= K; ++k) m[k] = lin->alpha * (mp[k] - mp[k + 1]);
    } else {
        const auto& af = std::get<AffineCoupling>(c);
        for (int k = 0; k <= K; ++k) m[k] = -af.alpha * mp[k + 1] + af.phibar * mp[k];
    }
    return m;
}

double moment_psi_phi(const Density& f, const Coupling& c, int k) {
    return moments_psi_phi(f, c, k)[k];
}

MomentTable moment_table(const Density& f, const Coupling& c, int K) {
    MomentTable t;
    t.mphi = moments_phi(f, K + 1);
    t.mpsiphi = moments_psi_phi(f, c, K);
    return t;
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

bool ValidationReport::all_pass() const {
    for (const auto& it : items)
        if (!it.pass) return false;
    return true;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& it : items)
        os << (it.pass ? "[ok]   " : "[FAIL] ") << it.name
           << (it.detail.empty() ? "" : ": " + it.detail) << "\n";
    return os.str();
}

namespace {

double density_integral(const Density& f) {
    auto integrand = [&](double x) {
        const double v = density_eval(f, x);
        return std::isinf(v) ? 0.0 : v;
    };
    const bool on_unit = std::holds_alternative<BetaNegAlpha>(f);
    if (on_unit) {
        // singular at both endpoints: split at 1/2
        auto flipped = [&](double x) { return integrand(1.0 - x); };
        QuadResult left = integrate_singular_right(flipped, 0.5, 1.0, 1e-12, 1e-10);
        QuadResult right = integrate_singular_right(integrand, 0.5, 1.0, 1e-12, 1e-10);
        return left.value + right.value;
    }
    QuadResult r = integrate_singular_right(integrand, -1.0, 1.0, 1e-12, 1e-10);
    return r.value;
}

} // namespace

ValidationReport validate_density(const Density& f, const Coupling& c) {
    ValidationReport rep;
    auto add = [&](const std::string& name, bool pass, const std::string& det = "") {
        rep.items.push_back({name, pass, det});
        return pass;
    };

    // parameter-domain checks per family
    bool params_ok = true;
    if (const auto* mx = std::get_if<MixtureDensity>(&f)) {
        params_ok &= add("weight in [0,1]", mx->w >= 0.0 && mx->w <= 1.0);
        if (mx->w < 1.0)
            params_ok &= add("singular exponent 0 < d < 1",
                             mx->singular.d > 0.0 && mx->singular.d < 1.0);
        // f1 >= 0 on a 2001-point grid
        double fmin = kInf;
        for (int i = 0; i <= 2000; ++i) {
            const double x = -1.0 + 2.0 * i / 2000.0;
            fmin = std::min(fmin, mx->regular.eval(x));
        }
        params_ok &= add("regular part nonnegative on grid", fmin >= -1e-12,
                         "min f1 = " + std::to_string(fmin));
        const bool stat = mx->w >= 1.0 || mx->singular.d < 0.5;
        rep.stationary = stat;
        add("second-order stationarity (d < 1/2)", stat);
    } else if (const auto* ba = std::get_if<BetaNegAlpha>(&f)) {
        params_ok &= add("alpha in (-1/2, 0)", ba->alpha > -0.5 && ba->alpha < 0.0);
        rep.stationary = ba->alpha > -0.5;
        add("second-order stationarity (alpha > -1/2)", rep.stationary);
    } else if (const auto* sb = std::get_if<StretchedBeta>(&f)) {
        params_ok &= add("p > 1", sb->p > 1.0, "p = " + std::to_string(sb->p));
        params_ok &= add("0 < q < 1", sb->q > 0.0 && sb->q < 1.0);
        rep.stationary = sb->q > 0.5;
        add("second-order stationarity (q > 1/2)", rep.stationary);
    } else if (const auto* bm = std::get_if<BellMixture>(&f)) {
        params_ok &= add("p > 1", bm->p > 1.0);
        params_ok &= add("0 < q < 1", bm->q > 0.0 && bm->q < 1.0);
        params_ok &= add("weight in [0,1]", bm->w >= 0.0 && bm->w <= 1.0);
        params_ok &= add("sigma > 0", bm->sigma > 0.0);
        params_ok &= add("|m| < 1", std::abs(bm->m) < 1.0);
        rep.stationary = bm->q > 0.5;
        add("second-order stationarity (q > 1/2)", rep.stationary);
    }

    if (params_ok) {
        const double mass = density_integral(f);
        add("density integrates to 1", std::abs(mass - 1.0) <= 1e-8,
            "integral = " + std::to_string(mass));
        rep.density_valid = rep.items.back().pass;
    } else {
        rep.density_valid = false;
    }

    // coupling-dependent checks
    const bool dens_diverges = std::visit(
        [](const auto& den) -> bool {
            using T = std::decay_t<decltype(den)>;
            if constexpr (std::is_same_v<T, MixtureDensity>)
                return den.w < 1.0 && den.singular.d > 0.0;
            else if constexpr (std::is_same_v<T, BetaNegAlpha>) return den.alpha < 0.0;
            else if constexpr (std::is_same_v<T, StretchedBeta>) return den.q < 1.0;
            else return den.w > 0.0 && den.q < 1.0;
        },
        f);

    bool coupling_keeps_memory = false;
    if (std::holds_alternative<RationalCoupling>(c)) {
        add("rational coupling: aggregate is white noise", true);
    } else if (std::holds_alternative<LinearCoupling>(c)) {
        coupling_keeps_memory = true;
        add("linear coupling g = alpha(1-phi): long-memory form", true);
    } else if (const auto* af = std::get_if<AffineCoupling>(&c)) {
        coupling_keeps_memory = std::abs(af->phibar - af->alpha) < 1e-12;
        add("long-memory condition phibar == alpha", coupling_keeps_memory,
            "phibar - alpha = " + std::to_string(af->phibar - af->alpha));
        // Case-4 boundedness window for the stretched-Beta families
        const StretchedBeta* sb = std::get_if<StretchedBeta>(&f);
        const BellMixture* bm = std::get_if<BellMixture>(&f);
        if (sb || bm) {
            const double p = sb ? sb->p : bm->p;
            const double q = sb ? sb->q : bm->q;
            const bool window = (1.0 - p) / q < af->alpha && af->alpha < 1.0;
            add("boundedness window (1-p)/q < alpha < 1", window);
        }
    } else {
        coupling_keeps_memory = true;
        add("power-law coupling", true);
    }

    rep.long_memory = rep.stationary && dens_diverges && coupling_keeps_memory;
    add(std::string("long memory: ") + (rep.long_memory ? "yes" : "no"), true);
    return rep;
}

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

double TabulatedCdf::inverse(double u) const {
    if (u <= 0.0) return x.front();
    if (u >= 1.0) return x.back();
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = std::size_t(it - cdf.begin());
    if (i == 0) return x.front();
    const double f0 = cdf[i - 1], f1 = cdf[i];
    if (f1 <= f0) return x[i];
    const double t = (u - f0) / (f1 - f0);
    return x[i - 1] + t * (x[i] - x[i - 1]);
}

TabulatedCdf tabulate_cdf(const Density& f, int grid_points) {
    const bool on_unit = std::holds_alternative<BetaNegAlpha>(f);
    const double lo = on_unit ? 0.0 : -1.0;
    const bool sing_left = on_unit; // BetaNegAlpha diverges at 0 as well
    const int refine = 512;
    std::vector<double> knots;
    knots.reserve(grid_points);
    const int base = grid_points - refine - (sing_left ? refine : 0);
    const double span = 1.0 - lo;
    const double edge = span / 32.0;
    const double inner_lo = lo + (sing_left ? edge : 0.0);
    const double inner_hi = 1.0 - edge;
    if (sing_left) {
        // geometric spacing into the left endpoint
        for (int i = refine; i >= 1; --i)
            knots.push_back(lo + edge * std::pow(2.0, -double(i) * 30.0 / refine));
    } else {
        knots.push_back(lo);
    }
    for (int i = 0; i < base; ++i)
        knots.push_back(inner_lo + (inner_hi - inner_lo) * double(i) / double(base - 1));
    for (int i = 1; i <= refine; ++i)
        knots.push_back(1.0 - edge * std::pow(2.0, -double(i) * 30.0 / refine));
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    // 7-point Gauss-Legendre per panel
    static const double gx[7] = {-0.949107912342759, -0.741531185599394,
                                 -0.405845151377397, 0.0,
                                 0.405845151377397,  0.741531185599394,
                                 0.949107912342759};
    static const double gw[7] = {0.129484966168870, 0.279705391489277,
                                 0.381830050505119, 0.417959183673469,
                                 0.381830050505119, 0.279705391489277,
                                 0.129484966168870};
    TabulatedCdf tab;
    tab.x = knots;
    tab.cdf.assign(knots.size(), 0.0);
    double acc = 0.0;
    // left sliver for the left-singular case: local power-law closure
    if (sing_left) {
        // f ~ c (x-lo)^{-p} near the endpoint: measure p from two points
        const double x1 = knots[0];
        const double f1 = density_eval(f, x1);
        const double fa = density_eval(f, lo + 0.5 * (x1 - lo));
        if (f1 > 0.0 && fa > 0.0) {
            const double p = std::log(fa / f1) / std::log(2.0);
            if (p < 1.0) acc = f1 * (x1 - lo) / (1.0 - p);
        }
    }
    tab.cdf[0] = acc;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double a = knots[i - 1], b = knots[i];
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (int j = 0; j < 7; ++j) {
            const double v = density_eval(f, c + h * gx[j]);
            s += gw[j] * (std::isinf(v) ? 0.0 : v);
        }
        acc += s * h;
        tab.cdf[i] = acc;
    }
    // right sliver closure (all families may diverge at 1)
    {
        const double x1 = knots[knots.size() - 1];
        const double wsl = 1.0 - x1;
        if (wsl > 0.0) {
            const double f1 = density_eval(f, x1);
            const double fa = density_eval(f, 1.0 - 0.5 * wsl);
            if (f1 > 0.0 && fa > 0.0) {
                const double p = std::log(fa / f1) / std::log(2.0);
                if (p < 1.0) acc += f1 * std::pow(wsl, p) * std::pow(wsl, 1.0 - p) / (1.0 - p);
            }
            tab.x.push_back(1.0);
            tab.cdf.push_back(acc);
        }
    }
    // normalize
    const double total = tab.cdf.back();
    if (total <= 0.0) throw NumericalError("tabulate_cdf: non-positive total mass");
    for (double& v : tab.cdf) v /= total;
    return tab;
}

PhiPsiSample sample_phi_psi(const Density& f, const Coupling& c,
                            std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("sample_phi_psi: n must be >= 1");
    const TabulatedCdf tab = tabulate_cdf(f);
    Rng64 rng(seed);
    PhiPsiSample out;
    out.phi.resize(n);
    out.psi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        const double phi = tab.inverse(u);
        out.phi[i] = phi;
        out.psi[i] = coupling_g(c, phi);
    }
    return out;
}

} // namespace hetvol
