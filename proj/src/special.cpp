#include "hetvol/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hetvol {

double log_gamma(double x) { return std::lgamma(x); }

double beta_fn(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

namespace {

bool near_nonpositive_int(double x, double tol = 1e-9) {
    if (x > 0.5) return false;
    return std::abs(x - std::round(x)) < tol;
}

bool near_int(double x, double tol = 1e-9) {
    return std::abs(x - std::round(x)) < tol;
}

// Gamma(x) for real x, handling negative non-integer arguments via reflection.
double gamma_real(double x) {
    if (x > 0.0) return std::tgamma(x);
    return std::tgamma(x); // std::tgamma handles negative non-integers
}

cdouble gauss_series(double a, double b, double c, cdouble z, int max_terms = 2000000) {
    cdouble term(1.0, 0.0), sum(1.0, 0.0);
    for (int n = 0; n < max_terms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum) && n > 3) return sum;
    }
    throw std::domain_error("hyp2f1: series did not converge");
}

// terminating series when a or b is a non-positive integer
cdouble poly_series(double a, double b, double c, cdouble z) {
    const int nmax = int(-std::round(a < b ? a : b));
    cdouble term(1.0, 0.0), sum(1.0, 0.0);
    for (int n = 0; n < nmax; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
    }
    return sum;
}

// Gauss continued fraction for F(1,B;C;z), valid off the cut [1, inf).
// Uses F(A, b+1; c+1; z)/F(A, b; c; z) with b = 0, c = C-1, A = B, so the
// denominator is 1 and the ratio is the target function:
//   F(1,B;C;z) = 1/(1 + u1 z/(1 + u2 z/(1 + ...)))
//   u_{2n+1} = -(A+n)(c-b+n)/((c+2n)(c+2n+1))
//   u_{2n}   = -(b+n)(c-A+n)/((c+2n-1)(c+2n))
cdouble gauss_cf(double B, double C, cdouble z, int max_iter = 400000) {
    const double A = B, bcf = 0.0, ccf = C - 1.0;
    auto coeff = [&](int j) -> double {
        if (j % 2 == 1) {
            const int n = (j - 1) / 2;
            return -(A + n) * (ccf - bcf + n) / ((ccf + 2 * n) * (ccf + 2 * n + 1));
        }
        const int n = j / 2;
        return -(bcf + n) * (ccf - A + n) / ((ccf + 2 * n - 1) * (ccf + 2 * n));
    };
    // modified Lentz on K = 1 + u1 z/(1 + u2 z/(...)); result = 1/K
    const double tiny = 1e-290;
    cdouble f = 1.0, Cl = 1.0, D = 0.0;
    for (int j = 1; j < max_iter; ++j) {
        const cdouble aj = coeff(j) * z;
        D = 1.0 + aj * D;
        if (std::abs(D) < tiny) D = tiny;
        Cl = 1.0 + aj / Cl;
        if (std::abs(Cl) < tiny) Cl = tiny;
        D = 1.0 / D;
        const cdouble delta = Cl * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return 1.0 / f;
    }
    throw std::domain_error("hyp2f1: continued fraction did not converge");
}

cdouble pow_c(cdouble base, double e) { return std::pow(base, cdouble(e, 0.0)); }

cdouble transform_1mz(double a, double b, double c, cdouble z) {
    // F(a,b;c;z) = G1 F(a,b;a+b-c+1;1-z) + (1-z)^{c-a-b} G2 F(c-a,c-b;c-a-b+1;1-z)
    const double cab = c - a - b;
    const cdouble u = 1.0 - z;
    const double g1 = std::tgamma(c) * gamma_real(cab) /
                      (gamma_real(c - a) * gamma_real(c - b));
    const double g2 = std::tgamma(c) * gamma_real(-cab) /
                      (gamma_real(a) * gamma_real(b));
    return g1 * gauss_series(a, b, a + b - c + 1.0, u) +
           pow_c(u, cab) * g2 * gauss_series(c - a, c - b, cab + 1.0, u);
}

} // namespace

cdouble hyp2f1(double a, double b, double c, cdouble z) {
    if (near_nonpositive_int(c) )
        throw std::domain_error("hyp2f1: c is a non-positive integer");
    if (z == cdouble(0.0, 0.0)) return cdouble(1.0, 0.0);
    if (near_nonpositive_int(a) || near_nonpositive_int(b)) {
        if (near_nonpositive_int(b) && !near_nonpositive_int(a)) std::swap(a, b);
        return poly_series(a, b, c, z);
    }
    const double az = std::abs(z);
    if (az > 1.0 + 1e-12)
        throw std::domain_error("hyp2f1: |z| > 1 not supported");
    if (z == cdouble(1.0, 0.0)) {
        // Gauss summation at z = 1, requires c-a-b > 0
        const double cab = c - a - b;
        if (cab <= 0.0) throw std::domain_error("hyp2f1: divergent at z=1");
        return std::tgamma(c) * std::tgamma(cab) /
               (std::tgamma(c - a) * std::tgamma(c - b));
    }
    if (az <= 0.55) return gauss_series(a, b, c, z);
    if (std::abs(1.0 - z) <= 0.55 && !near_int(c - a - b))
        return transform_1mz(a, b, c, z);
    if (a == 1.0 || b == 1.0) {
        const double bb = (a == 1.0) ? b : a;
        return gauss_cf(bb, c, z);
    }
    const cdouble w = z / (z - 1.0);
    if (std::abs(w) <= 0.75)
        return pow_c(1.0 - z, -a) * gauss_series(a, c - b, c, w);
    if (c - a - b > 0.05 && az <= 1.0 + 1e-12)
        return gauss_series(a, b, c, z);
    throw std::domain_error("hyp2f1: argument/parameter combination not covered");
}

double hyp2f1(double a, double b, double c, double x) {
    return hyp2f1(a, b, c, cdouble(x, 0.0)).real();
}

void sin_power_fourier(double a, int max_h, double* out) {
    // c_0 = Gamma(1+2a)/Gamma(1+a)^2, ratio c_h/c_{h-1} = (h-1-a)/(h+a)
    out[0] = std::exp(std::lgamma(1.0 + 2.0 * a) - 2.0 * std::lgamma(1.0 + a));
    for (int h = 1; h <= max_h; ++h) out[h] = out[h - 1] * (h - 1.0 - a) / (h + a);
}

} // namespace hetvol
