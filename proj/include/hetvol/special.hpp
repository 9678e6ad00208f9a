#ifndef HETVOL_SPECIAL_HPP
#define HETVOL_SPECIAL_HPP

#include <complex>

namespace hetvol {

using cdouble = std::complex<double>;

// Gauss hypergeometric function 2F1(a,b;c;z) for real parameters and complex
// argument. Supported domain: |z| <= 1 excluding the branch point z = 1 when
// Re(c-a-b) <= 0, plus real z in (-1,1). Strategy by region:
//   |z| <= 0.55                  -> Gauss series
//   |1-z| <= 0.55, c-a-b not int -> linear transformation at 1-z
//   a == 1 or b == 1             -> Gauss continued fraction (Lentz)
//   |z/(z-1)| <= 0.75            -> Pfaff transformation
//   Re(c-a-b) > 0, |z| <= 1      -> Gauss series (convergent on the circle)
// Throws std::domain_error for combinations none of these cover.
cdouble hyp2f1(double a, double b, double c, cdouble z);

// Convenience overload for real argument; returns the real part.
double hyp2f1(double a, double b, double c, double x);

// log Gamma for positive real argument (wraps std::lgamma; kept for symmetry).
double log_gamma(double x);

// Beta function B(a,b) for positive a,b.
double beta_fn(double a, double b);

// Fourier coefficients of |2 sin(lambda/2)|^{2a} for 2a in (-1, 1):
//   c_h = (1/2pi) Int_0^{2pi} |2 sin(l/2)|^{2a} e^{ilh} dl
//       = Gamma(1+2a) * (-1)^h / (Gamma(1+a+h) Gamma(1+a-h)).
// Computed by the stable ratio recursion c_h = c_{h-1} (h-1-a)/(h+a).
void sin_power_fourier(double a, int max_h, double* out);

} // namespace hetvol

#endif
