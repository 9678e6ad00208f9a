#include "hetvol/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hetvol {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_pow2(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / double(len) * (inverse ? 1.0 : -1.0);
        const cdouble wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cdouble u = a[i + k];
                cdouble v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<cdouble> dft(const std::vector<cdouble>& in) {
    const std::size_t n = in.size();
    if (n == 0) return {};
    if (is_pow2(n)) {
        std::vector<cdouble> a = in;
        fft_pow2(a, false);
        return a;
    }
    // Bluestein: X_j = b*_j sum_k (a_k b_k) c_{j-k},  b_k = exp(-i pi k^2/n)
    const std::size_t m = next_pow2(2 * n + 1);
    std::vector<cdouble> a(m, cdouble(0, 0)), c(m, cdouble(0, 0));
    std::vector<cdouble> b(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the phase argument bounded
        const double phase = std::numbers::pi * double((k * k) % (2 * n)) / double(n);
        b[k] = cdouble(std::cos(phase), -std::sin(phase));
        a[k] = in[k] * b[k];
        c[k] = std::conj(b[k]);
        if (k > 0) c[m - k] = std::conj(b[k]);
    }
    fft_pow2(a, false);
    fft_pow2(c, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= c[k];
    fft_pow2(a, true);
    std::vector<cdouble> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = b[j] * a[j] / double(m);
    return out;
}

std::vector<double> fft_convolve(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) return {};
    const std::size_t outn = x.size() + y.size() - 1;
    const std::size_t m = next_pow2(outn);
    std::vector<cdouble> a(m, cdouble(0, 0));
    // pack x into real part, y into imaginary part; one forward FFT
    for (std::size_t i = 0; i < x.size(); ++i) a[i] += cdouble(x[i], 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) a[i] += cdouble(0.0, y[i]);
    fft_pow2(a, false);
    std::vector<cdouble> prod(m);
    for (std::size_t k = 0; k < m; ++k) {
        const cdouble fk = a[k];
        const cdouble fmk = std::conj(a[(m - k) & (m - 1)]);
        const cdouble X = 0.5 * (fk + fmk);
        const cdouble Y = cdouble(0, -0.5) * (fk - fmk);
        prod[k] = X * Y;
    }
    fft_pow2(prod, true);
    std::vector<double> out(outn);
    for (std::size_t i = 0; i < outn; ++i) out[i] = prod[i].real() / double(m);
    return out;
}

} // namespace hetvol
