#ifndef HETVOL_FFT_HPP
#define HETVOL_FFT_HPP

#include <complex>
#include <vector>

namespace hetvol {

using cdouble = std::complex<double>;

// In-place iterative radix-2 FFT. Size must be a power of two.
// inverse=true computes the unscaled inverse transform (no 1/N factor).
void fft_pow2(std::vector<cdouble>& a, bool inverse);

// DFT of arbitrary length n (Bluestein when n is not a power of two):
// out[j] = sum_k in[k] * exp(-2*pi*i*j*k/n).
std::vector<cdouble> dft(const std::vector<cdouble>& in);

// Linear convolution of two real sequences via FFT.
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b);

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);

} // namespace hetvol

#endif
