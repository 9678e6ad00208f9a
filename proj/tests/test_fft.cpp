#include "doctest.h"

#include "hetvol/fft.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace hetvol;

namespace {

std::vector<cdouble> naive_dft(const std::vector<cdouble>& in) {
    const std::size_t n = in.size();
    std::vector<cdouble> out(n, cdouble(0, 0));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = -2.0 * std::numbers::pi * double(j * k % n) / double(n);
            out[j] += in[k] * cdouble(std::cos(ang), std::sin(ang));
        }
    return out;
}

} // namespace

TEST_CASE("pow2 fft matches naive dft") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<cdouble> a(64);
    for (auto& v : a) v = cdouble(u(g), u(g));
    auto ref = naive_dft(a);
    auto x = a;
    fft_pow2(x, false);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(x[i] - ref[i]) < 1e-11);
    fft_pow2(x, true);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(x[i] / double(a.size()) - a[i]) < 1e-12);
}

TEST_CASE("bluestein handles non power-of-two sizes") {
    for (std::size_t n : {3u, 17u, 100u, 389u}) {
        std::mt19937_64 g(n);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<cdouble> a(n);
        for (auto& v : a) v = cdouble(u(g), u(g));
        auto ref = naive_dft(a);
        auto got = dft(a);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(got[i] - ref[i]) < 1e-9);
    }
}

TEST_CASE("fft_convolve equals direct convolution") {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> a(37), b(23);
    for (auto& v : a) v = u(g);
    for (auto& v : b) v = u(g);
    auto got = fft_convolve(a, b);
    REQUIRE(got.size() == a.size() + b.size() - 1);
    for (std::size_t i = 0; i < got.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j)
            if (i >= j && i - j < b.size()) s += a[j] * b[i - j];
        CHECK(got[i] == doctest::Approx(s).epsilon(1e-12));
    }
}
