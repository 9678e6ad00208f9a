#include "doctest.h"

#include "hetvol/rng.hpp"
#include "hetvol/semiparam.hpp"
#include "hetvol/volatility.hpp"

#include <cmath>
#include <numbers>

using namespace hetvol;

TEST_CASE("periodogram: pure cosine concentrates at its frequency") {
    const int T = 1024, kfreq = 37;
    std::vector<double> x(T);
    for (int t = 0; t < T; ++t)
        x[t] = std::cos(2.0 * std::numbers::pi * kfreq * t / T);
    auto I = periodogram(x);
    const double peak = I[kfreq - 1];
    for (int j : {kfreq - 1, kfreq + 1})
        CHECK(peak / std::max(I[j - 1], 1e-300) > 100.0);
}

TEST_CASE("periodogram: white-noise level and Parseval") {
    Rng64 g(21);
    const int T = 100000;
    std::vector<double> x(T);
    for (double& v : x) v = g.normal();
    auto I = periodogram(x);
    double mean = 0.0;
    for (double v : I) mean += v;
    mean /= double(I.size());
    CHECK(mean == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(0.06));
    CHECK(std::abs(mean - 1.0 / (2.0 * std::numbers::pi)) <= 0.01);

    auto g0 = sample_autocov(x, 0);
    double parseval = 0.0;
    for (double v : I) parseval += 2.0 * v * (2.0 * std::numbers::pi / T);
    CHECK(parseval == doctest::Approx(g0[0]).epsilon(0.01));
}

TEST_CASE("gph: white noise and arfima recovery") {
    Rng64 seeds(22);
    int hit_wn = 0, hit_arfima = 0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
        const int T = 8192;
        std::vector<double> w(T);
        Rng64 g(1000 + r);
        for (double& v : w) v = g.normal();
        auto res = gph_estimate(w);
        if (std::abs(res.d - 0.0) <= 2.0 * res.se) ++hit_wn;

        auto x = arfima_simulate(T, 0.3, 2000 + r);
        auto res2 = gph_estimate(x);
        if (std::abs(res2.d - 0.3) <= 2.0 * res2.se) ++hit_arfima;
    }
    CHECK(hit_wn >= int(reps * 0.85));
    CHECK(hit_arfima >= int(reps * 0.85));
}

TEST_CASE("gph: se is a deterministic function of (T, m)") {
    // T = 2518 trading days, m = floor(sqrt(T)) = 50
    std::vector<double> x(2518);
    Rng64 g(23);
    for (double& v : x) v = g.normal();
    auto r1 = gph_estimate(x);
    CHECK(r1.m == 50);
    auto r2 = gph_estimate(x);
    CHECK(r1.se == r2.se);
    CHECK(r1.se > 0.0);
    // another draw, same (T, m): identical se
    for (double& v : x) v = g.normal();
    auto r3 = gph_estimate(x);
    CHECK(r3.se == r1.se);
}

TEST_CASE("gph and rs are invariant under affine maps of the series") {
    auto x = arfima_simulate(4096, 0.25, 5);
    std::vector<double> y = x;
    for (double& v : y) v = -3.7 * v + 11.0;
    auto g1 = gph_estimate(x), g2 = gph_estimate(y);
    CHECK(g1.d == doctest::Approx(g2.d).epsilon(1e-10));
    auto h1 = rs_hurst(x), h2 = rs_hurst(y);
    CHECK(h1.H == doctest::Approx(h2.H).epsilon(1e-10));
}

TEST_CASE("rs hurst: white noise, arfima, trend") {
    double acc_wn = 0.0, acc_lm = 0.0;
    const int reps = 12;
    for (int r = 0; r < reps; ++r) {
        Rng64 g(3000 + r);
        std::vector<double> w(16384);
        for (double& v : w) v = g.normal();
        acc_wn += rs_hurst(w).H / reps;
        acc_lm += rs_hurst(arfima_simulate(16384, 0.3, 4000 + r)).H / reps;
    }
    CHECK(std::abs(acc_wn - 0.5) <= 0.05);
    CHECK(std::abs(acc_lm - 0.8) <= 0.07);

    std::vector<double> trend(16384);
    for (int t = 0; t < 16384; ++t) trend[t] = double(t);
    auto ht = rs_hurst(trend);
    CHECK(ht.H >= 0.95);
    CHECK(ht.trend_flag);
}

TEST_CASE("arfima oracle acf matches theory at lag 1") {
    // rho(1) = d/(1-d)
    const double d = 0.3;
    double acc = 0.0;
    const int reps = 10;
    for (int r = 0; r < reps; ++r) {
        auto x = arfima_simulate(32768, d, 7000 + r);
        acc += sample_acf(x, 1)[1] / reps;
    }
    CHECK(acc == doctest::Approx(d / (1.0 - d)).epsilon(0.05));
}
