#include "doctest.h"

#include "hetvol/errors.hpp"
#include "hetvol/rng.hpp"
#include "hetvol/volatility.hpp"

#include <cmath>
#include <numbers>

using namespace hetvol;

namespace {

IntradayDay make_day(const std::vector<double>& prices) {
    IntradayDay d;
    d.date = "2001-01-02";
    for (std::size_t i = 0; i < prices.size(); ++i) {
        d.time_s.push_back(34200.0 + 60.0 * double(i));
        d.price.push_back(prices[i]);
    }
    return d;
}

} // namespace

TEST_CASE("realized variance basics") {
    CHECK(compute_realized_variance(make_day({100, 100, 100, 100})).rv == 0.0);
    // returns +0.01 and -0.02
    const double p1 = 100.0, p2 = 100.0 * std::exp(0.01), p3 = p2 * std::exp(-0.02);
    auto r = compute_realized_variance(make_day({p1, p2, p3}));
    CHECK(r.rv == doctest::Approx(5.0e-4).epsilon(1e-12));
    CHECK_THROWS_AS(compute_realized_variance(make_day({100.0})), DataError);
    CHECK_THROWS_AS(compute_realized_variance(make_day({100.0, -1.0})), DataError);
}

TEST_CASE("realized variance is invariant under price rescaling") {
    Rng64 g(4);
    std::vector<double> p{100.0};
    for (int i = 0; i < 200; ++i) p.push_back(p.back() * std::exp(0.001 * g.normal()));
    auto r1 = compute_realized_variance(make_day(p));
    for (double& v : p) v *= 37.5;
    auto r2 = compute_realized_variance(make_day(p));
    CHECK(r1.rv == doctest::Approx(r2.rv).epsilon(1e-12));
}

TEST_CASE("gbm day rv is close to integrated variance (MC oracle)") {
    // sigma = 0.2/sqrt(252) per day, 390 one-minute steps, 10000 replications
    const double sig_day = 0.2 / std::sqrt(252.0);
    const int steps = 390, reps = 10000;
    const double step_sd = sig_day / std::sqrt(double(steps));
    Rng64 g(11);
    double acc = 0.0, acc2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        double rv = 0.0;
        for (int i = 0; i < steps; ++i) {
            const double ret = step_sd * g.normal();
            rv += ret * ret;
        }
        acc += rv;
        acc2 += rv * rv;
    }
    const double mean_rv = acc / reps;
    const double sd_rv = std::sqrt(acc2 / reps - mean_rv * mean_rv);
    const double mc_se = sd_rv / std::sqrt(double(reps));
    CHECK(std::abs(mean_rv - sig_day * sig_day) <= 3.0 * mc_se);
}

TEST_CASE("error bands") {
    auto b = rv_error_band({0.01, -0.02});
    CHECK(b.plain == doctest::Approx(std::sqrt(2.0 / 3.0 * (1e-8 + 1.6e-7))).epsilon(1e-12));
    // all returns equal r: log band = sqrt(2/(3 n))
    auto b2 = rv_error_band({0.004, 0.004, 0.004, 0.004, 0.004});
    CHECK(b2.log_scale == doctest::Approx(std::sqrt(2.0 / (3.0 * 5.0))).epsilon(1e-12));
    CHECK_THROWS_AS(rv_error_band({0.0, 0.0}), NumericalError);
}

TEST_CASE("log_vol_series") {
    RVSeries rv;
    rv.rv = {1.0, 1.0, 1.0};
    rv.dates = {"a", "b", "c"};
    auto lv = log_vol_series(rv);
    CHECK(lv.omega[0] == 0.0);
    CHECK(lv.mean_omega == 0.0);
    rv.rv = {std::exp(2.0)};
    rv.dates = {"a"};
    CHECK(log_vol_series(rv).omega[0] == doctest::Approx(1.0).epsilon(1e-14));
    rv.rv = {1.0, 0.0};
    rv.dates = {"a", "b"};
    CHECK_THROWS_WITH_AS(log_vol_series(rv), doctest::Contains("day b"), DataError);
}

TEST_CASE("log vol of lognormal rv is symmetric (MC oracle)") {
    Rng64 g(5);
    RVSeries rv;
    for (int i = 0; i < 10000; ++i) {
        rv.rv.push_back(std::exp(2.0 * (0.3 * g.normal() - 4.0)));
        rv.dates.push_back("d");
    }
    auto lv = log_vol_series(rv);
    auto nd = normality_diagnostics(lv.omega);
    CHECK(std::abs(nd.skewness) <= 0.1);
}

TEST_CASE("round trip omega -> rv -> omega") {
    Rng64 g(6);
    RVSeries rv;
    std::vector<double> omega_in;
    for (int i = 0; i < 50; ++i) {
        const double w = 0.4 * g.normal() - 4.5;
        omega_in.push_back(w);
        rv.rv.push_back(std::exp(2.0 * w));
        rv.dates.push_back("d");
    }
    auto lv = log_vol_series(rv);
    for (int i = 0; i < 50; ++i)
        CHECK(std::abs(lv.omega[i] - omega_in[i]) < 1e-12);
}

TEST_CASE("sample autocovariance") {
    std::vector<double> c(100, 3.7);
    auto g0 = sample_autocov(c, 5);
    for (double v : g0) CHECK(std::abs(v) < 1e-25); // centered values are pure roundoff

    // iid N(0,1), T = 10000: |gamma(1)| <= 3/sqrt(T)
    Rng64 g(12);
    std::vector<double> x(10000);
    for (double& v : x) v = g.normal();
    auto gg = sample_autocov(x, 2);
    CHECK(std::abs(gg[1]) <= 3.0 / std::sqrt(10000.0));

    // AR(1) 0.5: rho(1) within 0.02 at T = 50000
    std::vector<double> y(50000);
    double prev = 0.0;
    for (double& v : y) {
        prev = 0.5 * prev + g.normal();
        v = prev;
    }
    auto rho = sample_acf(y, 3);
    CHECK(rho[0] == 1.0);
    CHECK(rho[1] == doctest::Approx(0.5).epsilon(0.04));
    CHECK_THROWS_AS(sample_autocov(y, 50000), ConfigError);
}

TEST_CASE("acf of alternating series") {
    std::vector<double> x;
    for (int i = 0; i < 2000; ++i) x.push_back(i % 2 == 0 ? 1.0 : -1.0);
    auto rho = sample_acf(x, 1);
    CHECK(std::abs(rho[1] + 1.0) <= 2.0 / 2000.0 + 1e-12);
}

TEST_CASE("white-noise acf stays inside CLT bands at most lags") {
    Rng64 g(13);
    std::vector<double> x(20000);
    for (double& v : x) v = g.normal();
    auto rho = sample_acf(x, 20);
    int inside = 0;
    for (int h = 1; h <= 20; ++h)
        if (std::abs(rho[h]) <= 2.0 / std::sqrt(20000.0)) ++inside;
    CHECK(inside >= 18);
}

TEST_CASE("autocov toeplitz matrix is positive semi-definite") {
    Rng64 g(14);
    std::vector<double> x(3000);
    double prev = 0.0;
    for (double& v : x) {
        prev = 0.7 * prev + g.normal();
        v = prev + 0.1;
    }
    const int L = 12;
    auto gam = sample_autocov(x, L);
    // smallest eigenvalue by inverse-power-free check: Cholesky with shift
    // simple O(L^3) Jacobi-free approach: check x' M x >= -tol for random x
    Rng64 g2(15);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(L + 1);
        for (double& w : v) w = g2.normal();
        double q = 0.0;
        for (int i = 0; i <= L; ++i)
            for (int j = 0; j <= L; ++j) q += v[i] * gam[std::abs(i - j)] * v[j];
        CHECK(q >= -1e-10 * gam[0]);
    }
}

TEST_CASE("kde") {
    // single observation at 0, bandwidth 1 -> standard normal curve
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(0.1 * i);
    auto k = kde_density({0.0}, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double expect =
            std::exp(-0.5 * grid[i] * grid[i]) / std::sqrt(2.0 * std::numbers::pi);
        CHECK(k.density[i] == doctest::Approx(expect).epsilon(1e-12));
    }
    // two points at +-1, bandwidth 0.5: symmetric, value at 0 equals mixture avg
    auto k2 = kde_density({-1.0, 1.0}, 0.5, {-0.5, 0.0, 0.5});
    CHECK(k2.density[0] == doctest::Approx(k2.density[2]).epsilon(1e-12));
    const double at0 = std::exp(-0.5 * 4.0) / (0.5 * std::sqrt(2.0 * std::numbers::pi));
    CHECK(k2.density[1] == doctest::Approx(at0).epsilon(1e-12));
    CHECK_THROWS_AS(kde_density({}, 1.0, grid), DataError);
}

TEST_CASE("kde with Silverman bandwidth approximates the normal density") {
    Rng64 g(16);
    std::vector<double> x(10000);
    for (double& v : x) v = g.normal();
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(0.1 * i);
    auto k = kde_density(x, 0.0, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double expect =
            std::exp(-0.5 * grid[i] * grid[i]) / std::sqrt(2.0 * std::numbers::pi);
        worst = std::max(worst, std::abs(k.density[i] - expect));
    }
    CHECK(worst <= 0.03);
    // trapezoid mass on mean +- 6 sd grid
    std::vector<double> wide;
    for (int i = -60; i <= 60; ++i) wide.push_back(0.1 * i);
    auto kw = kde_density(x, 0.0, wide);
    double mass = 0.0;
    for (std::size_t i = 1; i < wide.size(); ++i)
        mass += 0.5 * (kw.density[i] + kw.density[i - 1]) * (wide[i] - wide[i - 1]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("normality diagnostics") {
    // symmetric two-point sample
    std::vector<double> x;
    for (int i = 0; i < 50; ++i) {
        x.push_back(1.0);
        x.push_back(-1.0);
    }
    auto nd = normality_diagnostics(x);
    CHECK(nd.skewness == doctest::Approx(0.0).epsilon(1e-14));

    // exponential(1): skewness ~ 2 at T = 50000
    Rng64 g(17);
    std::vector<double> e(50000);
    for (double& v : e) v = -std::log(1.0 - g.uniform());
    auto nde = normality_diagnostics(e);
    CHECK(nde.skewness == doctest::Approx(2.0).epsilon(0.05));

    // N(0,1): JB below the 5% chi2(2) critical value in ~95% of replications
    int below = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> z(10000);
        for (double& v : z) v = g.normal();
        if (normality_diagnostics(z).jarque_bera < 5.99) ++below;
    }
    CHECK(below >= int(reps * 0.90));
    CHECK(below <= int(reps * 0.99));
    CHECK_THROWS_AS(normality_diagnostics(std::vector<double>(20, 1.0)), NumericalError);
}
