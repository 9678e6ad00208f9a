#include "doctest.h"

#include "hetvol/densities.hpp"
#include "hetvol/errors.hpp"
#include "hetvol/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace hetvol;

namespace {

// quadrature oracle for E[phi^k], independent of the recursion path.
// Both halves are integrated with geometric refinement toward their outer
// endpoint: x^k concentrates in O(1/k) boundary layers at +-1 and the
// densities may be singular there as well.
double moment_oracle(const Density& f, int k) {
    auto integrand = [&](double x) {
        const double v = density_eval(f, x);
        return std::isinf(v) ? 0.0 : std::pow(x, k) * v;
    };
    const double lo = std::holds_alternative<BetaNegAlpha>(f) ? 0.0 : -1.0;
    // right half [mid, 1], layer at +1
    const double mid = 0.5 * (lo + 1.0);
    const double right = integrate_singular_right(integrand, mid, 1.0, 1e-14, 1e-12).value;
    // left half [lo, mid] mirrored so its outer endpoint sits at the right
    auto mirrored = [&](double t) { return integrand(lo + mid - t); }; // t in [lo, mid]
    const double left =
        integrate_singular_right(mirrored, lo, mid, 1e-14, 1e-12).value;
    return left + right;
}

MixtureDensity mix(double w, std::vector<double> a, std::vector<double> b, double d) {
    MixtureDensity m;
    m.w = w;
    m.regular.a = std::move(a);
    m.regular.b = std::move(b);
    m.singular.d = d;
    return m;
}

} // namespace

TEST_CASE("density_eval basics") {
    Density uniform = mix(1.0, {}, {}, 0.25);
    CHECK(density_eval(uniform, 0.37) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(density_eval(uniform, -1.0) == doctest::Approx(0.5).epsilon(1e-15));

    Density f2 = mix(0.0, {}, {}, 0.5);
    CHECK(density_eval(f2, 0.5) == doctest::Approx(0.53033008588991).epsilon(1e-12));
    CHECK(std::isinf(density_eval(f2, 1.0)));
    CHECK(density_eval(f2, -0.3) == 0.0);
    CHECK_THROWS_AS(density_eval(f2, 1.5), ConfigError);
}

TEST_CASE("bell normalizer matches quadrature") {
    for (double m : {-0.5, 0.0, 0.3}) {
        for (double s : {0.1, 0.2, 0.35}) {
            auto f = [&](double x) {
                return (1.0 - x * x) * std::exp(-0.5 * (x - m) * (x - m) / (s * s));
            };
            QuadResult q = integrate(f, -1.0, 1.0, 1e-13, 1e-11);
            CHECK(bell_normalizer(m, s) == doctest::Approx(q.value).epsilon(1e-8));
        }
    }
    // bell part of the density integrates to 1
    Density bm = BellMixture{5.0, 0.75, 0.0, 0.3, 0.2};
    CHECK(moment_oracle(bm, 0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("moments: trivial and closed-form values") {
    Density uniform = mix(1.0, {}, {}, 0.25);
    CHECK(moment_phi(uniform, 0) == doctest::Approx(1.0).epsilon(1e-14));
    // SingularBeta d=0.5: E[phi] = 2/(3-d) = 0.8
    Density f2 = mix(0.0, {}, {}, 0.5);
    CHECK(moment_phi(f2, 1) == doctest::Approx(0.8).epsilon(1e-13));
    // mixture w=1, a1=0.2: E[phi^2] = 1/3 + 0.2*(-4/pi^2)
    Density m = mix(1.0, {0.2}, {}, 0.25);
    const double expect = 1.0 / 3.0 + 0.2 * (-4.0 / (std::numbers::pi * std::numbers::pi));
    CHECK(moment_phi(m, 2) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(moment_phi(m, 2) == doctest::Approx(moment_oracle(m, 2)).epsilon(1e-10));
}

TEST_CASE("moment recursions match the quadrature oracle to k = 50") {
    std::vector<Density> fams = {
        mix(0.6, {0.15, -0.05}, {0.1, 0.02}, 0.3),
        mix(0.3, {0.05}, {-0.12}, 0.45),
        mix(1.0, {0.2, 0.1, -0.03}, {}, 0.2),
        Density(BetaNegAlpha{-0.3}),
        Density(StretchedBeta{5.0, 0.75}),
        Density(BellMixture{5.0, 0.75, 0.5, 0.0, 0.2}),
        Density(BellMixture{3.0, 0.6, 0.4, -0.4, 0.15}),
    };
    for (const auto& f : fams) {
        auto m = moments_phi(f, 50);
        CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-9));
        for (int k = 1; k <= 50; k += (k < 8 ? 1 : 7)) {
            const double oracle = moment_oracle(f, k);
            const double tol = std::max(1e-6 * 1e-2, 1e-8 * std::abs(oracle));
            CHECK(std::abs(m[k] - oracle) <= std::max(tol, 1e-10));
        }
    }
}

TEST_CASE("fourier odd moments vanish for pure cosine densities") {
    Density m = mix(1.0, {0.3}, {}, 0.25);
    auto mm = moments_phi(m, 21);
    for (int k = 1; k <= 21; k += 2) CHECK(mm[k] == 0.0);
}

TEST_CASE("moment magnitudes bounded by one; monotone on [0,1] support") {
    Density m = mix(0.5, {0.1}, {0.05}, 0.35);
    auto mm = moments_phi(m, 200);
    for (double v : mm) CHECK(std::abs(v) <= 1.0 + 1e-12);
    Density f2 = mix(0.0, {}, {}, 0.35);
    auto m2 = moments_phi(f2, 200);
    for (std::size_t k = 1; k < m2.size(); ++k) CHECK(m2[k] <= m2[k - 1] + 1e-15);
}

TEST_CASE("deep moments stay accurate (backward recursion)") {
    // spot-check far coefficients against quadrature with tight tolerance
    Density m = mix(0.7, {0.1, 0.0, 0.02}, {0.07}, 0.3);
    auto mm = moments_phi(m, 2000);
    for (int k : {500, 1999}) {
        const double oracle = moment_oracle(m, k);
        CHECK(std::abs(mm[k] - oracle) <= std::max(1e-8 * std::abs(oracle), 1e-11));
    }
}

TEST_CASE("psi-phi moments") {
    Density f2 = mix(0.0, {}, {}, 0.5);
    // Rational: E[psi phi^0] = -E[phi]
    CHECK(moment_psi_phi(f2, RationalCoupling{}, 0) == doctest::Approx(-0.8).epsilon(1e-13));
    // Linear alpha=0.3: 0.3*(1 - 0.8) = 0.06
    CHECK(moment_psi_phi(f2, LinearCoupling{0.3}, 0) == doctest::Approx(0.06).epsilon(1e-12));
    // PowerLaw beta=1 equals Linear alpha=1
    Density sb = StretchedBeta{4.0, 0.8};
    auto a1 = moments_psi_phi(sb, PowerLawCoupling{1.0}, 12);
    auto a2 = moments_psi_phi(sb, LinearCoupling{1.0}, 12);
    for (int k = 0; k <= 12; ++k) CHECK(a1[k] == doctest::Approx(a2[k]).epsilon(1e-9));
    // BetaNegAlpha + PowerLaw closed form against quadrature
    Density ba = BetaNegAlpha{-0.3};
    auto cf = moments_psi_phi(ba, PowerLawCoupling{1.5}, 8);
    for (int k = 0; k <= 8; ++k) {
        auto integrand = [&](double x) {
            const double v = density_eval(ba, x);
            return std::isinf(v) ? 0.0 : std::pow(1.0 - x, 1.5) * std::pow(x, k) * v;
        };
        auto left = [&](double x) { return integrand(1.0 - x); };
        const double oracle =
            integrate_singular_right(integrand, 0.5, 1.0, 1e-14, 1e-12).value +
            integrate_singular_right(left, 0.5, 1.0, 1e-14, 1e-12).value;
        CHECK(cf[k] == doctest::Approx(oracle).epsilon(1e-8));
    }
    // E[psi] for BetaNegAlpha+PowerLaw: Gamma(1+a+b)/(Gamma(1+a)Gamma(1+b))
    const double expect0 = std::exp(std::lgamma(1.0 - 0.3 + 1.5) - std::lgamma(0.7) - std::lgamma(2.5));
    CHECK(cf[0] == doctest::Approx(expect0).epsilon(1e-12));
}

TEST_CASE("beta-neg-alpha generating identity E[1/(1-x phi)] = (1-x)^alpha") {
    const double alpha = -0.35;
    auto mm = moments_phi(Density(BetaNegAlpha{alpha}), 4000);
    for (double x : {0.3, -0.5, 0.9}) {
        double acc = 0.0, xp = 1.0;
        for (std::size_t k = 0; k < mm.size(); ++k) {
            acc += mm[k] * xp;
            xp *= x;
        }
        CHECK(acc == doctest::Approx(std::pow(1.0 - x, alpha)).epsilon(1e-4));
    }
}

TEST_CASE("validate_density") {
    // w=1 mixture with zero coefficients: all pass, no long memory
    auto rep = validate_density(mix(1.0, {}, {}, 0.25), LinearCoupling{0.3});
    CHECK(rep.all_pass());
    CHECK(rep.density_valid);
    CHECK_FALSE(rep.long_memory);

    // stretched Beta with Affine phibar != alpha: stationary, short memory
    auto rep2 = validate_density(Density(StretchedBeta{5.0, 0.75}),
                                 AffineCoupling{0.8, 0.79});
    CHECK(rep2.stationary);
    CHECK_FALSE(rep2.long_memory);

    // p < 1 fails
    auto rep3 = validate_density(Density(StretchedBeta{0.9, 0.75}), RationalCoupling{});
    CHECK_FALSE(rep3.all_pass());

    // long-memory switch on
    auto rep4 = validate_density(Density(StretchedBeta{5.0, 0.75}),
                                 AffineCoupling{0.3, 0.3});
    CHECK(rep4.long_memory);

    // negative f1 caught on the grid
    auto rep5 = validate_density(mix(1.0, {0.8}, {}, 0.25), RationalCoupling{});
    CHECK_FALSE(rep5.all_pass());
}

TEST_CASE("sampling: moments and determinism") {
    Density f2 = mix(0.0, {}, {}, 0.4);
    auto s = sample_phi_psi(f2, RationalCoupling{}, 100000, 42);
    double mean = 0.0;
    for (double v : s.phi) mean += v;
    mean /= double(s.phi.size());
    CHECK(mean == doctest::Approx(2.0 / 2.6).epsilon(0.013)); // E[phi] = 2/(3-d)
    for (std::size_t i = 0; i < 200; ++i) CHECK(s.psi[i] == -s.phi[i]);

    auto s2 = sample_phi_psi(f2, RationalCoupling{}, 1000, 42);
    for (int i = 0; i < 1000; ++i) CHECK(s2.phi[i] == s.phi[i]);

    Density uni = mix(1.0, {}, {}, 0.25);
    auto su = sample_phi_psi(uni, RationalCoupling{}, 100000, 7);
    double mu = 0.0;
    for (double v : su.phi) mu += v;
    CHECK(std::abs(mu / 100000.0) <= 0.01);
}

TEST_CASE("empirical cdf of draws matches tabulated cdf (KS distance)") {
    Density m = mix(0.5, {0.1}, {0.05}, 0.35);
    const auto tab = tabulate_cdf(m);
    const std::size_t n = 1000000;
    auto s = sample_phi_psi(m, LinearCoupling{0.3}, n, 99);
    std::sort(s.phi.begin(), s.phi.end());
    // KS distance between the empirical cdf and the tabulated one
    double ks = 0.0;
    for (std::size_t i = 0; i < tab.x.size(); i += 16) {
        const double x = tab.x[i];
        const auto it = std::upper_bound(s.phi.begin(), s.phi.end(), x);
        const double emp = double(it - s.phi.begin()) / double(n);
        ks = std::max(ks, std::abs(emp - tab.cdf[i]));
    }
    CHECK(ks <= 2e-3);
}

TEST_CASE("affine coupling with phibar = alpha reduces to the linear one") {
    Density m = mix(0.5, {0.1}, {}, 0.3);
    auto a = moments_psi_phi(m, AffineCoupling{0.3, 0.3}, 30);
    auto b = moments_psi_phi(m, LinearCoupling{0.3}, 30);
    for (int k = 0; k <= 30; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-13));
}
