#ifndef HETVOL_DENSITIES_HPP
#define HETVOL_DENSITIES_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace hetvol {

// f1(x) = 1/2 + sum a_n cos(n pi x) + sum b_n sin(n pi x) on [-1,1]
struct FourierDensity {
    std::vector<double> a;
    std::vector<double> b;
    int order() const { return int(a.size()); }
    double eval(double x) const;
};

// f2(x) = (1-d)(2-d) x (1-x)^{-d} on [0,1]
struct SingularBeta {
    double d = 0.25;
    double eval(double x) const;
};

// f = w f1 + (1-w) f2
struct MixtureDensity {
    double w = 1.0;
    FourierDensity regular;
    SingularBeta singular;
};

// density ~ x^{-alpha-1} (1-x)^{alpha} / B(-alpha, 1+alpha) on [0,1], alpha in (-1/2, 0)
struct BetaNegAlpha {
    double alpha = -0.25;
};

// Beta(p,q) stretched over [-1,1]: f ~ (1+x)^{p-1} (1-x)^{q-1}, p > 1, 0 < q < 1
struct StretchedBeta {
    double p = 5.0;
    double q = 0.75;
};

// w * stretched Beta + (1-w) * bell, bell ~ (1+x)(1-x) exp(-(x-m)^2/(2 s^2)) / K(m,s)
struct BellMixture {
    double p = 5.0;
    double q = 0.75;
    double w = 0.5;
    double m = 0.0;
    double sigma = 0.2;
};

using Density = std::variant<MixtureDensity, BetaNegAlpha, StretchedBeta, BellMixture>;

struct RationalCoupling {};                                  // psi = -phi
struct LinearCoupling { double alpha = 0.3; };               // g(phi) = alpha (1 - phi)
struct AffineCoupling { double alpha = 0.8; double phibar = 0.79; }; // psi = -alpha phi + phibar
struct PowerLawCoupling { double beta = 1.5; };              // g(phi) = (1-phi)^beta

using Coupling = std::variant<RationalCoupling, LinearCoupling, AffineCoupling, PowerLawCoupling>;

double coupling_g(const Coupling& c, double phi);

// Pointwise density value. x must lie in [-1,1]. Families with an integrable
// divergence return +infinity exactly at the singular endpoint(s).
double density_eval(const Density& f, double x);

// Normalizing constant of the bell factor, closed form (erf based):
//   K(m,s) = Int_{-1}^1 (1-x^2) exp(-(x-m)^2/(2 s^2)) dx
double bell_normalizer(double m, double sigma);

// E[phi^k] for k = 0..K in one pass (closed recursions per family).
std::vector<double> moments_phi(const Density& f, int K);

// Single moment. Convenience wrapper over the batch computation.
double moment_phi(const Density& f, int k);

// E[g(phi) phi^k] for k = 0..K.
std::vector<double> moments_psi_phi(const Density& f, const Coupling& c, int K);

double moment_psi_phi(const Density& f, const Coupling& c, int k);

// Moment table shared by the process machinery: mphi to K+1, mpsiphi to K.
struct MomentTable {
    std::vector<double> mphi;
    std::vector<double> mpsiphi;
};

MomentTable moment_table(const Density& f, const Coupling& c, int K);

struct ValidationItem {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    bool density_valid = true;  // f >= 0, integrates to 1
    bool stationary = true;     // second-order stationarity
    bool long_memory = false;
    bool all_pass() const;
    std::string summary() const;
};

ValidationReport validate_density(const Density& f, const Coupling& c);

// Tabulated CDF with geometric refinement at singular endpoints.
struct TabulatedCdf {
    std::vector<double> x;
    std::vector<double> cdf;
    double inverse(double u) const; // u in [0,1]
};

TabulatedCdf tabulate_cdf(const Density& f, int grid_points = 4097);

struct PhiPsiSample {
    std::vector<double> phi;
    std::vector<double> psi;
};

// phi ~ f via inverse-CDF sampling; psi = g(phi). Reproducible from seed.
PhiPsiSample sample_phi_psi(const Density& f, const Coupling& c,
                            std::size_t n, std::uint64_t seed);

} // namespace hetvol

#endif
