#ifndef HETVOL_QUADRATURE_HPP
#define HETVOL_QUADRATURE_HPP

#include <functional>

namespace hetvol {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Adaptive Gauss-Kronrod (G7,K15) on [a,b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-10,
                     int max_depth = 60);

// Same, but splits off the right endpoint at b-eps and integrates the
// remainder with geometric refinement toward b. For integrands with an
// integrable singularity like (b-x)^{-d}, d < 1.
QuadResult integrate_singular_right(const std::function<double(double)>& f,
                                    double a, double b,
                                    double abs_tol = 1e-12, double rel_tol = 1e-10,
                                    double eps = 1e-12);

} // namespace hetvol

#endif
