#include "hetvol/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace hetvol {

namespace {

// 15-point Kronrod nodes/weights on [-1,1] and embedded 7-point Gauss weights.
const double kron_x[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898,  0.0,
     0.207784955007898,  0.405845151377397,  0.586087235467691,
     0.741531185599394,  0.864864423359769,  0.949107912342759,
     0.991455371120813};
const double kron_w[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};
const double gauss_w[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b, int& evals) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double ik = 0.0, ig = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(c + h * kron_x[i]);
        ik += kron_w[i] * fx;
        if (i % 2 == 1) ig += gauss_w[i / 2] * fx;
    }
    evals += 15;
    return Panel{a, b, ik * h, std::abs((ik - ig) * h)};
}

} // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, int max_depth) {
    QuadResult res;
    if (a == b) { res.converged = true; return res; }
    std::priority_queue<Panel> q;
    q.push(eval_panel(f, a, b, res.evaluations));
    double total = q.top().value, err = q.top().error;
    const int max_panels = std::min(200 << std::max(0, max_depth - 8), 40000);
    int n_panels = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && n_panels < max_panels) {
        Panel p = q.top();
        q.pop();
        if (p.b - p.a < 1e-15 * (std::abs(p.a) + std::abs(p.b) + 1.0)) {
            // cannot refine further in double precision
            q.push(Panel{p.a, p.b, p.value, 0.0});
            err -= p.error;
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        Panel l = eval_panel(f, p.a, m, res.evaluations);
        Panel r = eval_panel(f, m, p.b, res.evaluations);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        q.push(l);
        q.push(r);
        ++n_panels;
    }
    res.value = total;
    res.error = err;
    res.converged = err <= std::max(abs_tol, rel_tol * std::abs(total)) * 4.0;
    return res;
}

QuadResult integrate_singular_right(const std::function<double(double)>& f,
                                    double a, double b,
                                    double abs_tol, double rel_tol, double eps) {
    // Adaptive bulk on [a, b-w0], geometric panels into the endpoint down to
    // width eps*(b-a), then a power-law closure for the remaining sliver.
    QuadResult res;
    const double span = b - a;
    double w = 0.25 * span;
    QuadResult bulk = integrate(f, a, b - w, abs_tol * 0.5, rel_tol * 0.5);
    res.value = bulk.value;
    res.error = bulk.error;
    res.evaluations = bulk.evaluations;
    double prev_mag = 0.0; // no decay evidence before the second panel
    while (w > eps * span) {
        const double w2 = 0.5 * w;
        QuadResult part = integrate(f, b - w, b - w2, abs_tol * 0.01, rel_tol);
        res.value += part.value;
        res.error += part.error;
        res.evaluations += part.evaluations;
        w = w2;
        const double mag = std::abs(part.value);
        // stop only on evidence of geometric decay; integrands like x^k f(x)
        // grow toward the endpoint before their boundary layer is reached
        if (mag < std::max(abs_tol, rel_tol * std::abs(res.value)) * 1e-4 &&
            mag <= 0.5 * prev_mag)
            return res;
        prev_mag = mag;
    }
    // closure: measure local exponent from two points inside the sliver,
    // integrate c*(b-x)^{-p} analytically over [b-w, b]
    const double x1 = b - w, x2 = b - 0.5 * w;
    const double f1 = f(x1), f2 = f(x2);
    res.evaluations += 2;
    if (f1 > 0.0 && f2 > 0.0) {
        const double p = std::log(f2 / f1) / std::log(2.0); // f ~ c*(b-x)^{-p}
        if (p < 1.0) {
            const double c = f1 * std::pow(w, p);
            res.value += c * std::pow(w, 1.0 - p) / (1.0 - p);
        } else {
            res.error = HUGE_VAL; // non-integrable
        }
    } else {
        res.value += 0.5 * (f1 + f2) * w;
    }
    res.converged = res.error <= std::max(abs_tol, rel_tol * std::abs(res.value)) * 50.0;
    return res;
}

} // namespace hetvol
