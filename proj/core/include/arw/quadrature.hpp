#pragma once

#include <vector>

namespace arw {

/// Gauss-Legendre nodes/weights on [0,1]; instances cached per order.
struct GaussLegendre01 {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussLegendre01& gauss_legendre_01(int m);

/// integral over (0,inf) of f(t) t^(-3/2) dt for integrands with f(t) = O(t)
/// near 0, via t = w^2 followed by w = u/(1-u). The same substitution chain
/// drives the two-point correlation quadrature.
template <class F>
double integrate_t32(F&& f, int m) {
    const auto& gl = gauss_legendre_01(m);
    double acc = 0;
    for (int i = 0; i < m; ++i) {
        double u = gl.x[i];
        double w = u / (1.0 - u);
        double t = w * w;
        double jac = 1.0 / ((1.0 - u) * (1.0 - u));
        // f(t) t^(-3/2) dt = 2 f(w^2)/w^2 dw
        acc += gl.w[i] * jac * 2.0 * f(t) / t;
    }
    return acc;
}

}  // namespace arw
