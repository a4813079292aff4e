#include "arw/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace arw {

namespace {

GaussLegendre01 compute_gl01(int m) {
    GaussLegendre01 gl;
    gl.x.resize(m);
    gl.w.resize(m);
    // Newton on P_m over [-1,1], Chebyshev-based initial guesses
    for (int k = 0; k < m; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (m + 0.5));
        double p, dp;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            p = p1;
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
        }
        gl.x[k] = (x + 1.0) / 2.0;
        gl.w[k] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

}  // namespace

const GaussLegendre01& gauss_legendre_01(int m) {
    static std::mutex mu;
    static std::map<int, GaussLegendre01>* cache = new std::map<int, GaussLegendre01>();
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache->find(m);
    if (it == cache->end()) it = cache->emplace(m, compute_gl01(m)).first;
    return it->second;
}

}  // namespace arw
