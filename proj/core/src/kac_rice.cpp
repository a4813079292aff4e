#include "arw/kac_rice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arw/correlation.hpp"
#include "arw/errors.hpp"
#include "arw/parallel.hpp"
#include "arw/quadrature.hpp"
#include "arw/rng.hpp"
#include "arw/spectral.hpp"
#include "arw/torus_grid.hpp"

namespace arw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Omega4 = std::array<std::array<double, 4>, 4>;

// ---- symmetric 4x4 Jacobi eigen solver ------------------------------------

std::array<double, 4> jacobi4(Omega4 a, Omega4* vecs) {
    Omega4 v{};
    for (int i = 0; i < 4; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < 4; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 4; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    std::array<double, 4> ev{a[0][0], a[1][1], a[2][2], a[3][3]};
    std::array<int, 4> ord{0, 1, 2, 3};
    std::sort(ord.begin(), ord.end(), [&](int i, int j) { return ev[i] < ev[j]; });
    std::array<double, 4> out{};
    Omega4 vout{};
    for (int i = 0; i < 4; ++i) {
        out[i] = ev[ord[i]];
        for (int k = 0; k < 4; ++k) vout[k][i] = v[k][ord[i]];
    }
    if (vecs) *vecs = vout;
    return out;
}

// ---- Berry quadrature with cancellation-free algebra ----------------------

// det(I + T Omega T) with T = diag(sqrt t, sqrt t, sqrt s, sqrt s) is the
// bidegree-(2,2) polynomial sum_{i,j} c[i][j] t^i s^j whose coefficients are
// sums of principal minors of Omega split between index blocks {0,1}, {2,3}.
struct K2Poly {
    double c[3][3]{};
};

double principal_minor(const Omega4& m, const int* idx, int k) {
    switch (k) {
        case 0: return 1.0;
        case 1: return m[idx[0]][idx[0]];
        case 2: {
            double a = m[idx[0]][idx[0]], b = m[idx[0]][idx[1]];
            double c = m[idx[1]][idx[0]], d = m[idx[1]][idx[1]];
            return a * d - b * c;
        }
        case 3: {
            double d = 0;
            for (int c0 = 0; c0 < 3; ++c0) {
                double sub[2][2];
                int rr = 0;
                for (int r = 1; r < 3; ++r) {
                    int cc = 0;
                    for (int c1 = 0; c1 < 3; ++c1) {
                        if (c1 == c0) continue;
                        sub[rr][cc++] = m[idx[r]][idx[c1]];
                    }
                    ++rr;
                }
                double minor2 = sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0];
                d += (c0 % 2 ? -1.0 : 1.0) * m[idx[0]][idx[c0]] * minor2;
            }
            return d;
        }
        default: {
            // 4x4 cofactor expansion along the first row
            double mm[4][4];
            for (int r = 0; r < 4; ++r)
                for (int c1 = 0; c1 < 4; ++c1) mm[r][c1] = m[idx[r]][idx[c1]];
            double det = 0;
            for (int c0 = 0; c0 < 4; ++c0) {
                double m3[3][3];
                for (int r = 1; r < 4; ++r) {
                    int cc = 0;
                    for (int c1 = 0; c1 < 4; ++c1) {
                        if (c1 == c0) continue;
                        m3[r - 1][cc++] = mm[r][c1];
                    }
                }
                double minor3 = m3[0][0] * (m3[1][1] * m3[2][2] - m3[1][2] * m3[2][1]) -
                                m3[0][1] * (m3[1][0] * m3[2][2] - m3[1][2] * m3[2][0]) +
                                m3[0][2] * (m3[1][0] * m3[2][1] - m3[1][1] * m3[2][0]);
                det += (c0 % 2 ? -1.0 : 1.0) * mm[0][c0] * minor3;
            }
            return det;
        }
    }
}

K2Poly principal_coeffs(const Omega4& o) {
    K2Poly p;
    for (int mask = 0; mask < 16; ++mask) {
        int idx[4], k = 0, i = 0, j = 0;
        for (int b = 0; b < 4; ++b)
            if (mask & (1 << b)) {
                idx[k++] = b;
                (b < 2 ? i : j) += 1;
            }
        p.c[i][j] += principal_minor(o, idx, k);
    }
    return p;
}

// E[|V1| |V2|] for (V1,V2) ~ N(0, Omega), one quadrature pass with m nodes.
double berry_pass(const K2Poly& p, int m) {
    const auto& gl = gauss_legendre_01(m);
    const double c10 = p.c[1][0], c20 = p.c[2][0];
    const double c01 = p.c[0][1], c02 = p.c[0][2];
    const double c11 = p.c[1][1], c21 = p.c[2][1], c12 = p.c[1][2], c22 = p.c[2][2];
    const double r00 = c10 * c01 - c11;
    const double r10 = c20 * c01 - c21;
    const double r01 = c10 * c02 - c12;
    const double r11 = c20 * c02 - c22;

    std::vector<double> tval(m), wght(m), at(m), sqt(m), as(m), sqs(m);
    for (int i = 0; i < m; ++i) {
        double u = gl.x[i];
        double w = u / (1.0 - u);
        double t = w * w;
        tval[i] = t;
        wght[i] = gl.w[i] / ((1.0 - u) * (1.0 - u));
        double pt0 = 1.0 + (c10 + c20 * t) * t;
        double sq = std::sqrt(pt0);
        sqt[i] = sq;
        at[i] = -(c10 + c20 * t) / (sq * (1.0 + sq));  // (1 - Pt0^{-1/2}) / t
        double p0s = 1.0 + (c01 + c02 * t) * t;
        double sqb = std::sqrt(p0s);
        sqs[i] = sqb;
        as[i] = -(c01 + c02 * t) / (sqb * (1.0 + sqb));
    }
    double acc = 0;
    for (int i = 0; i < m; ++i) {
        const double t = tval[i];
        const double wi = wght[i];
        const double ai = at[i];
        const double sa = sqt[i];
        double row = 0;
        for (int j = 0; j < m; ++j) {
            const double s = tval[j];
            double P = ((c22 * t + c12) * t + c02) * s + ((c21 * t + c11) * t + c01);
            P = P * s + ((c20 * t + c10) * t + 1.0);
            const double rho = r00 + r10 * t + r01 * s + r11 * t * s;
            const double bprod = sa * sqs[j];         // sqrt(Pt0 * P0s)
            const double sqP = std::sqrt(P);
            const double g = ai * as[j] + rho / (sqP * bprod * (sqP + bprod));
            row += wght[j] * g;
        }
        acc += wi * row;
    }
    return (2.0 / kPi) * acc;
}

Mat2 outer_sym(double d1, double d2) {
    return Mat2{d1 * d1, d1 * d2, d2 * d2};
}

}  // namespace

// ---- jets and perturbations ------------------------------------------------

CovarianceJet covariance_jet(const FrequencySet& fs, Point x) {
    CovarianceJet jet;
    jet.x = x;
    const int N = fs.multiplicity();
    double r = 0, d1 = 0, d2 = 0, h11 = 0, h12 = 0, h22 = 0;
    for (const auto& p : fs.points) {
        double phase = kTwoPi * (p.x * x[0] + p.y * x[1]);
        double cs = std::cos(phase), sn = std::sin(phase);
        r += cs;
        d1 += sn * p.x;
        d2 += sn * p.y;
        h11 += cs * static_cast<double>(p.x) * p.x;
        h12 += cs * static_cast<double>(p.x) * p.y;
        h22 += cs * static_cast<double>(p.y) * p.y;
    }
    jet.r = r / N;
    jet.d1 = -kTwoPi * d1 / N;
    jet.d2 = -kTwoPi * d2 / N;
    double hw = -kTwoPi * kTwoPi / N;
    jet.H = Mat2{hw * h11, hw * h12, hw * h22};
    return jet;
}

ScaledPerturbation perturbation(const CovarianceJet& jet, double E) {
    double om = 1.0 - jet.r * jet.r;
    if (om < 1e-10)
        throw DegenerateConditioning("perturbation: 1 - r^2 below threshold at r = " +
                                     std::to_string(jet.r));
    ScaledPerturbation p;
    p.r = jet.r;
    Mat2 ddt = outer_sym(jet.d1, jet.d2);
    double xs = -2.0 / (E * om);
    p.X = Mat2{xs * ddt.a, xs * ddt.b, xs * ddt.c};
    double ys = -2.0 / E;
    double rc = jet.r / om;
    p.Y = Mat2{ys * (jet.H.a + rc * ddt.a), ys * (jet.H.b + rc * ddt.b),
               ys * (jet.H.c + rc * ddt.c)};
    return p;
}

Omega4 omega_matrix(const ScaledPerturbation& p) {
    Omega4 o{};
    o[0][0] = 1 + p.X.a; o[0][1] = p.X.b;     o[0][2] = p.Y.a; o[0][3] = p.Y.b;
    o[1][0] = p.X.b;     o[1][1] = 1 + p.X.c; o[1][2] = p.Y.b; o[1][3] = p.Y.c;
    o[2][0] = p.Y.a;     o[2][1] = p.Y.b;     o[2][2] = 1 + p.X.a; o[2][3] = p.X.b;
    o[3][0] = p.Y.b;     o[3][1] = p.Y.c;     o[3][2] = p.X.b;     o[3][3] = 1 + p.X.c;
    return o;
}

std::array<double, 4> sym4_eigenvalues(const Omega4& m) {
    return jacobi4(m, nullptr);
}

double k2_exact(const ScaledPerturbation& pert, const K2Options& opt) {
    Omega4 o = omega_matrix(pert);
    auto ev = jacobi4(o, nullptr);
    if (ev[0] < 1e-12)
        throw DegenerateConditioning("k2_exact: Omega not positive definite (min eig " +
                                     std::to_string(ev[0]) + ")");
    K2Poly poly = principal_coeffs(o);
    double scale = 1.0 / (kTwoPi * std::sqrt(1.0 - pert.r * pert.r));
    double prev = berry_pass(poly, opt.nodes) * scale;
    if (!opt.adaptive) return prev;
    for (int m = 2 * opt.nodes; m <= opt.max_nodes; m *= 2) {
        double cur = berry_pass(poly, m) * scale;
        if (std::abs(cur - prev) <= opt.tol) return cur;
        prev = cur;
    }
    throw NotConverged("k2_exact: node doubling did not settle to tolerance");
}

double k2_taylor(const ScaledPerturbation& p) {
    const Mat2 &X = p.X, &Y = p.Y;
    const double r = p.r;
    double trX = X.trace();
    double trX2 = Mat2::trace_prod(X, X);
    double trY2 = Mat2::trace_prod(Y, Y);
    Mat2 y2 = Y.mul(Y);
    double trXY2 = X.a * y2.a + 2 * X.b * y2.b + X.c * y2.c;  // tr(X Y^2), Y^2 symmetric
    double trY4 = Mat2::trace_prod(y2, y2);
    double r2 = r * r;
    double L2 = 0.25 * (r2 / 2 + trX / 2 + trY2 / 8 + 3.0 / 8.0 * r2 * r2 - trXY2 / 16 -
                        trX2 / 32 + trY4 / 256 + trY2 * trY2 / 512 - trX * trY2 / 32 +
                        r2 * trX / 4 + r2 * trY2 / 16);
    return 0.25 + L2;
}

McEstimate k2_monte_carlo(const ScaledPerturbation& pert, u64 draws, u64 seed) {
    Omega4 o = omega_matrix(pert);
    Omega4 vecs;
    auto ev = jacobi4(o, &vecs);
    if (ev[0] < -1e-9)
        throw DegenerateConditioning("k2_monte_carlo: Omega has a negative eigenvalue");
    // symmetric square root
    Omega4 sq{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0;
            for (int k = 0; k < 4; ++k)
                s += vecs[i][k] * std::sqrt(std::max(ev[k], 0.0)) * vecs[j][k];
            sq[i][j] = s;
        }
    CounterRng rng(seed, 0x6b32);
    double sum = 0, sumsq = 0;
    for (u64 d = 0; d < draws; ++d) {
        double z[4], v[4];
        for (double& zi : z) zi = rng.next_normal();
        for (int i = 0; i < 4; ++i)
            v[i] = sq[i][0] * z[0] + sq[i][1] * z[1] + sq[i][2] * z[2] + sq[i][3] * z[3];
        double prod = std::hypot(v[0], v[1]) * std::hypot(v[2], v[3]);
        sum += prod;
        sumsq += prod * prod;
    }
    double nd = static_cast<double>(draws);
    double mean = sum / nd;
    double var = std::max(0.0, sumsq / nd - mean * mean);
    double scale = 1.0 / (kTwoPi * std::sqrt(1.0 - pert.r * pert.r));
    return {mean * scale, std::sqrt(var / nd) * scale};
}

// ---- Berry cancellation ----------------------------------------------------

double berry_cancellation_v(const FrequencySet& fs, Point x) {
    CovarianceJet jet = covariance_jet(fs, x);
    double E = fs.energy();
    double ddt = jet.d1 * jet.d1 + jet.d2 * jet.d2;
    double trH2 = Mat2::trace_prod(jet.H, jet.H);
    return jet.r * jet.r - 2.0 / E * ddt + trH2 / (E * E);
}

double berry_cancellation_v_pairsum(const FrequencySet& fs, Point x) {
    const int N = fs.multiplicity();
    const double n = static_cast<double>(fs.n);
    double acc = 0;
    for (const auto& a : fs.points) {
        double pa = kTwoPi * (a.x * x[0] + a.y * x[1]);
        for (const auto& b : fs.points) {
            double cos_angle = static_cast<double>(dot(a, b)) / n;
            double c4 = (1.0 + cos_angle) / 2.0;  // cos^2(theta/2)
            double pb = kTwoPi * (b.x * x[0] + b.y * x[1]);
            acc += 4.0 * c4 * c4 * std::cos(pa + pb);
        }
    }
    return acc / (static_cast<double>(N) * N);
}

// ---- lemma integral suite ---------------------------------------------------

std::vector<LemmaResult> lemma_integral_suite(const FrequencySet& fs, int threads) {
    const u64 n = fs.n;
    const long double N = fs.multiplicity();
    const long double E = fs.energy();
    const long double N2 = N * N, N3 = N2 * N, N4 = N2 * N2;
    const long double E2 = E * E, E3 = E2 * E, E4 = E2 * E2, E6 = E3 * E3;
    const i128 n4 = static_cast<i128>(n) * n * static_cast<i128>(n) * n;
    const i128 iN = fs.multiplicity();
    const i128 P4 = B4_numerator(fs);  // sum <l1,l2>^4
    const double mu4 = mu_hat(fs, 4);
    const double R6 = static_cast<double>(count_s6(fs, 1 << 20)) / static_cast<double>(N4 * N2);

    const int M = next_smooth(12 * static_cast<int>(isqrt_u64(n) + 1) + 1);
    CovarianceGrids g = covariance_grids(fs, M);
    const std::size_t mm = g.r.size();

    auto assemble = [&](int id) {
        std::vector<double> v(mm);
        parallel_for(0, static_cast<long>(mm), threads, [&](long i) {
            double r = g.r[i], d1 = g.d1[i], d2 = g.d2[i];
            double h11 = g.h11[i], h12 = g.h12[i], h22 = g.h22[i];
            double dd = d1 * d1 + d2 * d2;
            double trH2 = h11 * h11 + 2 * h12 * h12 + h22 * h22;
            switch (id) {
                case 0: v[i] = r * r; break;
                case 1: v[i] = r * r * r * r; break;
                case 2: v[i] = dd; break;
                case 3: v[i] = dd * dd; break;
                case 4: v[i] = r * r * dd; break;
                case 5: v[i] = trH2; break;
                case 6: v[i] = r * r * trH2; break;
                case 7: {  // tr H^4
                    double a = h11 * h11 + h12 * h12;
                    double b = h12 * (h11 + h22);
                    double c = h12 * h12 + h22 * h22;
                    v[i] = a * a + 2 * b * b + c * c;
                    break;
                }
                case 8: v[i] = trH2 * trH2; break;
                case 9: v[i] = dd * trH2; break;
                case 10: v[i] = r * (d1 * d1 * h11 + 2 * d1 * d2 * h12 + d2 * d2 * h22); break;
                case 11: {  // D H^2 D^t
                    double a = h11 * h11 + h12 * h12;
                    double b = h12 * (h11 + h22);
                    double c = h12 * h12 + h22 * h22;
                    v[i] = d1 * d1 * a + 2 * d1 * d2 * b + d2 * d2 * c;
                    break;
                }
                case 12: v[i] = dd * dd * dd; break;
                case 13: v[i] = r * r * r * r * dd; break;
                case 14: {  // tr H^6 = tr((H^2)^3)
                    double a = h11 * h11 + h12 * h12;
                    double b = h12 * (h11 + h22);
                    double c = h12 * h12 + h22 * h22;
                    v[i] = a * a * a + c * c * c + 3 * b * b * (a + c);
                    break;
                }
            }
        });
        return pairwise_mean(v);
    };

    auto ld = [](long double x) { return static_cast<double>(x); };
    // fourth-moment combinations N^2 n^4 + k P4 - 3 N n^4 over N^4 n^4
    auto h4_comb = [&](int k) {
        i128 num = iN * iN * n4 + k * P4 - 3 * iN * n4;
        return to_ld(num) / (to_ld(n4) * N4);
    };

    std::vector<LemmaResult> out;
    auto push_exact = [&](const char* name, int id, long double exact, long double leading,
                          long double allowance) {
        LemmaResult r;
        r.name = name;
        r.exact = ld(exact);
        r.quadrature = assemble(id);
        r.leading = ld(leading);
        r.allowance = ld(allowance);
        out.push_back(r);
    };
    auto push_bound = [&](const char* name, int id, double C, long double scale) {
        LemmaResult r;
        r.name = name;
        r.is_bound = true;
        r.quadrature = assemble(id);
        r.bound_rhs = C * static_cast<double>(scale) * R6;
        out.push_back(r);
    };

    push_exact("int r^2", 0, 1.0L / N, 1.0L / N, 1e-12L / N);
    push_exact("int r^4", 1, (3 * N2 - 3 * N) / N4, 3 / N2, 12 / N3);
    push_exact("int D D^t", 2, E / N, E / N, 1e-12L * E / N);
    push_exact("int (D D^t)^2", 3, E2 * (2 * N2 - 3 * N) / N4, 2 * E2 / N2, 8 * E2 / N3);
    push_exact("int r^2 D D^t", 4, E * (N2 - N) / N4, E / N2, 4 * E / N3);
    push_exact("int tr H^2", 5, E2 / N, E2 / N, 1e-12L * E2 / N);
    push_exact("int r^2 tr H^2", 6, E2 * (2 * N2 - 3 * N) / N4, 2 * E2 / N2, 8 * E2 / N3);
    push_exact("int tr H^4", 7, E4 * h4_comb(1), E4 * (11.0L + mu4 * mu4) / (8 * N2),
               4 * E4 / N3);
    push_exact("int (tr H^2)^2", 8, E4 * h4_comb(2), E4 * (7.0L + mu4 * mu4) / (4 * N2),
               4 * E4 / N3);
    push_exact("int D D^t tr H^2", 9, E3 * (N2 - N) / N4, E3 / N2, 4 * E3 / N3);
    push_exact("int r D H D^t", 10, -E2 * (N2 - 2 * N) / (2 * N4), -E2 / (2 * N2),
               4 * E2 / N3);
    push_exact("int D H^2 D^t", 11, E3 * (N2 - 2 * N) / (2 * N4), E3 / (2 * N2),
               4 * E3 / N3);
    push_bound("int (D D^t)^3 <= C E^3 R6", 12, 1.0, E3);
    push_bound("int r^4 D D^t <= C E R6", 13, 0.5, E);
    push_bound("int tr H^6 <= C E^6 R6", 14, 0.5, E6);
    return out;
}

// ---- singular set -----------------------------------------------------------

int singular_grid_m(u64 n) {
    return static_cast<int>(
        std::ceil(8.0 * std::sqrt(2.0) * kPi * std::sqrt(static_cast<double>(n))));
}

SingularSetReport singular_set(const FrequencySet& fs, int grid_M, int threads) {
    const int min_m = singular_grid_m(fs.n);
    if (grid_M == 0) grid_M = min_m;
    if (grid_M < min_m)
        throw GridTooCoarse("singular_set: M must be at least ceil(8 sqrt(2) pi sqrt(n))");
    const int M = grid_M;
    const int N = fs.multiplicity();
    const int hi_needed = 7 * N;  // count*8 > 7N  <=>  density > 7/8

    std::vector<u64> row_counts(M, 0);
    std::vector<double> row_min(M, 1.0);
    parallel_for(0, M, threads, [&](long j) {
        double x1 = (j + 0.5) / M;
        u64 cnt = 0;
        double mn = 1.0;
        for (int k = 0; k < M; ++k) {
            double x2 = (k + 0.5) / M;
            int pos = 0, neg = 0;
            double rsum = 0;
            for (const auto& p : fs.points) {
                double cs = std::cos(kTwoPi * (p.x * x1 + p.y * x2));
                rsum += cs;
                if (cs > 0.75) ++pos;
                else if (cs < -0.75) ++neg;
            }
            if (8 * pos > hi_needed || 8 * neg > hi_needed) {
                ++cnt;
                mn = std::min(mn, std::abs(rsum / N));
            }
        }
        row_counts[j] = cnt;
        row_min[j] = mn;
    });
    SingularSetReport rep;
    rep.n = fs.n;
    rep.M = M;
    for (int j = 0; j < M; ++j) rep.singular_square_count += row_counts[j];
    rep.measure_estimate =
        static_cast<double>(rep.singular_square_count) / (static_cast<double>(M) * M);
    rep.min_abs_r_on_b = 1.0;
    for (int j = 0; j < M; ++j) rep.min_abs_r_on_b = std::min(rep.min_abs_r_on_b, row_min[j]);
    return rep;
}

// ---- variance ----------------------------------------------------------------

VariancePrediction variance_prediction(const FrequencySet& fs) {
    VariancePrediction vp;
    double E = fs.energy();
    vp.mean_L = std::sqrt(E) / (2.0 * std::sqrt(2.0));
    double N = fs.multiplicity();
    vp.var_leading = c_n(fs) * E / (N * N);
    return vp;
}

double r5_error_scale(const FrequencySet& fs) {
    return fs.energy() * r_moment(fs, 5);
}

namespace {

// Mean of K2 - 1/4 over a square cell. A cell is refined only while it could
// contain an r = +-1 point: center value plus the gradient bound
// |grad r| <= sqrt(E) over the half-diagonal reaching past 0.995. Near such
// points K2 grows like 1/dist and the plain rectangle value misses spike mass.
double k2_cell_mean(const FrequencySet& fs, double cx1, double cx2, double h, int depth,
                    u64* skipped) {
    CovarianceJet jet = covariance_jet(fs, {cx1, cx2});
    // stop once the cell cannot close half the remaining gap to |r| = 1
    double margin = 0.7072 * std::sqrt(fs.energy()) * h;
    if (std::abs(jet.r) + 2.0 * margin <= 1.0 || depth >= 12) {
        try {
            ScaledPerturbation pert = perturbation(jet, fs.energy());
            return k2_exact(pert, K2Options{32, 0, 0, false}) - 0.25;
        } catch (const DegenerateConditioning&) {
            // counted, and replaced by the coalescing-point limit
            // K2 -> (2 + tr X) / (2 pi sqrt(1 - r^2)) where tr X -> -1
            ++*skipped;
            double omr = 1.0 - jet.r * jet.r;
            if (omr <= 1e-250) return 0.0;
            double E = fs.energy();
            double trx = -2.0 * (jet.d1 * jet.d1 + jet.d2 * jet.d2) / (E * omr);
            double prod = std::max(0.0, 2.0 + trx);
            return prod / (kTwoPi * std::sqrt(omr)) - 0.25;
        }
    }
    double q = h / 4;
    double acc = 0;
    for (int a : {-1, 1})
        for (int b : {-1, 1})
            acc += k2_cell_mean(fs, cx1 + a * q, cx2 + b * q, h / 2, depth + 1, skipped);
    return acc / 4.0;
}

}  // namespace

K2VarianceEstimate variance_via_k2(const FrequencySet& fs, int grid_M, int threads) {
    const double E = fs.energy();
    const int M = grid_M ? grid_M : singular_grid_m(fs.n);
    if (M < singular_grid_m(fs.n))
        throw GridTooCoarse("variance_via_k2: grid below the singular-square density");
    const int N = fs.multiplicity();
    const int hi_needed = 7 * N;
    const std::size_t mm = static_cast<std::size_t>(M) * M;
    std::vector<double> vals(mm, 0.0);
    std::vector<unsigned char> excluded(mm, 0);
    std::vector<u64> row_skipped(M, 0);
    // classification and covariance jet share one pass over the frequencies;
    // squares are tested at their centers, matching the singular-set report
    parallel_for(0, M, threads, [&](long j) {
        const double x1 = (j + 0.5) / M;
        for (int k = 0; k < M; ++k) {
            const double x2 = (k + 0.5) / M;
            std::size_t idx = static_cast<std::size_t>(j) * M + k;
            int pos = 0, neg = 0;
            double r = 0, d1 = 0, d2 = 0, h11 = 0, h12 = 0, h22 = 0;
            for (const auto& p : fs.points) {
                double phase = kTwoPi * (p.x * x1 + p.y * x2);
                double cs = std::cos(phase), sn = std::sin(phase);
                if (cs > 0.75) ++pos;
                else if (cs < -0.75) ++neg;
                r += cs;
                d1 += sn * p.x;
                d2 += sn * p.y;
                h11 += cs * static_cast<double>(p.x) * p.x;
                h12 += cs * static_cast<double>(p.x) * p.y;
                h22 += cs * static_cast<double>(p.y) * p.y;
            }
            if (8 * pos > hi_needed || 8 * neg > hi_needed) excluded[idx] = 1;
            double rr = r / N;
            if (std::abs(rr) + 1.4144 * std::sqrt(E) / M > 1.0) {
                vals[idx] = k2_cell_mean(fs, x1, x2, 1.0 / M, 0, &row_skipped[j]);
                continue;
            }
            CovarianceJet jet;
            jet.r = rr;
            jet.d1 = -kTwoPi * d1 / N;
            jet.d2 = -kTwoPi * d2 / N;
            double hw = -kTwoPi * kTwoPi / N;
            jet.H = Mat2{hw * h11, hw * h12, hw * h22};
            try {
                ScaledPerturbation pert = perturbation(jet, E);
                vals[idx] = k2_exact(pert, K2Options{32, 0, 0, false}) - 0.25;
            } catch (const DegenerateConditioning&) {
                ++row_skipped[j];
            }
        }
    });
    K2VarianceEstimate est;
    est.grid_M = M;
    est.prediction = variance_prediction(fs).var_leading;
    u64 excl = 0, skip = 0;
    for (auto e : excluded) excl += e;
    for (int j = 0; j < M; ++j) skip += row_skipped[j];
    est.excluded_measure = static_cast<double>(excl) / static_cast<double>(mm);
    est.skipped_points = skip;
    std::vector<double> nonsing(mm, 0.0), sing(mm, 0.0);
    for (std::size_t i = 0; i < mm; ++i) (excluded[i] ? sing : nonsing)[i] = vals[i];
    est.integral_nonsingular = (E / 2.0) * pairwise_mean(nonsing);
    est.integral_singular = (E / 2.0) * pairwise_mean(sing);
    est.ratio = (est.integral_nonsingular + est.integral_singular) / est.prediction;
    return est;
}

double taylor_envelope_max_ratio(const FrequencySet& fs, int npts, u64 seed, int threads) {
    const double E = fs.energy();
    // deterministic sample, oversampled so nonsingular rejection keeps npts
    std::vector<Point> pts;
    pts.reserve(npts);
    CounterRng rng(seed, 0x7a11);
    int guard = 0;
    while (static_cast<int>(pts.size()) < npts && guard < 100 * npts) {
        ++guard;
        Point x{rng.next_unit(), rng.next_unit()};
        CovarianceJet jet = covariance_jet(fs, x);
        if (std::abs(jet.r) >= 5.0 / 16.0) continue;
        pts.push_back(x);
    }
    std::vector<double> ratios(pts.size(), 0.0);
    parallel_for(0, static_cast<long>(pts.size()), threads, [&](long i) {
        CovarianceJet jet = covariance_jet(fs, pts[i]);
        try {
            ScaledPerturbation pert = perturbation(jet, E);
            double ke = k2_exact(pert);
            double kt = k2_taylor(pert);
            double r = std::abs(pert.r);
            double env = std::pow(r, 6.0) + std::pow(pert.X.frob(), 3.0) +
                         std::pow(pert.Y.frob(), 6.0);
            ratios[i] = std::abs(ke - kt) / env;
        } catch (const DegenerateConditioning&) {
            ratios[i] = 0.0;
        }
    });
    double mx = 0;
    for (double r : ratios) mx = std::max(mx, r);
    return mx;
}

}  // namespace arw
