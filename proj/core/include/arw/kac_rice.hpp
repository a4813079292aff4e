#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "arw/lattice.hpp"

namespace arw {

/// Symmetric 2x2 matrix [[a, b], [b, c]].
struct Mat2 {
    double a = 0, b = 0, c = 0;

    double trace() const { return a + c; }
    double det() const { return a * c - b * b; }
    /// tr(M1 * M2) for symmetric factors
    static double trace_prod(const Mat2& m1, const Mat2& m2) {
        return m1.a * m2.a + 2.0 * m1.b * m2.b + m1.c * m2.c;
    }
    Mat2 mul(const Mat2& o) const {  // product of symmetric matrices (not symmetric in general)
        // used only inside trace expressions where symmetry is restored
        return Mat2{a * o.a + b * o.b, a * o.b + b * o.c, b * o.b + c * o.c};
    }
    double frob() const { return std::sqrt(a * a + 2 * b * b + c * c); }
};

using Point = std::array<double, 2>;

/// Covariance function value, gradient and Hessian at a torus point:
/// r = (1/N) sum cos(2pi <l,x>), D = -(2pi/N) sum sin(2pi <l,x>) l,
/// H = -(4pi^2/N) sum cos(2pi <l,x>) l^t l.
struct CovarianceJet {
    Point x{};
    double r = 0;
    double d1 = 0, d2 = 0;
    Mat2 H;
};

CovarianceJet covariance_jet(const FrequencySet& fs, Point x);

/// Scaled conditional-covariance perturbation:
/// X = -2/(E(1-r^2)) D^t D (rank <= 1, non-positive diagonal),
/// Y = -2/E (H + r/(1-r^2) D^t D), Omega = I + [[X,Y],[Y,X]].
struct ScaledPerturbation {
    Mat2 X, Y;
    double r = 0;
};

/// Throws DegenerateConditioning when 1 - r^2 < 1e-10.
ScaledPerturbation perturbation(const CovarianceJet& jet, double E);

std::array<std::array<double, 4>, 4> omega_matrix(const ScaledPerturbation& p);

/// Eigenvalues of a symmetric 4x4, ascending (cyclic Jacobi).
std::array<double, 4> sym4_eigenvalues(const std::array<std::array<double, 4>, 4>& m);

struct K2Options {
    int nodes = 96;        // per axis; doubled until agreement
    double tol = 1e-8;
    int max_nodes = 768;
    bool adaptive = true;  // false: single pass at `nodes`
};

/// Scaled two-point correlation K2 = E[|V1||V2|] / (2 pi sqrt(1-r^2)) with
/// (V1,V2) ~ N(0, Omega), by tensor Gauss quadrature of Berry's two-sided
/// difference integrand; the algebra is arranged so no catastrophic
/// cancellation occurs near the integration corner.
/// Throws DegenerateConditioning when Omega is not positive definite.
double k2_exact(const ScaledPerturbation& pert, const K2Options& opt = {});

/// 1/4 + L2 with the eleven-term intermediate-range polynomial in (r, X, Y).
double k2_taylor(const ScaledPerturbation& pert);

struct McEstimate {
    double mean = 0;
    double se = 0;
};

/// Monte Carlo path for K2: draws from Omega via its symmetric square root.
McEstimate k2_monte_carlo(const ScaledPerturbation& pert, u64 draws, u64 seed);

/// v(x) = r^2 - (2/E) D D^t + (1/E^2) tr H^2, the leading fluctuation term
/// whose zero-frequency component cancels.
double berry_cancellation_v(const FrequencySet& fs, Point x);

/// Same quantity as the double lattice sum
/// (4/N^2) sum_{l1,l2} cos^4(theta(l1,l2)/2) cos(2pi <l1+l2, x>).
double berry_cancellation_v_pairsum(const FrequencySet& fs, Point x);

// ---- integral identity suite -------------------------------------------

struct LemmaResult {
    std::string name;
    bool is_bound = false;     // true: quadrature <= bound_rhs asserted
    double exact = 0;          // closed-form lattice-sum value (exact rows)
    double quadrature = 0;     // torus-grid integral of the assembled field
    double leading = 0;        // published leading-order value
    double allowance = 0;      // |exact - leading| must stay within this
    double bound_rhs = 0;      // C * E^j * R6 for bound rows
};

/// All twelve exact integral identities plus the three sixth-moment bounds.
/// Grid chosen so the rectangle rule is exact for every trig-polynomial row.
std::vector<LemmaResult> lemma_integral_suite(const FrequencySet& fs, int threads = 0);

// ---- singular set --------------------------------------------------------

struct SingularSetReport {
    u64 n = 0;
    int M = 0;
    u64 singular_square_count = 0;
    double measure_estimate = 0;
    double min_abs_r_on_b = 0;  // NaN-free: 1.0 when no square is flagged
};

/// Center-test classification of M^2 squares: a square is positive-singular
/// when more than 7/8 of the frequencies have cos(2pi<l,center>) > 3/4
/// (mirrored for negative). grid_M = 0 picks ceil(8 sqrt(2) pi sqrt(n)), the
/// density at which the per-square cosine drift stays below 1/4.
SingularSetReport singular_set(const FrequencySet& fs, int grid_M = 0, int threads = 0);

int singular_grid_m(u64 n);

// ---- variance ------------------------------------------------------------

struct VariancePrediction {
    double mean_L = 0;         // sqrt(E) / (2 sqrt(2))
    double var_leading = 0;    // c_n E / N^2
};

VariancePrediction variance_prediction(const FrequencySet& fs);

/// E * R_5(n), the error scale accompanying the leading variance term.
double r5_error_scale(const FrequencySet& fs);

struct K2VarianceEstimate {
    int grid_M = 0;
    double integral_nonsingular = 0;  // (E/2) int over nonsingular squares of (K2 - 1/4)
    double integral_singular = 0;     // the singular squares' share, computed not bounded
    double excluded_measure = 0;      // measure of the singular squares
    double prediction = 0;            // c_n E / N^2
    double ratio = 0;                 // (nonsingular + singular) / prediction
    u64 skipped_points = 0;           // near-degenerate conditioning, omitted
};

/// Numeric Kac-Rice variance: (E/2) times the grid integral of K2 - 1/4 on the
/// singular-set grid, with singular squares (center test) accounted separately.
K2VarianceEstimate variance_via_k2(const FrequencySet& fs, int grid_M = 0, int threads = 0);

/// max over a uniform nonsingular sample of |k2_exact - k2_taylor| divided by
/// r^6 + |X|_F^3 + |Y|_F^6; the corpus-wide Taylor envelope statistic.
double taylor_envelope_max_ratio(const FrequencySet& fs, int npts, u64 seed, int threads = 0);

}  // namespace arw
