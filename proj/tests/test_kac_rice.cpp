#include <doctest.h>

#include <cmath>
#include <numbers>

#include "arw/errors.hpp"
#include "arw/kac_rice.hpp"
#include "arw/correlation.hpp"
#include "arw/quadrature.hpp"
#include "arw/rng.hpp"
#include "arw/spectral.hpp"
#include "arw/torus_grid.hpp"

using namespace arw;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("covariance jet at special points") {
    auto l25 = enumerate_lambda(25);
    auto jet = covariance_jet(l25, {0.0, 0.0});
    double E = l25.energy();
    CHECK(jet.r == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(jet.d1) < 1e-10);
    CHECK(std::abs(jet.d2) < 1e-10);
    CHECK(jet.H.a == doctest::Approx(-E / 2).epsilon(1e-12));
    CHECK(jet.H.c == doctest::Approx(-E / 2).epsilon(1e-12));
    CHECK(std::abs(jet.H.b) < 1e-8 * E);

    auto l1 = enumerate_lambda(1);
    CHECK(covariance_jet(l1, {0.5, 0.5}).r == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("Laplace identity tr H = -E r") {
    for (u64 n : {5ull, 65ull, 1105ull}) {
        auto fs = enumerate_lambda(n);
        double E = fs.energy();
        CounterRng rng(99 + n, 3);
        for (int i = 0; i < 100; ++i) {
            auto jet = covariance_jet(fs, {rng.next_unit(), rng.next_unit()});
            CHECK(std::abs(jet.H.trace() + E * jet.r) <= 1e-10 * E);
        }
    }
}

TEST_CASE("jet matches finite differences") {
    auto fs = enumerate_lambda(65);
    const double h = 1e-5;
    CounterRng rng(7, 1);
    for (int i = 0; i < 20; ++i) {
        Point x{rng.next_unit(), rng.next_unit()};
        auto jet = covariance_jet(fs, x);
        auto rat = [&](double dx1, double dx2) {
            return covariance_jet(fs, {x[0] + dx1, x[1] + dx2}).r;
        };
        double d1 = (rat(h, 0) - rat(-h, 0)) / (2 * h);
        double d2 = (rat(0, h) - rat(0, -h)) / (2 * h);
        double scale = 2 * kPi * std::sqrt(65.0);  // gradient magnitude scale
        CHECK(std::abs(d1 - jet.d1) < 1e-5 * scale);
        CHECK(std::abs(d2 - jet.d2) < 1e-5 * scale);
        double h11 = (rat(h, 0) - 2 * rat(0, 0) + rat(-h, 0)) / (h * h);
        double h22 = (rat(0, h) - 2 * rat(0, 0) + rat(0, -h)) / (h * h);
        double h12 = (rat(h, h) - rat(h, -h) - rat(-h, h) + rat(-h, -h)) / (4 * h * h);
        double hscale = fs.energy();
        CHECK(std::abs(h11 - jet.H.a) < 1e-3 * hscale);
        CHECK(std::abs(h22 - jet.H.c) < 1e-3 * hscale);
        CHECK(std::abs(h12 - jet.H.b) < 1e-3 * hscale);
    }
}

TEST_CASE("perturbation structure") {
    auto fs = enumerate_lambda(25);
    double E = fs.energy();
    CHECK_THROWS_AS(perturbation(covariance_jet(fs, {0.0, 0.0}), E), DegenerateConditioning);

    CounterRng rng(11, 5);
    int tested = 0;
    for (int i = 0; i < 1000; ++i) {
        Point x{rng.next_unit(), rng.next_unit()};
        auto jet = covariance_jet(fs, x);
        if (1 - jet.r * jet.r < 1e-10) continue;
        auto p = perturbation(jet, E);
        ++tested;
        // X negative semidefinite of rank <= 1
        CHECK(p.X.a <= 1e-15);
        CHECK(p.X.c <= 1e-15);
        CHECK(std::abs(p.X.det()) < 1e-12);
        CHECK(p.X.trace() <= 0);
        auto om = omega_matrix(p);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) CHECK(om[a][b] == om[b][a]);
        auto ev = sym4_eigenvalues(om);
        CHECK(std::isfinite(ev[0]));
    }
    CHECK(tested > 900);

    // zero perturbation: Omega = I
    ScaledPerturbation zero;
    auto om = omega_matrix(zero);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(om[a][b] == (a == b ? 1.0 : 0.0));
}

TEST_CASE("k2 engine: independence value and elementary integrals") {
    ScaledPerturbation zero;
    CHECK(std::abs(k2_exact(zero) - 0.25) < 1e-8);

    CHECK(integrate_t32([](double t) { return t / (1 + t); }, 96) ==
          doctest::Approx(kPi).epsilon(1e-10));
    CHECK(integrate_t32([](double t) { return t / ((1 + t) * (1 + t)); }, 96) ==
          doctest::Approx(kPi / 2).epsilon(1e-10));
    CHECK(integrate_t32([](double t) { return t * t / std::pow(1 + t, 3.0); }, 96) ==
          doctest::Approx(kPi / 8).epsilon(1e-10));
}

TEST_CASE("k2 taylor polynomial values") {
    ScaledPerturbation p;
    CHECK(k2_taylor(p) == 0.25);
    p.r = 0.1;
    CHECK(k2_taylor(p) == doctest::Approx(0.25 * (1 + 0.005 + 3.0 / 8 * 1e-4)).epsilon(1e-14));
}

TEST_CASE("k2 exact vs taylor for a small perturbation") {
    const double eps = 1e-3;
    ScaledPerturbation p;
    p.X = Mat2{-eps, 0, 0};
    double ke = k2_exact(p);
    double kt = k2_taylor(p);
    CHECK(std::abs(ke - kt) < 5 * eps * eps);
    CHECK(ke < 0.25);  // negative trace contracts the correlation
}

TEST_CASE("k2 exact agrees with the Monte Carlo path") {
    auto fs = enumerate_lambda(25);
    for (Point x : {Point{0.123, 0.277}, Point{0.31, 0.057}}) {
        auto pert = perturbation(covariance_jet(fs, x), fs.energy());
        double ke = k2_exact(pert);
        auto mc = k2_monte_carlo(pert, 1'000'000, 424242);
        CHECK(std::abs(ke - mc.mean) <= 3.0 * mc.se);
    }
}

TEST_CASE("degenerate omega rejected") {
    ScaledPerturbation p;
    p.X = Mat2{-1.0, 0, -1.0};  // Omega has a zero eigenvalue
    CHECK_THROWS_AS(k2_exact(p), DegenerateConditioning);
}

TEST_CASE("berry cancellation function") {
    auto l25 = enumerate_lambda(25);
    CHECK(berry_cancellation_v(l25, {0.0, 0.0}) == doctest::Approx(1.5).epsilon(1e-12));

    // dual-path agreement at random points
    auto l65 = enumerate_lambda(65);
    CounterRng rng(31, 9);
    for (int i = 0; i < 100; ++i) {
        Point x{rng.next_unit(), rng.next_unit()};
        CHECK(std::abs(berry_cancellation_v(l65, x) - berry_cancellation_v_pairsum(l65, x)) <
              1e-10);
    }

    // the integral of v vanishes: exact-quadrature grid mean
    int M = next_smooth(4 * static_cast<int>(isqrt_u64(25) + 1) + 2);
    auto g = covariance_grids(l25, M);
    double E = l25.energy();
    std::vector<double> v(g.r.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double dd = g.d1[i] * g.d1[i] + g.d2[i] * g.d2[i];
        double trH2 = g.h11[i] * g.h11[i] + 2 * g.h12[i] * g.h12[i] + g.h22[i] * g.h22[i];
        v[i] = g.r[i] * g.r[i] - 2 / E * dd + trH2 / (E * E);
    }
    CHECK(std::abs(pairwise_mean(v)) < 1e-8);
}

TEST_CASE("lemma integral suite passes for small corpus") {
    for (u64 n : {5ull, 65ull}) {
        auto fs = enumerate_lambda(n);
        for (const auto& row : lemma_integral_suite(fs)) {
            INFO("n=", n, " row=", row.name);
            if (row.is_bound) {
                CHECK(row.quadrature <= row.bound_rhs);
            } else {
                CHECK(std::abs(row.quadrature - row.exact) <=
                      1e-8 * std::max(1e-300, std::abs(row.exact)));
                CHECK(std::abs(row.exact - row.leading) <= row.allowance * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("singular set report") {
    auto fs = enumerate_lambda(25);
    auto rep = singular_set(fs);
    CHECK(rep.singular_square_count > 0);  // the square containing x = 0
    CHECK(rep.min_abs_r_on_b >= 5.0 / 16.0);
    CHECK(rep.measure_estimate <= 1.0 * r_moment(fs, 6));
    CHECK_THROWS_AS(singular_set(fs, 10), GridTooCoarse);
}

TEST_CASE("variance prediction closed forms") {
    auto l25 = enumerate_lambda(25);
    CHECK(variance_prediction(l25).mean_L ==
          doctest::Approx(5 * kPi / std::sqrt(2.0)).epsilon(1e-14));
    auto l1 = enumerate_lambda(1);
    CHECK(variance_prediction(l1).var_leading ==
          doctest::Approx(kPi * kPi / 1024.0).epsilon(1e-14));
    auto l65 = enumerate_lambda(65);
    double mu = 833.0 / 4225.0;
    CHECK(variance_prediction(l65).var_leading ==
          doctest::Approx((1 + mu * mu) / 512.0 * l65.energy() / 256.0).epsilon(1e-13));
}

TEST_CASE("taylor envelope stays bounded at n=65") {
    auto fs = enumerate_lambda(65);
    CHECK(taylor_envelope_max_ratio(fs, 200, 5150) < 0.05);
}
