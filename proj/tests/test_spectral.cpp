#include <doctest.h>

#include <cmath>

#include "arw/errors.hpp"
#include "arw/spectral.hpp"

using namespace arw;

TEST_CASE("mu_hat exact values") {
    CHECK(mu_hat(enumerate_lambda(1), 4) == 1.0);

    auto l5 = enumerate_lambda(5);
    i128 num = 0, den = 0;
    REQUIRE(mu_hat_exact(l5, 4, &num, &den));
    CHECK(static_cast<long long>(num) == -56);  // 8 * Re((1+2i)^4) / ... = 8 * (-7)
    CHECK(static_cast<long long>(den) == 200);  // N * n^2
    CHECK(mu_hat(l5, 4) == doctest::Approx(-7.0 / 25.0).epsilon(1e-15));

    auto l25 = enumerate_lambda(25);
    REQUIRE(mu_hat_exact(l25, 4, &num, &den));
    // (4*625 + 8*(-527)) / (12 * 625)
    CHECK(static_cast<long long>(num) == 4 * 625 + 8 * (-527));
    CHECK(static_cast<long long>(den) == 12 * 625);
    CHECK(mu_hat(l25, 4) == doctest::Approx(-143.0 / 625.0).epsilon(1e-15));
}

TEST_CASE("symmetry annihilation and conjugation invariance") {
    for (u64 n = 1; n <= 10000; ++n) {
        if (r2(n) == 0) continue;
        auto fs = enumerate_lambda(n);
        for (int k : {1, 2, 3, 5, 6, 7, 9, 10}) {
            CHECK(std::abs(mu_hat(fs, k)) < 1e-12);
            if (k % 2 == 0) CHECK(mu_hat(fs, k) == 0.0);  // exact on the integer path
        }
        CHECK(mu_hat(fs, 4) == mu_hat(fs, -4));
        CHECK(mu_hat(fs, 8) == mu_hat(fs, -8));
    }
}

TEST_CASE("c_n values and range") {
    CHECK(c_n(enumerate_lambda(1)) == doctest::Approx(1.0 / 256.0).epsilon(1e-15));
    CHECK(c_n(enumerate_lambda(5)) == doctest::Approx(337.0 / 160000.0).epsilon(1e-15));
    for (u64 n : {1ull, 2ull, 5ull, 25ull, 65ull, 325ull, 1105ull, 32045ull}) {
        double c = c_n(enumerate_lambda(n));
        CHECK(c >= 1.0 / 512.0);
        CHECK(c <= 1.0 / 256.0);
    }
}

TEST_CASE("B4 identity, exact and floating") {
    auto l1 = enumerate_lambda(1);
    CHECK(B4_direct(l1) == doctest::Approx(0.5).epsilon(1e-15));
    auto l5 = enumerate_lambda(5);
    CHECK(B4_direct(l5) == doctest::Approx(3.0 / 8.0 + 49.0 / 5000.0).epsilon(1e-14));

    // 8 * sum <l1,l2>^4 = 3 N^2 n^4 + (sum Re l^4)^2, exactly in integers
    for (u64 n = 1; n <= 4000; ++n) {
        if (r2(n) == 0) continue;
        auto fs = enumerate_lambda(n);
        i128 m = 0, den = 0;
        REQUIRE(mu_hat_exact(fs, 4, &m, &den));
        i128 nn = static_cast<i128>(n);
        i128 n4 = nn * nn * nn * nn;
        i128 N = fs.multiplicity();
        CHECK(8 * B4_numerator(fs) == 3 * N * N * n4 + m * m);
    }
}

TEST_CASE("uniform-measure fourth moment") {
    // mu_hat(4) -> 0 corresponds to B4 -> 3/8
    auto fs = enumerate_lambda(32045);
    CHECK(B4_direct(fs) == doctest::Approx(3.0 / 8.0).epsilon(1e-3));
}

TEST_CASE("nu_a_hat closed form") {
    const double pi = 3.14159265358979323846;
    CHECK(nu_a_hat(0.0, 4) == 1.0);
    CHECK(std::abs(nu_a_hat(pi / 4, 4)) < 1e-15);
    CHECK(nu_a_hat(pi / 8, 4) == doctest::Approx(2.0 / pi).epsilon(1e-14));
    CHECK(nu_a_hat(0.2, 3) == 0.0);
    CHECK(nu_a_hat(0.2, 0) == 1.0);
    CHECK_THROWS_AS(nu_a_hat(-0.1, 4), Error);
    CHECK_THROWS_AS(nu_a_hat(1.0, 4), Error);

    // continuous interpolation from 1 at a=0 to 0 at a=pi/4, decreasing
    double prev = nu_a_hat(0.0, 4);
    for (int i = 1; i <= 64; ++i) {
        double a = (pi / 4) * i / 64.0;
        double v = nu_a_hat(a, 4);
        CHECK(v < prev);
        CHECK(std::abs(v - prev) < 0.05);
        prev = v;
    }
}

TEST_CASE("convergence reports track the limiting coefficients") {
    const double pi = 3.14159265358979323846;

    auto cil = build_sequence(SequenceKind::cilleruelo, 0, 5, 100000);
    auto rows = convergence_report(cil, {4});
    double prev = 0;
    for (const auto& row : rows) {
        CHECK(row.mu_hat.at(4) > prev);
        prev = row.mu_hat.at(4);
    }

    auto gen = build_sequence(SequenceKind::generic, 0, 4, 1000);
    rows = convergence_report(gen, {4});
    double prev_abs = 1;
    for (const auto& row : rows) {
        CHECK(std::abs(row.mu_hat.at(4)) < prev_abs);
        prev_abs = std::abs(row.mu_hat.at(4));
    }

    auto nua = build_sequence(SequenceKind::nu_a, pi / 8, 6, 1000);
    rows = convergence_report(nua, {4});
    double target = nu_a_hat(pi / 8, 4);
    CHECK(std::abs(rows.back().mu_hat.at(4) - target) < 0.05);
}

TEST_CASE("limit measures") {
    const double pi = 3.14159265358979323846;
    auto atomic = LimitMeasure::of_half_width(0.0);
    CHECK(atomic.kind == LimitMeasure::Kind::atomic);
    CHECK(atomic.hat(4) == 1.0);
    auto arcs = LimitMeasure::of_half_width(pi / 8);
    CHECK(arcs.kind == LimitMeasure::Kind::arc_uniform);
    CHECK(arcs.hat(4) == doctest::Approx(2.0 / pi).epsilon(1e-14));
    CHECK(arcs.hat(0) == 1.0);
    CHECK(arcs.hat(2) == 0.0);
}

TEST_CASE("spectral summary") {
    auto s = spectral_summary(enumerate_lambda(25));
    CHECK(s.N == 12);
    CHECK(s.mu_hat.at(4) == doctest::Approx(-0.2288).epsilon(1e-12));
    CHECK(s.c_n == doctest::Approx((1 + 0.2288 * 0.2288) / 512).epsilon(1e-12));
    CHECK(std::abs(s.B4 - 3.0 / 8 - s.mu_hat.at(4) * s.mu_hat.at(4) / 8) < 1e-12);
}
