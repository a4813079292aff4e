#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "arw/errors.hpp"
#include "arw/kac_rice.hpp"
#include "arw/numeric.hpp"
#include "arw/rng.hpp"
#include "arw/sampler.hpp"

using namespace arw;

namespace {

FieldGrid synthetic_cos_x1(int M) {
    // f(x) = cos(2 pi x1): two vertical nodal circles of total length 2
    FieldGrid g;
    g.n = 1;
    g.M = M;
    g.seed = 0;
    g.half_lattice = {{1, 0}};
    g.coeff_cos = {1.0};
    g.coeff_sin = {0.0};
    g.values.resize(static_cast<std::size_t>(M) * M);
    for (int j = 0; j < M; ++j)
        for (int k = 0; k < M; ++k)
            g.values[static_cast<std::size_t>(j) * M + k] =
                std::cos(2 * std::numbers::pi * j / M);
    return g;
}

}  // namespace

TEST_CASE("field normalization: E[f^2] = 1") {
    auto fs = enumerate_lambda(25);
    const int M = 64;
    double acc = 0;
    const int seeds = 2000;
    for (int s = 0; s < seeds; ++s) {
        auto g = sample_field(fs, M, 1000 + s);
        double v = g.values[17 * M + 5];
        acc += v * v;
    }
    CHECK(std::abs(acc / seeds - 1.0) < 0.1);
}

TEST_CASE("field covariance matches r") {
    auto fs = enumerate_lambda(25);
    const int M = 64;
    Point x0{7.0 / M, 19.0 / M};
    double target = covariance_jet(fs, x0).r;
    double acc = 0, acc2 = 0;
    const int seeds = 2000;
    for (int s = 0; s < seeds; ++s) {
        auto g = sample_field(fs, M, 555000 + s);
        double prod = g.values[0] * g.values[7 * M + 19];
        acc += prod;
        acc2 += prod * prod;
    }
    double mean = acc / seeds;
    double se = std::sqrt(std::max(0.0, acc2 / seeds - mean * mean) / seeds);
    CHECK(std::abs(mean - target) <= 3 * se);
}

TEST_CASE("transform and direct paths agree") {
    auto fs = enumerate_lambda(65);
    auto a = sample_field(fs, 128, 2024);
    auto b = sample_field_direct(fs, 128, 2024);
    double worst = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("sampling is deterministic in the seed and sensitive to basis order") {
    auto fs = enumerate_lambda(25);
    auto a = sample_field(fs, 64, 99);
    auto b = sample_field(fs, 64, 99);
    CHECK(a.values == b.values);
    auto c = sample_field(fs, 64, 100);
    CHECK(a.values != c.values);

    auto half = fs.half_lattice();
    std::rotate(half.begin(), half.begin() + 1, half.end());
    auto d = sample_field_with_half(fs, 64, 99, half);
    CHECK(a.values != d.values);  // same law, different realization
}

TEST_CASE("basis independence of ensemble moments") {
    auto fs = enumerate_lambda(25);
    auto half = fs.half_lattice();
    std::reverse(half.begin(), half.end());
    const int seeds = 1500, M = 32;
    double s1 = 0, q1 = 0, s2 = 0, q2 = 0;
    for (int s = 0; s < seeds; ++s) {
        double va = sample_field(fs, M, 31000 + s).values[5 * M + 11];
        double vb = sample_field_with_half(fs, M, 31000 + s, half).values[5 * M + 11];
        s1 += va * va;
        q1 += va * va * va * va;
        s2 += vb * vb;
        q2 += vb * vb * vb * vb;
    }
    double m1 = s1 / seeds, m2 = s2 / seeds;
    double se1 = std::sqrt((q1 / seeds - m1 * m1) / seeds);
    double se2 = std::sqrt((q2 / seeds - m2 * m2) / seeds);
    CHECK(std::abs(m1 - m2) <= 3 * std::sqrt(se1 * se1 + se2 * se2));
}

TEST_CASE("stationarity: shifted second moments agree") {
    auto fs = enumerate_lambda(5);
    const int M = 32, seeds = 1500;
    // same lag, two anchor points
    double sa = 0, qa = 0, sb = 0, qb = 0;
    for (int s = 0; s < seeds; ++s) {
        auto g = sample_field(fs, M, 77000 + s);
        double pa = g.values[0] * g.values[3 * M + 4];
        double pb = g.values[11 * M + 9] * g.values[14 * M + 13];  // shifted by (11,9)
        sa += pa;
        qa += pa * pa;
        sb += pb;
        qb += pb * pb;
    }
    double ma = sa / seeds, mb = sb / seeds;
    double sea = std::sqrt((qa / seeds - ma * ma) / seeds);
    double seb = std::sqrt((qb / seeds - mb * mb) / seeds);
    CHECK(std::abs(ma - mb) <= 3 * std::sqrt(sea * sea + seb * seb));
}

TEST_CASE("nodal extraction: constant sign yields nothing") {
    FieldGrid g;
    g.n = 1;
    g.M = 8;
    g.half_lattice = {{1, 0}};
    g.coeff_cos = {0.0};
    g.coeff_sin = {0.0};
    g.values.assign(64, 1.0);
    auto ext = nodal_length(g);
    CHECK(ext.total_length == 0.0);
    CHECK(ext.segments.empty());
}

TEST_CASE("nodal extraction: two vertical circles") {
    auto ext = nodal_length(synthetic_cos_x1(64));
    CHECK(std::abs(ext.total_length - 2.0) < 1e-3);
    CHECK(ext.saddle_cells == 0);
    for (const auto& s : ext.segments) {
        // endpoints sit on grid edges, segments are vertical
        CHECK(s[0] == s[2]);
    }
}

TEST_CASE("nodal extraction refuses exact zeros") {
    FieldGrid g = synthetic_cos_x1(8);
    g.values[3] = 0.0;
    CHECK_THROWS_AS(nodal_length(g), ExactZeroOnGrid);
}

TEST_CASE("refinement convergence at modest grids") {
    auto fs = enumerate_lambda(25);
    int M = 8 * 5;  // 8 ceil(sqrt 25)
    for (u64 seed : {1ull, 2ull, 3ull}) {
        // same realization, finer evaluation grids
        double l1 = nodal_length(sample_field(fs, M, seed)).total_length;
        double l2 = nodal_length(sample_field(fs, 2 * M, seed)).total_length;
        CHECK(std::abs(l1 - l2) / l2 < 5e-3);
    }
}

TEST_CASE("doubling from the default grid moves lengths by far less than 0.5%") {
    auto fs = enumerate_lambda(25);
    int M = default_grid_m(25);
    for (u64 seed : {11ull, 12ull}) {
        double l1 = nodal_length(sample_field(fs, M, seed)).total_length;
        double l2 = nodal_length(sample_field(fs, 2 * M, seed)).total_length;
        CHECK(std::abs(l1 - l2) / l2 < 5e-3);
    }
}

TEST_CASE("grid preconditions") {
    auto fs = enumerate_lambda(25);
    CHECK_THROWS_AS(sample_field(fs, 10, 1), GridTooCoarse);  // needs M > 2 sqrt(n)
    CHECK(min_grid_m(25) == 11);
    CHECK(default_grid_m(1) == 32);
    CHECK(default_grid_m(25) == 256);
}

TEST_CASE("experiment records against closed-form mean") {
    auto l25 = enumerate_lambda(25);
    auto rec = run_experiment(l25, 500, 0, 7);
    CHECK(rec.aborted_trials == 0);
    CHECK(std::abs(rec.sample_mean_L - rec.theory_mean) <= 3 * rec.se_mean);
    CHECK(rec.theory_mean == doctest::Approx(11.10720734539591).epsilon(1e-12));

    auto l1 = enumerate_lambda(1);
    auto rec1 = run_experiment(l1, 500, 0, 7);
    CHECK(std::abs(rec1.sample_mean_L - rec1.theory_mean) <= 3 * rec1.se_mean);
    CHECK(rec1.theory_mean == doctest::Approx(2.221441469079183).epsilon(1e-12));
}

TEST_CASE("experiments are deterministic at any thread count") {
    auto fs = enumerate_lambda(25);
    auto a = run_experiment(fs, 60, 64, 5, 1);
    auto b = run_experiment(fs, 60, 64, 5, 4);
    CHECK(a.sample_mean_L == b.sample_mean_L);
    CHECK(a.sample_var_L == b.sample_var_L);
    CHECK(a.se_mean == b.se_mean);
    CHECK(a.se_var == b.se_var);
}

TEST_CASE("grid CSV export") {
    auto fs = enumerate_lambda(5);
    auto g = sample_field(fs, 8, 3);
    std::ostringstream os;
    write_grid_csv(g, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,M,seed");
    std::getline(in, line);
    CHECK(line == "5,8,3");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 7);
        ++rows;
    }
    CHECK(rows == 8);
}
