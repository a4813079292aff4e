#include "arw/correlation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "arw/errors.hpp"
#include "arw/torus_grid.hpp"

namespace arw {

namespace {

// order-preserving packing of a lattice vector into 128 bits
u128 pack(const Vec2& v) {
    constexpr u64 off = u64(1) << 63;
    return (static_cast<u128>(static_cast<u64>(v.x) + off) << 64) |
           static_cast<u128>(static_cast<u64>(v.y) + off);
}

u64 sum_of_run_squares(std::vector<u128>& keys) {
    std::sort(keys.begin(), keys.end());
    u64 total = 0;
    std::size_t i = 0;
    while (i < keys.size()) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        u64 run = j - i;
        total += run * run;
        i = j;
    }
    return total;
}

// the 15 perfect matchings of {0,...,5}
constexpr std::array<std::array<int, 6>, 15> kMatchings = {{
    {0, 1, 2, 3, 4, 5}, {0, 1, 2, 4, 3, 5}, {0, 1, 2, 5, 3, 4},
    {0, 2, 1, 3, 4, 5}, {0, 2, 1, 4, 3, 5}, {0, 2, 1, 5, 3, 4},
    {0, 3, 1, 2, 4, 5}, {0, 3, 1, 4, 2, 5}, {0, 3, 1, 5, 2, 4},
    {0, 4, 1, 2, 3, 5}, {0, 4, 1, 3, 2, 5}, {0, 4, 1, 5, 2, 3},
    {0, 5, 1, 2, 3, 4}, {0, 5, 1, 3, 2, 4}, {0, 5, 1, 4, 2, 3},
}};

}  // namespace

u64 count_s4(const FrequencySet& fs) {
    u64 N = static_cast<u64>(fs.multiplicity());
    return 3 * N * N - 3 * N;
}

u64 count_s4_bruteforce(const FrequencySet& fs) {
    u64 count = 0;
    for (const auto& a : fs.points)
        for (const auto& b : fs.points)
            for (const auto& c : fs.points) {
                Vec2 need{-(a.x + b.x + c.x), -(a.y + b.y + c.y)};
                if (fs.contains(need)) ++count;
            }
    return count;
}

u64 count_s6(const FrequencySet& fs, int cap) {
    const int N = fs.multiplicity();
    if (N > cap)
        throw CapExceeded("count_s6: N = " + std::to_string(N) + " exceeds cap " +
                          std::to_string(cap));
    std::vector<u128> keys;
    keys.reserve(static_cast<std::size_t>(N) * N * N);
    for (const auto& a : fs.points)
        for (const auto& b : fs.points) {
            Vec2 ab = a + b;
            for (const auto& c : fs.points) keys.push_back(pack(ab + c));
        }
    return sum_of_run_squares(keys);
}

u64 count_s6_bruteforce(const FrequencySet& fs) {
    u64 count = 0;
    for (const auto& a : fs.points)
        for (const auto& b : fs.points)
            for (const auto& c : fs.points)
                for (const auto& d : fs.points)
                    for (const auto& e : fs.points) {
                        Vec2 need{-(a.x + b.x + c.x + d.x + e.x),
                                  -(a.y + b.y + c.y + d.y + e.y)};
                        if (fs.contains(need)) ++count;
                    }
    return count;
}

u64 diagonal_type_count(int N) {
    u64 n = static_cast<u64>(N);
    return 15 * n * n * n - 45 * n * n + 40 * n;
}

u64 diagonal_type_count_bruteforce(const FrequencySet& fs) {
    const auto& pts = fs.points;
    const int N = fs.multiplicity();
    std::vector<std::array<i64, 12>> tuples;
    tuples.reserve(static_cast<std::size_t>(15) * N * N * N);
    for (const auto& m : kMatchings) {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k) {
                    std::array<Vec2, 3> pick{pts[i], pts[j], pts[k]};
                    std::array<i64, 12> t{};
                    for (int pr = 0; pr < 3; ++pr) {
                        const Vec2& v = pick[pr];
                        t[2 * m[2 * pr]] = v.x;
                        t[2 * m[2 * pr] + 1] = v.y;
                        t[2 * m[2 * pr + 1]] = -v.x;
                        t[2 * m[2 * pr + 1] + 1] = -v.y;
                    }
                    tuples.push_back(t);
                }
    }
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    return tuples.size();
}

std::vector<Vec2> sumset_a(const FrequencySet& fs) {
    std::vector<Vec2> a;
    a.reserve(static_cast<std::size_t>(fs.multiplicity()) * fs.multiplicity());
    for (const auto& p : fs.points)
        for (const auto& q : fs.points) {
            Vec2 s = p + q;
            if (s.x != 0 || s.y != 0) a.push_back(s);
        }
    auto lex = [](const Vec2& u, const Vec2& v) {
        return u.x < v.x || (u.x == v.x && u.y < v.y);
    };
    std::sort(a.begin(), a.end(), lex);
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

u64 additive_energy(const FrequencySet& fs) {
    auto a = sumset_a(fs);
    std::vector<u128> keys;
    keys.reserve(a.size() * a.size());
    for (const auto& p : a)
        for (const auto& q : a) keys.push_back(pack(p + q));
    return sum_of_run_squares(keys);
}

double r_moment(const FrequencySet& fs, int k, int grid_M, int cap) {
    if (k < 2 || k > 6) throw Error("r_moment: k must lie in 2..6");
    const int N = fs.multiplicity();
    if (k == 2) return 1.0 / N;
    if (k == 4) {
        long double s4 = static_cast<long double>(count_s4(fs));
        long double n4 = std::pow(static_cast<long double>(N), 4);
        return static_cast<double>(s4 / n4);
    }
    if (k == 6) {
        long double s6 = static_cast<long double>(count_s6(fs, cap));
        long double n6 = std::pow(static_cast<long double>(N), 6);
        return static_cast<double>(s6 / n6);
    }
    // odd k: grid average of |r|^k with a doubling check
    const int min_m = 2 * k * static_cast<int>(isqrt_u64(fs.n) + 1) + 1;
    if (grid_M == 0) grid_M = min_m;
    if (grid_M < min_m)
        throw GridTooCoarse("r_moment: odd-k grid must satisfy M >= 2k ceil(sqrt n) + 1");
    auto avg_abs_pow = [&](int M) {
        M = next_smooth(M);
        auto r = r_grid(fs, M);
        std::vector<double> v(r.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            v[i] = std::pow(std::abs(r[i]), static_cast<double>(k));
        return pairwise_mean(v);
    };
    double coarse = avg_abs_pow(grid_M);
    double fine = avg_abs_pow(2 * grid_M);
    if (std::abs(fine - coarse) > 1e-3 * std::abs(fine))
        throw NotConverged("r_moment: odd-moment grid average did not settle");
    return fine;
}

CorrelationCensus correlation_census(const FrequencySet& fs, int cap, bool odd_moments) {
    CorrelationCensus c;
    c.n = fs.n;
    c.N = fs.multiplicity();
    c.s4_count = count_s4(fs);
    c.s6_count = count_s6(fs, cap);
    c.additive_energy = additive_energy(fs);
    c.r_moments[2] = r_moment(fs, 2);
    c.r_moments[4] = r_moment(fs, 4);
    c.r_moments[6] = static_cast<double>(c.s6_count) /
                     std::pow(static_cast<double>(c.N), 6.0);
    if (odd_moments) {
        c.r_moments[3] = r_moment(fs, 3);
        c.r_moments[5] = r_moment(fs, 5);
    }
    return c;
}

std::vector<S6ScanRow> s6_decay_scan(const EnergySequence& seq, int cap) {
    std::vector<S6ScanRow> rows;
    rows.reserve(seq.terms.size());
    for (std::size_t i = 0; i < seq.terms.size(); ++i) {
        FrequencySet fs = i < seq.term_factors.size()
                              ? enumerate_lambda_from_factorization(seq.term_factors[i])
                              : enumerate_lambda(seq.terms[i]);
        S6ScanRow row;
        row.n = fs.n;
        row.N = fs.multiplicity();
        row.s6 = count_s6(fs, cap);
        double nn = static_cast<double>(row.N);
        row.s6_over_n4 = static_cast<double>(row.s6) / (nn * nn * nn * nn);
        row.s6_over_n3 = static_cast<double>(row.s6) / (nn * nn * nn);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace arw
