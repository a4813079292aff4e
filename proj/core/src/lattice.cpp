#include "arw/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arw/errors.hpp"

namespace arw {

namespace {

constexpr double kPi = std::numbers::pi;

// upper half-plane: angle in [0, pi)
bool upper_half(const Vec2& v) {
    return v.y > 0 || (v.y == 0 && v.x > 0);
}

struct ComplexI64 {
    i64 re = 1;
    i64 im = 0;
    ComplexI64 operator*(const ComplexI64& o) const {
        // magnitudes stay <= sqrt(n) < 2^32; products fit i128 comfortably
        i128 r = static_cast<i128>(re) * o.re - static_cast<i128>(im) * o.im;
        i128 i = static_cast<i128>(re) * o.im + static_cast<i128>(im) * o.re;
        return {static_cast<i64>(r), static_cast<i64>(i)};
    }
};

ComplexI64 pow_c(ComplexI64 z, int e) {
    ComplexI64 acc{1, 0};
    for (int i = 0; i < e; ++i) acc = acc * z;
    return acc;
}

void sort_canonical(std::vector<Vec2>& pts) {
    std::sort(pts.begin(), pts.end(), angle_less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

// the unique x >= y >= 0 with x^2 + y^2 = p
bool two_square_root(u64 p, u64& x, u64& y) {
    for (u64 b = 0; 2 * b * b <= p; ++b) {
        u64 rest = p - b * b;
        u64 r;
        if (is_perfect_square(rest, &r) && r >= b) {
            x = r;
            y = b;
            return true;
        }
    }
    return false;
}

}  // namespace

bool angle_less(const Vec2& a, const Vec2& b) {
    bool ua = upper_half(a), ub = upper_half(b);
    if (ua != ub) return ua;
    i128 cross = static_cast<i128>(a.x) * b.y - static_cast<i128>(a.y) * b.x;
    if (cross != 0) return cross > 0;
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

Factorization factorize(u64 n) {
    if (n == 0) throw Error("factorize: n must be positive");
    Factorization f;
    f.n = n;
    u64 m = n;
    auto strip = [&](u64 p) {
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e) f.factors.emplace_back(p, e);
    };
    strip(2);
    strip(3);
    for (u64 p = 5; p <= m / p; p += 6) {
        strip(p);
        if (p + 2 <= m / (p + 2)) strip(p + 2);
        else break;
    }
    if (m > 1) f.factors.emplace_back(m, 1);
    std::sort(f.factors.begin(), f.factors.end());
    return f;
}

bool is_prime(u64 p) {
    if (p < 2) return false;
    if (p < 4) return true;
    if (p % 2 == 0 || p % 3 == 0) return false;
    for (u64 d = 5; d <= p / d; d += 6) {
        if (p % d == 0 || p % (d + 2) == 0) return false;
    }
    return true;
}

u64 r2_from_factorization(const Factorization& f) {
    u64 prod = 4;
    for (auto [p, e] : f.factors) {
        if (p % 4 == 3) {
            if (e % 2 != 0) return 0;
        } else if (p % 4 == 1) {
            prod *= static_cast<u64>(e + 1);
        }
        // p = 2 contributes nothing
    }
    return prod;
}

u64 r2(u64 n) {
    return r2_from_factorization(factorize(n));
}

u64 r2_bruteforce(u64 n) {
    // scan unordered representations a <= b, expand sign/order multiplicity
    u64 count = 0;
    for (u64 a = 0; 2 * a * a <= n; ++a) {
        u64 b;
        if (is_perfect_square(n - a * a, &b)) {
            if (a == 0 && b == 0) continue;
            if (a == 0 || a == b)
                count += 4;
            else
                count += 8;
        }
    }
    return count;
}

double FrequencySet::energy() const {
    return 4.0 * kPi * kPi * static_cast<double>(n);
}

bool FrequencySet::contains(const Vec2& v) const {
    if (static_cast<u64>(dot(v, v)) != n) return false;
    auto it = std::lower_bound(points.begin(), points.end(), v, angle_less);
    return it != points.end() && *it == v;
}

std::vector<Vec2> FrequencySet::half_lattice() const {
    std::vector<Vec2> half;
    half.reserve(points.size() / 2);
    for (const auto& p : points) {
        if (p.x > 0 || (p.x == 0 && p.y > 0)) half.push_back(p);
    }
    return half;
}

FrequencySet enumerate_lambda_scan(u64 n) {
    std::vector<Vec2> pts;
    for (u64 a = 0; a * a <= n; ++a) {
        u64 b;
        if (is_perfect_square(n - a * a, &b)) {
            i64 ia = static_cast<i64>(a), ib = static_cast<i64>(b);
            pts.push_back({ia, ib});
            pts.push_back({-ia, ib});
            pts.push_back({ia, -ib});
            pts.push_back({-ia, -ib});
        }
    }
    sort_canonical(pts);
    if (pts.empty()) throw NotSumOfTwoSquares(n);
    return {n, std::move(pts)};
}

FrequencySet enumerate_lambda_from_factorization(const Factorization& f) {
    std::vector<ComplexI64> acc{{1, 0}};
    for (auto [p, e] : f.factors) {
        if (p % 4 == 3) {
            if (e % 2 != 0) throw NotSumOfTwoSquares(f.n);
            u64 q = 1;
            for (int i = 0; i < e / 2; ++i) q *= p;
            for (auto& z : acc) z = z * ComplexI64{static_cast<i64>(q), 0};
        } else if (p == 2) {
            for (auto& z : acc) z = z * pow_c({1, 1}, e);
        } else {
            u64 xp, yp;
            if (!two_square_root(p, xp, yp)) throw Error("split prime without a two-square root?");
            ComplexI64 zp{static_cast<i64>(xp), static_cast<i64>(yp)};
            ComplexI64 zc{static_cast<i64>(xp), -static_cast<i64>(yp)};
            std::vector<ComplexI64> next;
            next.reserve(acc.size() * (e + 1));
            for (int l = 0; l <= e; ++l) {
                ComplexI64 fac = pow_c(zp, e - l) * pow_c(zc, l);
                for (const auto& z : acc) next.push_back(z * fac);
            }
            acc = std::move(next);
        }
    }
    std::vector<Vec2> pts;
    pts.reserve(acc.size() * 4);
    for (const auto& z : acc) {
        Vec2 v{z.re, z.im};
        for (int k = 0; k < 4; ++k) {
            pts.push_back(v);
            v = v.rot90();
        }
    }
    sort_canonical(pts);
    return {f.n, std::move(pts)};
}

FrequencySet enumerate_lambda(u64 n) {
    if (n == 0) throw Error("enumerate_lambda: n must be positive");
    if (n <= 100'000'000ull) return enumerate_lambda_scan(n);
    auto f = factorize(n);
    if (r2_from_factorization(f) == 0) throw NotSumOfTwoSquares(n);
    return enumerate_lambda_from_factorization(f);
}

PrimeAngle prime_angle(u64 p) {
    if (p % 4 != 1 || !is_prime(p))
        throw Error("prime_angle: p = " + std::to_string(p) + " is not a prime = 1 (mod 4)");
    PrimeAngle pa;
    pa.p = p;
    if (!two_square_root(p, pa.x, pa.y)) throw Error("prime_angle: no representation found");
    pa.theta = std::atan2(static_cast<double>(pa.y), static_cast<double>(pa.x));
    return pa;
}

std::string to_string(SequenceKind k) {
    switch (k) {
        case SequenceKind::generic: return "generic";
        case SequenceKind::cilleruelo: return "cilleruelo";
        case SequenceKind::nu_a: return "nu_a";
    }
    return "?";
}

namespace {

// primes = 1 (mod 4) whose angle is strictly smaller than every previous one
struct ShrinkingAngleStream {
    u64 bound;
    u64 p = 1;
    double theta_min = 10.0;
    // returns false on exhaustion below bound
    bool next(PrimeAngle& out) {
        for (u64 c = p + 4;; c += 4) {
            if (c > bound) return false;
            if (!is_prime(c)) continue;
            PrimeAngle pa = prime_angle(c);
            if (pa.theta < theta_min) {
                p = c;
                theta_min = pa.theta;
                out = pa;
                return true;
            }
        }
    }
};

// mu_hat(4) of mu_{p^e}: sin(4(e+1)theta) / ((e+1) sin(4 theta))
double mu4_prime_power(double theta, int e) {
    return std::sin(4.0 * (e + 1) * theta) / ((e + 1) * std::sin(4.0 * theta));
}

bool pow_fits_u64(u64 p, int e, u64& out) {
    u128 acc = 1;
    for (int i = 0; i < e; ++i) {
        acc *= p;
        if (acc > static_cast<u128>(UINT64_MAX)) return false;
    }
    out = static_cast<u64>(acc);
    return true;
}

}  // namespace

EnergySequence build_sequence(SequenceKind kind, double a, int count, u64 search_bound) {
    if (count < 1) throw Error("build_sequence: count must be positive");
    EnergySequence seq;
    seq.kind = kind;
    seq.a = a;

    if (kind == SequenceKind::generic) {
        seq.target = "uniform measure on the circle; mu_hat(4) -> 0";
        u64 prod = 1;
        Factorization f;
        for (u64 p = 5; static_cast<int>(seq.terms.size()) < count; p += 4) {
            if (p > search_bound)
                throw SearchExhausted("generic: fewer than requested primes = 1 (mod 4) below bound");
            if (!is_prime(p)) continue;
            if (prod > UINT64_MAX / p)
                throw SearchExhausted("generic: next term exceeds 64-bit range");
            prod *= p;
            f.n = prod;
            f.factors.emplace_back(p, 1);
            seq.terms.push_back(prod);
            seq.term_factors.push_back(f);
        }
        return seq;
    }

    if (kind == SequenceKind::cilleruelo) {
        seq.target = "atomic measure at the fourth roots of unity; mu_hat(4) -> 1";
        ShrinkingAngleStream stream{search_bound};
        double prev_mu = 0.0;  // require mu_hat(4) > 0 from the first term on
        for (int k = 1; static_cast<int>(seq.terms.size()) < count; ++k) {
            PrimeAngle pa;
            bool found = false;
            while (stream.next(pa)) {
                double mu = mu4_prime_power(pa.theta, k);
                if (mu > prev_mu) {
                    u64 term;
                    if (!pow_fits_u64(pa.p, k, term))
                        throw SearchExhausted("cilleruelo: term exceeds 64-bit range");
                    seq.terms.push_back(term);
                    seq.term_factors.push_back({term, {{pa.p, k}}});
                    prev_mu = mu;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw SearchExhausted("cilleruelo: no suitable prime below bound");
        }
        return seq;
    }

    // nu_a
    if (!(a > 0.0 && a <= kPi / 4 + 1e-15))
        throw Error("nu_a: a must lie in (0, pi/4]");
    seq.target = "nu_a arc measure, half-width a; mu_hat(4) -> sin(4a)/(4a)";
    ShrinkingAngleStream stream{search_bound};
    int prev_e = 0;
    PrimeAngle pa;
    while (static_cast<int>(seq.terms.size()) < count) {
        if (!stream.next(pa))
            throw SearchExhausted("nu_a: no suitable prime below bound");
        int e = static_cast<int>(a / pa.theta);
        if (e <= prev_e) continue;  // multiplicities 4(e+1) must strictly increase
        u64 term;
        if (!pow_fits_u64(pa.p, e, term))
            throw SearchExhausted("nu_a: term exceeds 64-bit range");
        seq.terms.push_back(term);
        seq.term_factors.push_back({term, {{pa.p, e}}});
        prev_e = e;
    }
    return seq;
}

}  // namespace arw
