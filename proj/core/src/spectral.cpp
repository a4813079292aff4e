#include "arw/spectral.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "arw/errors.hpp"

namespace arw {

namespace {

constexpr double kPi = std::numbers::pi;

// |a*b| with overflow detection, accumulating Gaussian-integer powers
struct ComplexI128 {
    i128 re = 1;
    i128 im = 0;
};

bool mul_checked(i128 a, i128 b, i128& out) {
    return !__builtin_mul_overflow(a, b, &out);
}

bool add_checked(i128 a, i128 b, i128& out) {
    return !__builtin_add_overflow(a, b, &out);
}

bool cmul(const ComplexI128& a, const ComplexI128& b, ComplexI128& out) {
    i128 t1, t2, t3, t4;
    if (!mul_checked(a.re, b.re, t1) || !mul_checked(a.im, b.im, t2) ||
        !mul_checked(a.re, b.im, t3) || !mul_checked(a.im, b.re, t4))
        return false;
    return add_checked(t1, -t2, out.re) && add_checked(t3, t4, out.im);
}

// n^(k/2) for even k, with overflow detection
bool n_halfpow(u64 n, int k, i128& out) {
    out = 1;
    for (int i = 0; i < k / 2; ++i) {
        if (!mul_checked(out, static_cast<i128>(n), out)) return false;
    }
    return true;
}

}  // namespace

bool mu_hat_exact(const FrequencySet& fs, int k, i128* num, i128* den) {
    int ka = std::abs(k);
    if (ka % 2 != 0) return false;  // n^(k/2) not an integer
    i128 d;
    if (!n_halfpow(fs.n, ka, d)) return false;

    i128 sum_re = 0, sum_im = 0;
    for (const auto& p : fs.points) {
        ComplexI128 z{p.x, p.y}, acc{1, 0};
        for (int i = 0; i < ka; ++i) {
            if (!cmul(acc, z, acc)) return false;
        }
        if (!add_checked(sum_re, acc.re, sum_re)) return false;
        if (!add_checked(sum_im, acc.im, sum_im)) return false;
    }
    if (sum_im != 0) throw Error("mu_hat_exact: imaginary part must vanish by symmetry");
    if (num) *num = sum_re;
    if (den) *den = d * fs.multiplicity();
    return true;
}

double mu_hat(const FrequencySet& fs, int k) {
    if (k == 0) return 1.0;
    // iz-invariance kills every k != 0 (mod 4)
    int ka = std::abs(k);
    i128 num, den;
    if (ka % 2 == 0 && mu_hat_exact(fs, ka, &num, &den)) {
        if (ka % 4 != 0 && num != 0)
            throw Error("mu_hat: nonzero coefficient at k != 0 mod 4");
        return static_cast<double>(to_ld(num) / to_ld(den));
    }
    // floating-point fallback for large n or odd k
    double sr = 0, si = 0;
    for (const auto& p : fs.points) {
        double th = std::atan2(static_cast<double>(p.y), static_cast<double>(p.x));
        sr += std::cos(ka * th);
        si += std::sin(ka * th);
    }
    (void)si;  // vanishes by symmetry; sr/N is the coefficient
    return sr / fs.multiplicity();
}

double c_n(const FrequencySet& fs) {
    double m = mu_hat(fs, 4);
    return (1.0 + m * m) / 512.0;
}

i128 B4_numerator(const FrequencySet& fs) {
    i128 sum = 0;
    for (const auto& a : fs.points) {
        for (const auto& b : fs.points) {
            i128 d = dot(a, b);
            sum += d * d * d * d;
        }
    }
    return sum;
}

double B4_direct(const FrequencySet& fs) {
    long double num = to_ld(B4_numerator(fs));
    long double n4 = 1;
    for (int i = 0; i < 4; ++i) n4 *= static_cast<long double>(fs.n);
    long double den = n4 * fs.multiplicity() * fs.multiplicity();
    return static_cast<double>(num / den);
}

double nu_a_hat(double a, int k) {
    if (a < 0 || a > kPi / 4 + 1e-15) throw Error("nu_a_hat: a must lie in [0, pi/4]");
    if (k == 0) return 1.0;
    if (k % 4 != 0) return 0.0;
    double ka = k * a;
    if (std::abs(ka) < 1e-12) return 1.0;
    return std::sin(ka) / ka;
}

SpectralSummary spectral_summary(const FrequencySet& fs, const std::vector<int>& ks) {
    SpectralSummary s;
    s.n = fs.n;
    s.N = fs.multiplicity();
    for (int k : ks) s.mu_hat[k] = mu_hat(fs, k);
    if (!s.mu_hat.count(4)) s.mu_hat[4] = mu_hat(fs, 4);
    s.c_n = (1.0 + s.mu_hat[4] * s.mu_hat[4]) / 512.0;
    s.B4 = B4_direct(fs);
    return s;
}

std::vector<ConvergenceRow> convergence_report(const EnergySequence& seq,
                                               const std::vector<int>& k_list) {
    std::vector<ConvergenceRow> rows;
    rows.reserve(seq.terms.size());
    for (std::size_t i = 0; i < seq.terms.size(); ++i) {
        FrequencySet fs = i < seq.term_factors.size()
                              ? enumerate_lambda_from_factorization(seq.term_factors[i])
                              : enumerate_lambda(seq.terms[i]);
        ConvergenceRow row;
        row.n = fs.n;
        row.N = fs.multiplicity();
        for (int k : k_list) row.mu_hat[k] = mu_hat(fs, k);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace arw
