#include "arw/numeric.hpp"

#include <cmath>
#include <cstddef>

namespace arw {

u64 isqrt_u64(u64 n) {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    // correct the floating seed in both directions
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

bool is_perfect_square(u64 n, u64* root) {
    u64 r = isqrt_u64(n);
    if (r * r != n) return false;
    if (root) *root = r;
    return true;
}

int next_pow2(int x) {
    int m = 1;
    while (m < x) m <<= 1;
    return m;
}

int next_smooth(int x) {
    for (int m = x;; ++m) {
        int v = m;
        while (v % 2 == 0) v /= 2;
        while (v % 3 == 0) v /= 3;
        while (v % 5 == 0) v /= 5;
        if (v == 1) return m;
    }
}

namespace {
double pairwise_sum_rec(const double* v, std::size_t len) {
    if (len <= 8) {
        double s = 0;
        for (std::size_t i = 0; i < len; ++i) s += v[i];
        return s;
    }
    std::size_t h = len / 2;
    return pairwise_sum_rec(v, h) + pairwise_sum_rec(v + h, len - h);
}
}  // namespace

double pairwise_sum(std::span<const double> v) {
    return pairwise_sum_rec(v.data(), v.size());
}

double pairwise_mean(std::span<const double> v) {
    if (v.empty()) return 0;
    return pairwise_sum(v) / static_cast<double>(v.size());
}

SampleStats sample_stats(std::span<const double> v) {
    SampleStats st;
    st.count = v.size();
    if (st.count == 0) return st;
    st.mean = pairwise_mean(v);
    if (st.count < 2) return st;
    std::vector<double> d2(st.count), d4(st.count);
    for (std::size_t i = 0; i < st.count; ++i) {
        double d = v[i] - st.mean;
        d2[i] = d * d;
        d4[i] = d2[i] * d2[i];
    }
    double nd = static_cast<double>(st.count);
    double m2 = pairwise_sum(d2) / nd;
    double m4 = pairwise_sum(d4) / nd;
    st.var = m2 * nd / (nd - 1);
    st.se_mean = std::sqrt(st.var / nd);
    // Var(s^2) ~ (m4 - m2^2 (n-3)/(n-1)) / n
    double vs2 = (m4 - m2 * m2 * (nd - 3) / (nd - 1)) / nd;
    st.se_var = vs2 > 0 ? std::sqrt(vs2) : 0;
    return st;
}

long double to_ld(i128 v) {
    return static_cast<long double>(v);
}

}  // namespace arw
