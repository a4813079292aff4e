#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace arw {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

/// Exact floor(sqrt(n)) for 64-bit n. No floating-point misclassification.
u64 isqrt_u64(u64 n);

/// True iff n is a perfect square; optionally returns the root.
bool is_perfect_square(u64 n, u64* root = nullptr);

/// Smallest power of two >= x (x >= 1).
int next_pow2(int x);

/// Smallest 2^a * 3^b * 5^c >= x; FFT-friendly grid side.
int next_smooth(int x);

/// Deterministic pairwise (tree) summation. Result depends only on the
/// element order, never on threading or chunking done by the caller.
double pairwise_sum(std::span<const double> v);

/// Pairwise mean.
double pairwise_mean(std::span<const double> v);

/// Sample statistics with deterministic reduction.
struct SampleStats {
    std::size_t count = 0;
    double mean = 0;
    double var = 0;       // unbiased
    double se_mean = 0;   // sd/sqrt(count)
    double se_var = 0;    // fourth-moment formula
};
SampleStats sample_stats(std::span<const double> v);

/// long double value of a signed 128-bit integer.
long double to_ld(i128 v);

}  // namespace arw
