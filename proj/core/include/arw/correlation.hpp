#pragma once

#include <map>
#include <vector>

#include "arw/lattice.hpp"

namespace arw {

/// |S_4(n)| via the three-pairings closed form 3N^2 - 3N.
u64 count_s4(const FrequencySet& fs);

/// O(N^3) oracle: hash the negated pair sums. Meant for small N.
u64 count_s4_bruteforce(const FrequencySet& fs);

/// |S_6(n)| via the 3-fold sum convolution: r3(v) = #{(l1,l2,l3): sum = v},
/// |S_6| = sum_v r3(v)^2 (valid since Lambda = -Lambda). O(N^3) time/space.
/// Throws CapExceeded when N > cap.
u64 count_s6(const FrequencySet& fs, int cap = 256);

/// O(N^5) membership oracle. Meant for N <= 16.
u64 count_s6_bruteforce(const FrequencySet& fs);

/// Number of 6-tuples admitting a perfect matching into zero-sum pairs,
/// as a function of N alone: 15N^3 - 45N^2 + 40N.
u64 diagonal_type_count(int N);

/// Oracle for the above: materialize the union over the 15 matchings.
u64 diagonal_type_count_bruteforce(const FrequencySet& fs);

/// A = (Lambda + Lambda) \ {0}, deduplicated.
std::vector<Vec2> sumset_a(const FrequencySet& fs);

/// E(A,A) = #{(y1,y2,y3,y4) in A^4 : y1+y2 = y3+y4} via representation counts.
u64 additive_energy(const FrequencySet& fs);

/// R_k(n) = integral over the torus of |r_n|^k.
/// Even k: exact from correlation counts (k=2: 1/N; k=4,6 from |S_k|).
/// Odd k: uniform-grid average with an M -> 2M convergence check
/// (relative shift < 1e-3, else NotConverged). grid_M = 0 picks the
/// smallest admissible grid 2k*ceil(sqrt n) + 1.
double r_moment(const FrequencySet& fs, int k, int grid_M = 0, int cap = 256);

struct CorrelationCensus {
    u64 n = 0;
    int N = 0;
    u64 s4_count = 0;
    u64 s6_count = 0;
    u64 additive_energy = 0;
    std::map<int, double> r_moments;  // k in {2,3,4,5,6}
};

CorrelationCensus correlation_census(const FrequencySet& fs, int cap = 256,
                                     bool odd_moments = true);

struct S6ScanRow {
    u64 n = 0;
    int N = 0;
    u64 s6 = 0;
    double s6_over_n4 = 0;
    double s6_over_n3 = 0;
};

std::vector<S6ScanRow> s6_decay_scan(const EnergySequence& seq, int cap = 256);

}  // namespace arw
