#pragma once

#include <map>
#include <vector>

#include "arw/lattice.hpp"

namespace arw {

/// Fourier coefficient of the angular measure of freqset at frequency k:
/// (1/N) sum_lambda (lambda/sqrt(n))^(-k), real by conjugation symmetry.
/// Exact Gaussian-integer arithmetic whenever the integer sums fit 128 bits
/// (then exactly 0 for k != 0 mod 4); double-precision angle sums otherwise.
double mu_hat(const FrequencySet& fs, int k);

/// Exact path only: numerator sum_lambda Re(lambda^|k|) and denominator
/// N * n^(|k|/2) for k = 0 (mod 4). Returns false if 128-bit overflow.
bool mu_hat_exact(const FrequencySet& fs, int k, i128* num, i128* den);

/// c_n = (1 + mu_hat(4)^2) / 512, always in [1/512, 1/256].
double c_n(const FrequencySet& fs);

/// Fourth moment of the cosine of the angle between two independent draws:
/// (1 / (N^2 n^4)) sum_{l1,l2} <l1,l2>^4, exact integer accumulation.
double B4_direct(const FrequencySet& fs);

/// Exact integer numerator of B4_direct (denominator N^2 n^4).
i128 B4_numerator(const FrequencySet& fs);

/// Fourier coefficients of the four-arc measure nu_a:
/// 1 at k = 0; sin(ka)/(ka) for k = 0 (mod 4), k != 0 (limit 1 at a = 0);
/// 0 otherwise. Requires a in [0, pi/4].
double nu_a_hat(double a, int k);

/// The limiting angular measure of a constructed sequence: four atoms at the
/// fourth roots of unity for a = 0, else uniform on four arcs of half-width a.
struct LimitMeasure {
    double a = 0;
    enum class Kind { atomic, arc_uniform } kind = Kind::atomic;

    static LimitMeasure of_half_width(double a_) {
        return {a_, a_ == 0 ? Kind::atomic : Kind::arc_uniform};
    }
    double hat(int k) const { return nu_a_hat(a, k); }
};

struct SpectralSummary {
    u64 n = 0;
    int N = 0;
    std::map<int, double> mu_hat;
    double c_n = 0;
    double B4 = 0;
};

SpectralSummary spectral_summary(const FrequencySet& fs, const std::vector<int>& ks = {4});

struct ConvergenceRow {
    u64 n = 0;
    int N = 0;
    std::map<int, double> mu_hat;
};

/// mu_hat(k) along the sequence terms, in order; the CLI renders this to show
/// the drift of mu_hat(4) toward the limit measure's coefficient.
std::vector<ConvergenceRow> convergence_report(const EnergySequence& seq,
                                               const std::vector<int>& k_list);

}  // namespace arw
