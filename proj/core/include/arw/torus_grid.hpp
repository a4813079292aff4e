#pragma once

#include <complex>
#include <vector>

#include "arw/lattice.hpp"

namespace arw {

/// In-place unnormalized backward 2-D transform:
/// buf[j0*M + j1] <- sum_k buf[k0*M + k1] e(+2pi i (k0 j0 + k1 j1)/M).
/// Single-threaded, deterministic; plans are cached per M and shared.
void fft_backward_2d(std::complex<double>* buf, int M);

/// r_n on the uniform M x M grid, row-major: out[j*M + k] = r(j/M, k/M).
/// Exact up to rounding for M > 2 sqrt(n) (frequencies embed injectively).
std::vector<double> r_grid(const FrequencySet& fs, int M);

/// r and its first and second derivatives on the grid (six scalar fields).
struct CovarianceGrids {
    int M = 0;
    std::vector<double> r, d1, d2, h11, h12, h22;
};
CovarianceGrids covariance_grids(const FrequencySet& fs, int M);

}  // namespace arw
