#pragma once

#include <stdexcept>
#include <string>

namespace arw {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// n has no representation as a sum of two squares (r2(n) = 0).
struct NotSumOfTwoSquares : Error {
    explicit NotSumOfTwoSquares(unsigned long long n)
        : Error("n = " + std::to_string(n) + " is not a sum of two squares") {}
};

/// A configured size cap (multiplicity, grid, ...) would be exceeded.
struct CapExceeded : Error {
    using Error::Error;
};

/// Gaussian conditioning degenerates (1 - r^2 below threshold, or Omega not PD).
struct DegenerateConditioning : Error {
    using Error::Error;
};

/// Grid too coarse for the requested operation.
struct GridTooCoarse : Error {
    using Error::Error;
};

/// A sampled field hit an exact zero at a grid point; the caller decides policy.
struct ExactZeroOnGrid : Error {
    using Error::Error;
};

/// Iterative refinement failed to meet its tolerance.
struct NotConverged : Error {
    using Error::Error;
};

/// A search ran out of candidates below its bound.
struct SearchExhausted : Error {
    using Error::Error;
};

}  // namespace arw
