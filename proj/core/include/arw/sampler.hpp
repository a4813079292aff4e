#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "arw/lattice.hpp"

namespace arw {

/// One realization of the random wave, exact on an M x M torus grid.
/// The realization is determined by (seed, half-lattice order) alone, so the
/// same seed evaluated on finer grids samples the same function.
struct FieldGrid {
    u64 n = 0;
    int M = 0;
    u64 seed = 0;
    std::vector<Vec2> half_lattice;
    std::vector<double> coeff_cos;  // f(x) = sum_l cc cos(2pi<l,x>) + cs sin(2pi<l,x>)
    std::vector<double> coeff_sin;
    std::vector<double> values;     // row-major: values[j*M + k] = f(j/M, k/M)

    double evaluate(double x1, double x2) const;
};

/// Smallest admissible grid: exactness of the spectral embedding.
int min_grid_m(u64 n);

/// Default experiment grid: fine enough that the chord-length bias of the
/// extractor sits well below Monte Carlo standard errors at ~500 trials.
int default_grid_m(u64 n);

/// Draw coefficients from (seed, half-lattice order) and evaluate by placing
/// them on the integer frequency grid and applying a backward transform.
/// Throws GridTooCoarse for M <= 2 sqrt(n), ExactZeroOnGrid if any grid value
/// is exactly zero.
FieldGrid sample_field(const FrequencySet& fs, int grid_M, u64 seed);

/// Same realization by direct trigonometric summation (dual-path check).
FieldGrid sample_field_direct(const FrequencySet& fs, int grid_M, u64 seed);

/// Same sampling with a caller-chosen half-lattice order (basis tests).
FieldGrid sample_field_with_half(const FrequencySet& fs, int grid_M, u64 seed,
                                 std::vector<Vec2> half);

/// Nodal segments extracted by marching squares: crossings by linear
/// interpolation on sign-changing edges, saddle cells resolved by the exact
/// sign of the field at the cell center, toroidal wraparound included.
struct NodalExtraction {
    std::vector<std::array<double, 4>> segments;  // (x1,y1, x2,y2) per segment
    double total_length = 0;
    u64 saddle_cells = 0;
};

NodalExtraction nodal_length(const FieldGrid& grid);

struct ExperimentRecord {
    u64 n = 0;
    int N = 0;
    double E = 0;
    u64 seed = 0;
    int trials = 0;
    int grid_M = 0;
    double sample_mean_L = 0;
    double sample_var_L = 0;
    double se_mean = 0;
    double se_var = 0;
    double theory_mean = 0;
    double theory_var_leading = 0;
    double mu4 = 0;
    double c_n = 0;
    double r5_error_scale = 0;  // E * R_5(n); NaN when the grid pass is skipped
    int aborted_trials = 0;
    double wall_time_s = 0;  // informational; never serialized into record lines
};

/// Runs `trials` independent realizations with per-trial streams derived from
/// (seed, index); deterministic for fixed inputs at any thread count.
/// A trial hitting an exact zero on the grid is recorded as aborted; more
/// than 1% aborted trials fails the experiment.
ExperimentRecord run_experiment(const FrequencySet& fs, int trials, int grid_M, u64 seed,
                                int threads = 0);

/// CSV export: header row "n,M,seed", one data line, then M rows of M values.
void write_grid_csv(const FieldGrid& grid, std::ostream& os);

}  // namespace arw
