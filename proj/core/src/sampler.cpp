#include "arw/sampler.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>

#include "arw/errors.hpp"
#include "arw/kac_rice.hpp"
#include "arw/parallel.hpp"
#include "arw/rng.hpp"
#include "arw/spectral.hpp"
#include "arw/torus_grid.hpp"

namespace arw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t wrap_index(i64 v, int M) {
    i64 m = v % M;
    if (m < 0) m += M;
    return static_cast<std::size_t>(m);
}

// coefficients from the per-realization stream: two standard normals per
// half-lattice representative, in half-lattice order
void draw_coefficients(FieldGrid& g) {
    const std::size_t H = g.half_lattice.size();
    const double amp = std::sqrt(2.0 / (2.0 * static_cast<double>(H)));  // sqrt(2/N)
    g.coeff_cos.resize(H);
    g.coeff_sin.resize(H);
    CounterRng rng(g.seed, 0xf1e1d);
    for (std::size_t i = 0; i < H; ++i) {
        double b = rng.next_normal();
        double c = rng.next_normal();
        g.coeff_cos[i] = amp * b;
        g.coeff_sin[i] = -amp * c;
    }
}

void check_no_exact_zero(const FieldGrid& g) {
    for (double v : g.values)
        if (v == 0.0)
            throw ExactZeroOnGrid("sampled field hit an exact zero at a grid point");
}

}  // namespace

double FieldGrid::evaluate(double x1, double x2) const {
    double acc = 0;
    for (std::size_t i = 0; i < half_lattice.size(); ++i) {
        double phase = kTwoPi * (half_lattice[i].x * x1 + half_lattice[i].y * x2);
        acc += coeff_cos[i] * std::cos(phase) + coeff_sin[i] * std::sin(phase);
    }
    return acc;
}

int min_grid_m(u64 n) {
    return 2 * static_cast<int>(isqrt_u64(n)) + 1;
}

int default_grid_m(u64 n) {
    int base = 32 * static_cast<int>(isqrt_u64(n - 1) + 1);
    return next_pow2(std::max(32, base));
}

FieldGrid sample_field(const FrequencySet& fs, int grid_M, u64 seed) {
    if (grid_M <= 2 * static_cast<i64>(isqrt_u64(fs.n)))
        throw GridTooCoarse("sample_field: need M > 2 sqrt(n)");
    FieldGrid g;
    g.n = fs.n;
    g.M = grid_M;
    g.seed = seed;
    g.half_lattice = fs.half_lattice();
    draw_coefficients(g);

    const int M = grid_M;
    const std::size_t mm = static_cast<std::size_t>(M) * M;
    std::vector<std::complex<double>> buf(mm, 0.0);
    for (std::size_t i = 0; i < g.half_lattice.size(); ++i) {
        const Vec2& l = g.half_lattice[i];
        // z e(<l,x>) + conj(z) e(<-l,x>) = 2 Re(z) cos - 2 Im(z) sin
        std::complex<double> half_amp(g.coeff_cos[i] / 2.0, -g.coeff_sin[i] / 2.0);
        buf[wrap_index(l.x, M) * M + wrap_index(l.y, M)] += half_amp;
        buf[wrap_index(-l.x, M) * M + wrap_index(-l.y, M)] += std::conj(half_amp);
    }
    fft_backward_2d(buf.data(), M);
    g.values.resize(mm);
    for (std::size_t i = 0; i < mm; ++i) g.values[i] = buf[i].real();
    check_no_exact_zero(g);
    return g;
}

FieldGrid sample_field_direct(const FrequencySet& fs, int grid_M, u64 seed) {
    if (grid_M <= 2 * static_cast<i64>(isqrt_u64(fs.n)))
        throw GridTooCoarse("sample_field_direct: need M > 2 sqrt(n)");
    FieldGrid g;
    g.n = fs.n;
    g.M = grid_M;
    g.seed = seed;
    g.half_lattice = fs.half_lattice();
    draw_coefficients(g);
    g.values.resize(static_cast<std::size_t>(grid_M) * grid_M);
    for (int j = 0; j < grid_M; ++j)
        for (int k = 0; k < grid_M; ++k)
            g.values[static_cast<std::size_t>(j) * grid_M + k] =
                g.evaluate(static_cast<double>(j) / grid_M, static_cast<double>(k) / grid_M);
    check_no_exact_zero(g);
    return g;
}

FieldGrid sample_field_with_half(const FrequencySet& fs, int grid_M, u64 seed,
                                 std::vector<Vec2> half) {
    if (grid_M <= 2 * static_cast<i64>(isqrt_u64(fs.n)))
        throw GridTooCoarse("sample_field_with_half: need M > 2 sqrt(n)");
    FieldGrid g;
    g.n = fs.n;
    g.M = grid_M;
    g.seed = seed;
    g.half_lattice = std::move(half);
    draw_coefficients(g);

    const int M = grid_M;
    const std::size_t mm = static_cast<std::size_t>(M) * M;
    std::vector<std::complex<double>> buf(mm, 0.0);
    for (std::size_t i = 0; i < g.half_lattice.size(); ++i) {
        const Vec2& l = g.half_lattice[i];
        std::complex<double> half_amp(g.coeff_cos[i] / 2.0, -g.coeff_sin[i] / 2.0);
        buf[wrap_index(l.x, M) * M + wrap_index(l.y, M)] += half_amp;
        buf[wrap_index(-l.x, M) * M + wrap_index(-l.y, M)] += std::conj(half_amp);
    }
    fft_backward_2d(buf.data(), M);
    g.values.resize(mm);
    for (std::size_t i = 0; i < mm; ++i) g.values[i] = buf[i].real();
    check_no_exact_zero(g);
    return g;
}

NodalExtraction nodal_length(const FieldGrid& grid) {
    const int M = grid.M;
    const auto& v = grid.values;
    for (double val : v)
        if (val == 0.0) throw ExactZeroOnGrid("nodal_length: exact zero at a grid point");

    NodalExtraction ext;
    std::vector<double> lengths;
    lengths.reserve(1024);
    auto at = [&](int j, int k) {
        return v[static_cast<std::size_t>(j % M) * M + static_cast<std::size_t>(k % M)];
    };
    const double inv_m = 1.0 / M;
    for (int j = 0; j < M; ++j) {
        for (int k = 0; k < M; ++k) {
            double v00 = at(j, k), v10 = at(j + 1, k), v01 = at(j, k + 1), v11 = at(j + 1, k + 1);
            bool s00 = v00 > 0, s10 = v10 > 0, s01 = v01 > 0, s11 = v11 > 0;
            if (s00 == s10 && s00 == s01 && s00 == s11) continue;
            // local crossings, in cell units
            auto cross = [](double a, double b) { return a / (a - b); };
            auto emit = [&](double p1, double p2, double q1, double q2) {
                double gx1 = (j + p1) * inv_m, gy1 = (k + p2) * inv_m;
                double gx2 = (j + q1) * inv_m, gy2 = (k + q2) * inv_m;
                ext.segments.push_back({gx1, gy1, gx2, gy2});
                lengths.push_back(std::hypot(p1 - q1, p2 - q2) * inv_m);
            };
            // edge points: A on (00-10), B on (01-11), C on (00-01), D on (10-11)
            double ta = s00 != s10 ? cross(v00, v10) : -1;
            double tb = s01 != s11 ? cross(v01, v11) : -1;
            double tc = s00 != s01 ? cross(v00, v01) : -1;
            double td = s10 != s11 ? cross(v10, v11) : -1;
            int pattern = (s00 ? 1 : 0) | (s10 ? 2 : 0) | (s01 ? 4 : 0) | (s11 ? 8 : 0);
            if (pattern > 7) pattern = 15 - pattern;  // sign symmetry
            switch (pattern) {
                case 1:  // c00 isolated: A-C
                    emit(ta, 0, 0, tc);
                    break;
                case 2:  // c10 isolated: A-D
                    emit(ta, 0, 1, td);
                    break;
                case 4:  // c01 isolated: C-B
                    emit(0, tc, tb, 1);
                    break;
                case 7:  // c11 isolated (inverted): B-D
                    emit(tb, 1, 1, td);
                    break;
                case 3:  // bottom/top split along x2: C-D
                    emit(0, tc, 1, td);
                    break;
                case 5:  // left/right split along x1: A-B
                    emit(ta, 0, tb, 1);
                    break;
                case 6: {  // saddle: c10 and c01 on one side, c00/c11 on the other
                    ++ext.saddle_cells;
                    double fc = grid.evaluate((j + 0.5) * inv_m, (k + 0.5) * inv_m);
                    bool center_with_00 = (fc > 0) == s00;
                    if (center_with_00) {
                        emit(ta, 0, 1, td);   // isolate c10
                        emit(0, tc, tb, 1);   // isolate c01
                    } else {
                        emit(ta, 0, 0, tc);   // isolate c00
                        emit(tb, 1, 1, td);   // isolate c11
                    }
                    break;
                }
                default:
                    break;
            }
        }
    }
    ext.total_length = pairwise_sum(lengths);
    return ext;
}

ExperimentRecord run_experiment(const FrequencySet& fs, int trials, int grid_M, u64 seed,
                                int threads) {
    if (trials < 2) throw Error("run_experiment: trials must be at least 2");
    if (grid_M == 0) grid_M = default_grid_m(fs.n);
    auto t0 = std::chrono::steady_clock::now();

    std::vector<double> lengths(trials, 0.0);
    std::vector<unsigned char> aborted(trials, 0);
    parallel_for(0, trials, threads, [&](long t) {
        u64 trial_seed = mix_seed(seed, static_cast<u64>(t));
        try {
            FieldGrid g = sample_field(fs, grid_M, trial_seed);
            lengths[t] = nodal_length(g).total_length;
        } catch (const ExactZeroOnGrid&) {
            aborted[t] = 1;
        }
    });

    std::vector<double> ok;
    ok.reserve(trials);
    int aborts = 0;
    for (int t = 0; t < trials; ++t) {
        if (aborted[t]) ++aborts;
        else ok.push_back(lengths[t]);
    }
    if (100 * aborts > trials)
        throw Error("run_experiment: more than 1% of trials hit exact zeros");

    SampleStats st = sample_stats(ok);
    ExperimentRecord rec;
    rec.n = fs.n;
    rec.N = fs.multiplicity();
    rec.E = fs.energy();
    rec.seed = seed;
    rec.trials = trials;
    rec.grid_M = grid_M;
    rec.sample_mean_L = st.mean;
    rec.sample_var_L = st.var;
    rec.se_mean = st.se_mean;
    rec.se_var = st.se_var;
    VariancePrediction vp = variance_prediction(fs);
    rec.theory_mean = vp.mean_L;
    rec.theory_var_leading = vp.var_leading;
    rec.mu4 = mu_hat(fs, 4);
    rec.c_n = c_n(fs);
    rec.r5_error_scale = std::numeric_limits<double>::quiet_NaN();
    if (fs.n <= 20000) {
        try {
            rec.r5_error_scale = r5_error_scale(fs);
        } catch (const Error&) {
        }
    }
    rec.aborted_trials = aborts;
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

void write_grid_csv(const FieldGrid& grid, std::ostream& os) {
    os << "n,M,seed\n" << grid.n << ',' << grid.M << ',' << grid.seed << '\n';
    char buf[32];
    for (int j = 0; j < grid.M; ++j) {
        for (int k = 0; k < grid.M; ++k) {
            double val = grid.values[static_cast<std::size_t>(j) * grid.M + k];
            int len = std::snprintf(buf, sizeof buf, "%.17g", val);
            os.write(buf, len);
            os.put(k + 1 == grid.M ? '\n' : ',');
        }
    }
}

}  // namespace arw
