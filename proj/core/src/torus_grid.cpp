#include "arw/torus_grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>

#include "arw/errors.hpp"

namespace arw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// One cached plan per grid side. Plans are created UNALIGNED so they can be
// executed on any buffer via the new-array interface; execution is
// thread-safe, creation is serialized.
fftw_plan plan_for(int M) {
    static std::mutex mu;
    static std::map<int, fftw_plan>* cache = new std::map<int, fftw_plan>();
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache->find(M);
    if (it != cache->end()) return it->second;
    fftw_complex* tmp = fftw_alloc_complex(static_cast<std::size_t>(M) * M);
    fftw_plan p = fftw_plan_dft_2d(M, M, tmp, tmp, FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(tmp);
    if (!p) throw Error("fftw plan creation failed");
    (*cache)[M] = p;
    return p;
}

inline std::size_t wrap_index(i64 v, int M) {
    i64 m = v % M;
    if (m < 0) m += M;
    return static_cast<std::size_t>(m);
}

}  // namespace

void fft_backward_2d(std::complex<double>* buf, int M) {
    fftw_plan p = plan_for(M);
    auto* raw = reinterpret_cast<fftw_complex*>(buf);
    fftw_execute_dft(p, raw, raw);
}

std::vector<double> r_grid(const FrequencySet& fs, int M) {
    if (M <= 2 * static_cast<i64>(isqrt_u64(fs.n)))
        throw GridTooCoarse("r_grid: need M > 2 sqrt(n)");
    const std::size_t mm = static_cast<std::size_t>(M) * M;
    std::vector<std::complex<double>> buf(mm, 0.0);
    const double w = 1.0 / fs.multiplicity();
    for (const auto& p : fs.points)
        buf[wrap_index(p.x, M) * M + wrap_index(p.y, M)] += w;
    fft_backward_2d(buf.data(), M);
    std::vector<double> out(mm);
    for (std::size_t i = 0; i < mm; ++i) out[i] = buf[i].real();
    return out;
}

CovarianceGrids covariance_grids(const FrequencySet& fs, int M) {
    if (M <= 2 * static_cast<i64>(isqrt_u64(fs.n)))
        throw GridTooCoarse("covariance_grids: need M > 2 sqrt(n)");
    const std::size_t mm = static_cast<std::size_t>(M) * M;
    CovarianceGrids g;
    g.M = M;
    const double invN = 1.0 / fs.multiplicity();

    // coefficient of e(<lambda, x>) in each field:
    //   r: 1/N; d_i: 2 pi i lambda_i / N; h_ij: -4 pi^2 lambda_i lambda_j / N
    auto build = [&](auto coeff) {
        std::vector<std::complex<double>> buf(mm, 0.0);
        for (const auto& p : fs.points)
            buf[wrap_index(p.x, M) * M + wrap_index(p.y, M)] += coeff(p);
        fft_backward_2d(buf.data(), M);
        std::vector<double> out(mm);
        for (std::size_t i = 0; i < mm; ++i) out[i] = buf[i].real();
        return out;
    };

    using C = std::complex<double>;
    g.r = build([&](const Vec2&) { return C(invN, 0); });
    g.d1 = build([&](const Vec2& p) { return C(0, kTwoPi * p.x * invN); });
    g.d2 = build([&](const Vec2& p) { return C(0, kTwoPi * p.y * invN); });
    const double hw = -kTwoPi * kTwoPi * invN;
    g.h11 = build([&](const Vec2& p) { return C(hw * p.x * p.x, 0); });
    g.h12 = build([&](const Vec2& p) { return C(hw * p.x * p.y, 0); });
    g.h22 = build([&](const Vec2& p) { return C(hw * p.y * p.y, 0); });
    return g;
}

}  // namespace arw
