#include "distcell/phase_corr.hpp"

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace distcell {

namespace {

std::mutex g_plan_mutex; // FFTW plan creation is not thread-safe

struct Plans {
    fftw_plan fwd_a, fwd_b, inv;
};

} // namespace

std::array<int, 3> estimate_shift(const Grid<float>& a, const Grid<float>& b) {
    const Shape& s = a.shape();
    if (b.shape() != s)
        throw std::invalid_argument("estimate_shift: crops must share shape");
    const bool two_d = s.nz() == 1;
    if ((!two_d && s.nz() < 8) || s.ny() < 8 || s.nx() < 8)
        throw std::invalid_argument("estimate_shift: crops must be >= 8 px per axis");

    const std::int64_t n = s.size();
    std::vector<std::complex<double>> fa(n), fb(n), cross(n);
    for (std::int64_t i = 0; i < n; ++i) {
        fa[i] = {static_cast<double>(a[i]), 0.0};
        fb[i] = {static_cast<double>(b[i]), 0.0};
    }

    int rank = two_d ? 2 : 3;
    int dims[3] = {two_d ? s.ny() : s.nz(), two_d ? s.nx() : s.ny(), s.nx()};

    Plans p{};
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        p.fwd_a = fftw_plan_dft(rank, dims, reinterpret_cast<fftw_complex*>(fa.data()),
                                reinterpret_cast<fftw_complex*>(fa.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE);
        p.fwd_b = fftw_plan_dft(rank, dims, reinterpret_cast<fftw_complex*>(fb.data()),
                                reinterpret_cast<fftw_complex*>(fb.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE);
        p.inv = fftw_plan_dft(rank, dims, reinterpret_cast<fftw_complex*>(cross.data()),
                              reinterpret_cast<fftw_complex*>(cross.data()), FFTW_BACKWARD,
                              FFTW_ESTIMATE);
    }
    fftw_execute(p.fwd_a);
    fftw_execute(p.fwd_b);

    constexpr double eps = 1e-12;
    for (std::int64_t i = 0; i < n; ++i) {
        std::complex<double> c = std::conj(fa[i]) * fb[i];
        cross[i] = c / (std::abs(c) + eps);
    }
    fftw_execute(p.inv);

    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        fftw_destroy_plan(p.fwd_a);
        fftw_destroy_plan(p.fwd_b);
        fftw_destroy_plan(p.inv);
    }

    std::int64_t best = 0;
    double best_v = std::norm(cross[0]);
    for (std::int64_t i = 1; i < n; ++i) {
        double v = std::norm(cross[i]);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }

    const std::int64_t plane = static_cast<std::int64_t>(s.nx()) * s.ny();
    int pz = static_cast<int>(best / plane);
    int rem = static_cast<int>(best % plane);
    int py = rem / s.nx();
    int px = rem % s.nx();
    auto wrap = [](int p, int extent) { return p > extent / 2 ? p - extent : p; };
    return {two_d ? 0 : wrap(pz, s.nz()), wrap(py, s.ny()), wrap(px, s.nx())};
}

} // namespace distcell
