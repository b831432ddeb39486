#include "qus/detail/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace qus::detail {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::span<cplx> data) {
    return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
    if (n == 0) {
        throw std::invalid_argument("FftPlan: zero length");
    }
    std::vector<cplx> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, flags);
    inverse_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, flags);
}

FftPlan::~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
}

void FftPlan::forward(std::span<cplx> data) const {
    fftw_execute_dft(static_cast<fftw_plan>(forward_), as_fftw(data), as_fftw(data));
}

void FftPlan::inverse(std::span<cplx> data) const {
    fftw_execute_dft(static_cast<fftw_plan>(inverse_), as_fftw(data), as_fftw(data));
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : data) {
        v *= scale;
    }
}

double bin_frequency(std::size_t k, std::size_t n, double fs) {
    const double df = fs / static_cast<double>(n);
    if (2 * k <= n) {
        return static_cast<double>(k) * df;
    }
    return -static_cast<double>(n - k) * df;
}

std::vector<double> analytic_weights(std::size_t n) {
    std::vector<double> w(n, 0.0);
    w[0] = 1.0;
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) {
        w[k] = 2.0;
    }
    if (n % 2 == 0) {
        w[half] = 1.0;
    }
    return w;
}

}  // namespace qus::detail
