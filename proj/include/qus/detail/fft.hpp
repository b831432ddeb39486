#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qus::detail {

using cplx = std::complex<double>;

// Owns a pair of FFTW plans for one transform length. Plans are created under
// a process-wide lock (the FFTW planner is not thread-safe); execution is.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const noexcept { return n_; }

    // In-place, unnormalized forward transform.
    void forward(std::span<cplx> data) const;
    // In-place inverse transform, normalized by 1/n.
    void inverse(std::span<cplx> data) const;

private:
    std::size_t n_;
    void* forward_ = nullptr;
    void* inverse_ = nullptr;
};

// Frequency in Hz of DFT bin k for an n-point transform at rate fs.
// Bins above n/2 map to negative frequencies.
double bin_frequency(std::size_t k, std::size_t n, double fs);

// One-sided analytic-signal weights: 1 at DC (and Nyquist for even n),
// 2 for positive frequencies, 0 for negative ones.
std::vector<double> analytic_weights(std::size_t n);

}  // namespace qus::detail
