#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qus {

// Burr speckle amplitude model:
//   P(A) = 2 A (b - 1) / (lambda^2 [(A/lambda)^2 + 1]^b),   A >= 0, b > 1
//   F(A) = 1 - [(A/lambda)^2 + 1]^(1 - b)
double burr_pdf(double amplitude, double lambda, double b);
double burr_cdf(double amplitude, double lambda, double b);
/// Inverse CDF: lambda * sqrt(u^(1/(1-b)) - 1), where u is the upper-tail
/// probability. Any u in (0, 1] is accepted; u and 1-u give the same law.
double burr_quantile(double u, double lambda, double b);

/// Equal-width amplitude histogram over [0, max sample] normalized to unit area.
struct AmplitudeHistogram {
    std::vector<double> bin_edges;
    std::vector<double> densities;
    std::size_t n_samples = 0;
    double rate = 0.1;
    /// True when the rate rule asked for fewer than kMinHistogramBins bins.
    bool min_bins_clamped = false;

    std::size_t bins() const noexcept { return densities.size(); }
    double bin_width() const { return bin_edges.at(1) - bin_edges.at(0); }
    std::vector<double> centers() const;
};

inline constexpr std::size_t kMinHistogramBins = 8;
inline constexpr double kDefaultHistogramRate = 0.10;

/// bins = max(8, round(rate * n)). Requires >= 64 non-negative samples.
std::size_t histogram_bin_count(std::size_t n_samples, double rate);
AmplitudeHistogram build_histogram(std::span<const double> samples, double rate = kDefaultHistogramRate);

struct BurrFitOptions {
    int max_iterations = 200;
    double tolerance = 1e-12;
};

struct BurrFit {
    double lambda_hat = 0.0;
    double b_hat = 0.0;
    double r_squared = 0.0;
    bool converged = false;
    int n_iterations = 0;
};

inline constexpr double kBurrLambdaMin = 1e-6;
inline constexpr double kBurrLambdaMax = 1e6;
inline constexpr double kBurrBMax = 100.0;

/// Least-squares fit of P(A) to the bin-center densities. Log-parameterized
/// Levenberg-Marquardt over (log lambda, log(b - 1)), six deterministic starts.
BurrFit fit_burr(const AmplitudeHistogram& hist, const BurrFitOptions& options = {});

struct RateFit {
    double rate = 0.0;
    std::size_t bins = 0;
    std::optional<BurrFit> fit;
    std::string error;
};

/// 2%, 4%, ..., 40%.
std::vector<double> default_sweep_rates();

/// One fit per rate; a failing rate records its error and the sweep continues.
std::vector<RateFit> sweep_rates(std::span<const double> samples, std::span<const double> rates);

/// CSV with header `rate,lambda,b,r2,bins`.
std::string sweep_to_csv(std::span<const RateFit> sweep);

}  // namespace qus
