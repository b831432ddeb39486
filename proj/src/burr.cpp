#include "qus/burr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "qus/error.hpp"

namespace qus {
namespace {

void check_params(double lambda, double b) {
    require(lambda > 0.0, ErrorCode::invalid_argument, "Burr lambda must be positive");
    require(b > 1.0, ErrorCode::non_normalizable_burr, "non-normalizable Burr exponent: b must exceed 1");
}

double log_pdf(double a, double lambda, double b) {
    const double s = a / lambda;
    return std::log(2.0 * a * (b - 1.0)) - 2.0 * std::log(lambda) - b * std::log1p(s * s);
}

struct Problem {
    std::vector<double> x;
    std::vector<double> y;
};

struct Params {
    double log_lambda;
    double log_bm1;

    double lambda() const { return std::exp(log_lambda); }
    double b() const { return 1.0 + std::exp(log_bm1); }
};

const double kLogLambdaMin = std::log(kBurrLambdaMin);
const double kLogLambdaMax = std::log(kBurrLambdaMax);
const double kLogBm1Min = std::log(1e-6);
const double kLogBm1Max = std::log(kBurrBMax - 1.0);

Params clamp_params(Params p) {
    p.log_lambda = std::clamp(p.log_lambda, kLogLambdaMin, kLogLambdaMax);
    p.log_bm1 = std::clamp(p.log_bm1, kLogBm1Min, kLogBm1Max);
    return p;
}

double model(double a, const Params& p) {
    if (a <= 0.0) {
        return 0.0;
    }
    return std::exp(log_pdf(a, p.lambda(), p.b()));
}

double sum_squares(const Problem& prob, const Params& p) {
    double ss = 0.0;
    for (std::size_t i = 0; i < prob.x.size(); ++i) {
        const double r = model(prob.x[i], p) - prob.y[i];
        ss += r * r;
    }
    return ss;
}

struct StartResult {
    Params params;
    double ss;
    bool converged;
    int iterations;
};

StartResult levenberg_marquardt(const Problem& prob, Params p, const BurrFitOptions& opt) {
    p = clamp_params(p);
    double ss = sum_squares(prob, p);
    double damping = 1e-3;
    bool converged = false;
    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        // normal equations for residual r = P(x; p) - y
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
        const double lambda = p.lambda();
        const double b = p.b();
        for (std::size_t i = 0; i < prob.x.size(); ++i) {
            const double a = prob.x[i];
            if (a <= 0.0) {
                continue;
            }
            const double val = model(a, p);
            const double s2 = (a / lambda) * (a / lambda);
            const double dlog_lambda = -2.0 + 2.0 * b * s2 / (1.0 + s2);
            const double dlog_bm1 = 1.0 - (b - 1.0) * std::log1p(s2);
            const double j0 = val * dlog_lambda;
            const double j1 = val * dlog_bm1;
            const double r = val - prob.y[i];
            jtj00 += j0 * j0;
            jtj01 += j0 * j1;
            jtj11 += j1 * j1;
            jtr0 += j0 * r;
            jtr1 += j1 * r;
        }
        const double grad_norm = std::hypot(jtr0, jtr1);
        if (grad_norm <= std::numeric_limits<double>::min() || ss == 0.0) {
            converged = true;
            break;
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            const double a00 = jtj00 * (1.0 + damping) + 1e-300;
            const double a11 = jtj11 * (1.0 + damping) + 1e-300;
            const double det = a00 * a11 - jtj01 * jtj01;
            if (!(det > 0.0) || !std::isfinite(det)) {
                damping *= 10.0;
                continue;
            }
            const double d0 = -(a11 * jtr0 - jtj01 * jtr1) / det;
            const double d1 = -(a00 * jtr1 - jtj01 * jtr0) / det;
            const Params trial = clamp_params({p.log_lambda + d0, p.log_bm1 + d1});
            const double trial_ss = sum_squares(prob, trial);
            if (std::isfinite(trial_ss) && trial_ss <= ss) {
                const double step = std::hypot(trial.log_lambda - p.log_lambda, trial.log_bm1 - p.log_bm1);
                const double improvement = ss - trial_ss;
                p = trial;
                ss = trial_ss;
                damping = std::max(damping / 3.0, 1e-12);
                accepted = true;
                if (improvement <= opt.tolerance * std::max(ss, 1e-300) && step < 1e-9) {
                    converged = true;
                }
                if (step < 1e-12) {
                    converged = true;
                }
                break;
            }
            damping *= 4.0;
        }
        if (!accepted) {
            // no descent direction left at this damping: stationary point
            converged = true;
        }
        if (converged) {
            ++iter;
            break;
        }
    }
    return {p, ss, converged, iter};
}

}  // namespace

double burr_pdf(double amplitude, double lambda, double b) {
    check_params(lambda, b);
    if (amplitude <= 0.0) {
        return 0.0;
    }
    return std::exp(log_pdf(amplitude, lambda, b));
}

double burr_cdf(double amplitude, double lambda, double b) {
    check_params(lambda, b);
    if (amplitude <= 0.0) {
        return 0.0;
    }
    const double s = amplitude / lambda;
    return -std::expm1((1.0 - b) * std::log1p(s * s));
}

double burr_quantile(double u, double lambda, double b) {
    check_params(lambda, b);
    require(u > 0.0 && u <= 1.0, ErrorCode::invalid_argument, "Burr quantile needs u in (0, 1]");
    return lambda * std::sqrt(std::expm1(std::log(u) / (1.0 - b)));
}

std::vector<double> AmplitudeHistogram::centers() const {
    std::vector<double> c(densities.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = 0.5 * (bin_edges[i] + bin_edges[i + 1]);
    }
    return c;
}

std::size_t histogram_bin_count(std::size_t n_samples, double rate) {
    require(rate > 0.0 && rate <= 1.0, ErrorCode::invalid_argument, "histogram rate must be in (0, 1]");
    const auto by_rate = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n_samples)));
    return std::max(kMinHistogramBins, by_rate);
}

AmplitudeHistogram build_histogram(std::span<const double> samples, double rate) {
    require(samples.size() >= 64, ErrorCode::invalid_argument,
            "histogram needs at least 64 samples, got " + std::to_string(samples.size()));
    const std::size_t bins = histogram_bin_count(samples.size(), rate);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : samples) {
        require(std::isfinite(v) && v >= 0.0, ErrorCode::invalid_argument,
                "histogram amplitudes must be finite and non-negative");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    require(hi > lo && hi > 0.0, ErrorCode::degenerate_histogram, "degenerate histogram: all samples equal");

    AmplitudeHistogram h;
    h.n_samples = samples.size();
    h.rate = rate;
    h.min_bins_clamped =
        static_cast<std::size_t>(std::llround(rate * static_cast<double>(samples.size()))) < kMinHistogramBins;
    const double width = hi / static_cast<double>(bins);
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.bin_edges[i] = width * static_cast<double>(i);
    }
    h.bin_edges.back() = hi;
    std::vector<std::size_t> counts(bins, 0);
    for (double v : samples) {
        const auto idx = std::min(bins - 1, static_cast<std::size_t>(v / width));
        ++counts[idx];
    }
    h.densities.resize(bins);
    const double norm = 1.0 / (static_cast<double>(samples.size()) * width);
    for (std::size_t i = 0; i < bins; ++i) {
        h.densities[i] = static_cast<double>(counts[i]) * norm;
    }
    return h;
}

BurrFit fit_burr(const AmplitudeHistogram& hist, const BurrFitOptions& options) {
    require(hist.bins() >= 2 && hist.bin_edges.size() == hist.bins() + 1, ErrorCode::degenerate_histogram,
            "histogram is not fittable");
    Problem prob{hist.centers(), hist.densities};

    // second moment of the histogram sets the starting scale
    double m2 = 0.0;
    const double width = hist.bin_width();
    for (std::size_t i = 0; i < prob.x.size(); ++i) {
        m2 += prob.y[i] * width * prob.x[i] * prob.x[i];
    }
    require(m2 > 0.0 && std::isfinite(m2), ErrorCode::degenerate_histogram, "histogram has no mass");
    const double scale0 = std::sqrt(m2) / std::sqrt(2.0);

    StartResult best{{0.0, 0.0}, std::numeric_limits<double>::infinity(), false, 0};
    int total_iterations = 0;
    for (double lambda_factor : {0.5, 1.0, 2.0}) {
        for (double b0 : {2.0, 4.0}) {
            const Params start{std::log(lambda_factor * scale0), std::log(b0 - 1.0)};
            const auto result = levenberg_marquardt(prob, start, options);
            total_iterations += result.iterations;
            if (result.ss < best.ss) {
                best = result;
            }
        }
    }

    double mean = 0.0;
    for (double y : prob.y) {
        mean += y;
    }
    mean /= static_cast<double>(prob.y.size());
    double ss_tot = 0.0;
    for (double y : prob.y) {
        ss_tot += (y - mean) * (y - mean);
    }

    BurrFit fit;
    fit.lambda_hat = best.params.lambda();
    fit.b_hat = best.params.b();
    fit.r_squared = ss_tot > 0.0 ? 1.0 - best.ss / ss_tot : 0.0;
    fit.converged = best.converged && std::isfinite(fit.r_squared);
    fit.n_iterations = total_iterations;
    return fit;
}

std::vector<double> default_sweep_rates() {
    std::vector<double> rates;
    for (int pct = 2; pct <= 40; pct += 2) {
        rates.push_back(pct / 100.0);
    }
    return rates;
}

std::vector<RateFit> sweep_rates(std::span<const double> samples, std::span<const double> rates) {
    std::vector<RateFit> out;
    out.reserve(rates.size());
    for (double rate : rates) {
        RateFit entry;
        entry.rate = rate;
        try {
            const auto hist = build_histogram(samples, rate);
            entry.bins = hist.bins();
            entry.fit = fit_burr(hist);
        } catch (const Error& e) {
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

std::string sweep_to_csv(std::span<const RateFit> sweep) {
    std::ostringstream os;
    os.precision(17);
    os << "rate,lambda,b,r2,bins\n";
    for (const auto& e : sweep) {
        os << e.rate << ',';
        if (e.fit) {
            os << e.fit->lambda_hat << ',' << e.fit->b_hat << ',' << e.fit->r_squared;
        } else {
            os << ",,";
        }
        os << ',' << e.bins << '\n';
    }
    return os.str();
}

}  // namespace qus
