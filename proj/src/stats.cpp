#include "memkin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memkin/master.hpp"
#include "memkin/quadrature.hpp"

namespace memkin {

// ---------------------------------------------------------------------------
// Histograms and moments
// ---------------------------------------------------------------------------

Histogram summarize(std::span<const double> samples, double bin_width) {
    if (!(bin_width > 0)) throw std::invalid_argument("bin_width must be > 0");
    std::vector<double> finite;
    finite.reserve(samples.size());
    for (double x : samples)
        if (std::isfinite(x)) finite.push_back(x);
    if (finite.empty()) throw std::invalid_argument("summarize needs at least one finite sample");

    Histogram h;
    h.n_total = finite.size();
    double sum = 0.0;
    double max = 0.0;
    for (double x : finite) {
        sum += x;
        max = std::max(max, x);
    }
    h.mean = sum / static_cast<double>(h.n_total);
    double ss = 0.0;
    for (double x : finite) ss += (x - h.mean) * (x - h.mean);
    h.variance = ss / static_cast<double>(h.n_total);

    std::size_t nbins = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                     std::ceil(max / bin_width)));
    h.counts.assign(nbins, 0);
    h.bin_edges.resize(nbins + 1);
    for (std::size_t b = 0; b <= nbins; ++b) h.bin_edges[b] = bin_width * static_cast<double>(b);
    for (double x : finite) {
        auto b = static_cast<std::size_t>(std::max(0.0, std::floor(x / bin_width)));
        h.counts[std::min(b, nbins - 1)] += 1;
    }
    return h;
}

MeanSe mean_and_se(std::span<const double> samples) {
    MeanSe out;
    double sum = 0.0;
    for (double x : samples)
        if (std::isfinite(x)) {
            sum += x;
            ++out.n;
        }
    if (out.n == 0) return out;
    out.mean = sum / static_cast<double>(out.n);
    if (out.n < 2) return out;
    double ss = 0.0;
    for (double x : samples)
        if (std::isfinite(x)) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(out.n - 1)) /
             std::sqrt(static_cast<double>(out.n));
    return out;
}

// ---------------------------------------------------------------------------
// Two-series correlation functions
// ---------------------------------------------------------------------------

double JointPdf2::operator()(double t1, double t2) const {
    if (t1 < 0 || t2 < 0) return 0.0;
    double first = std::min(t1, t2);
    double wait = std::abs(t1 - t2);
    return gamma00 * gamma01 * std::exp(-2.0 * gamma00 * first - gamma01 * wait);
}

double corr_two_series(double gamma00, double gamma01, double t, double s, double delta_r) {
    if (t < 0 || s < 0) throw std::domain_error("correlation times must be >= 0");
    TwoSeriesProbs now = two_series_solution(gamma00, gamma01, t);
    TwoSeriesProbs later = two_series_solution(gamma00, gamma01, t + s);
    double p0_t = now.p00 + now.p01;
    double p0_ts = later.p00 + later.p01;
    return delta_r * delta_r *
           ((1.0 - p0_t) * p0_ts - now.p01 * std::exp(-gamma01 * s));
}

double autocorr_two_series(double gamma00, double gamma01, double t, double s, double delta_r) {
    if (t < 0 || s < 0) throw std::domain_error("correlation times must be >= 0");
    TwoSeriesProbs now = two_series_solution(gamma00, gamma01, t);
    TwoSeriesProbs later = two_series_solution(gamma00, gamma01, t + s);
    double p0_t = now.p00 + now.p01;
    double p0_ts = later.p00 + later.p01;
    return delta_r * delta_r * (1.0 - p0_t) * p0_ts;
}

// ---------------------------------------------------------------------------
// Empirical correlations
// ---------------------------------------------------------------------------

namespace {

CorrEstimate covariance_with_se(const std::vector<double>& products_minus_means,
                                std::size_t n) {
    CorrEstimate est;
    double sum = 0.0;
    for (double v : products_minus_means) sum += v;
    est.value = sum / static_cast<double>(n);
    if (n >= 2) {
        double ss = 0.0;
        for (double v : products_minus_means) ss += (v - est.value) * (v - est.value);
        est.se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
    return est;
}

}  // namespace

CorrEstimate empirical_corr(const Ensemble& ensemble, int i, int j, double t) {
    if (t < 0) throw std::domain_error("empirical_corr: t must be >= 0");
    const std::size_t n = ensemble.trials.size();
    if (n == 0) throw std::invalid_argument("empirical_corr: empty ensemble");

    double mean_i = 0.0, mean_j = 0.0;
    for (const TrialRecord& tr : ensemble.trials) {
        mean_i += tr.device_switch_times[i] <= t ? 1.0 : 0.0;
        mean_j += tr.device_switch_times[j] <= t ? 1.0 : 0.0;
    }
    mean_i /= static_cast<double>(n);
    mean_j /= static_cast<double>(n);

    std::vector<double> centered(n);
    for (std::size_t k = 0; k < n; ++k) {
        const TrialRecord& tr = ensemble.trials[k];
        double ui = tr.device_switch_times[i] <= t ? 1.0 : 0.0;
        double uj = tr.device_switch_times[j] <= t ? 1.0 : 0.0;
        centered[k] = (ui - mean_i) * (uj - mean_j);
    }
    return covariance_with_se(centered, n);
}

CorrEstimate empirical_corr_pair_average(const Ensemble& ensemble, double t) {
    if (t < 0) throw std::domain_error("empirical_corr: t must be >= 0");
    const std::size_t n = ensemble.trials.size();
    if (n == 0) throw std::invalid_argument("empirical_corr: empty ensemble");
    const int nd = static_cast<int>(ensemble.trials.front().device_switch_times.size());
    if (nd < 2) throw std::invalid_argument("pair-averaged correlation needs >= 2 devices");

    std::vector<double> mean(nd, 0.0);
    for (const TrialRecord& tr : ensemble.trials)
        for (int d = 0; d < nd; ++d) mean[d] += tr.device_switch_times[d] <= t ? 1.0 : 0.0;
    for (double& m : mean) m /= static_cast<double>(n);

    // Per-trial pair-averaged centered product, so the SE reflects the
    // trial-to-trial scatter of the averaged statistic.
    std::vector<double> centered(n, 0.0);
    const double pairs = nd * (nd - 1) / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        const TrialRecord& tr = ensemble.trials[k];
        double acc = 0.0;
        for (int di = 0; di < nd; ++di) {
            double ui = (tr.device_switch_times[di] <= t ? 1.0 : 0.0) - mean[di];
            for (int dj = di + 1; dj < nd; ++dj) {
                double uj = (tr.device_switch_times[dj] <= t ? 1.0 : 0.0) - mean[dj];
                acc += ui * uj;
            }
        }
        centered[k] = acc / pairs;
    }
    return covariance_with_se(centered, n);
}

// ---------------------------------------------------------------------------
// Joint-distribution identities
// ---------------------------------------------------------------------------

double AppendixIdentityReport::max_residual() const {
    return std::max({resid_mean_time, resid_phi1, resid_probs});
}

AppendixIdentityReport joint_pdf_identity_residuals(double gamma00, double gamma01, double t) {
    if (t < 0) throw std::domain_error("t must be >= 0");
    const JointPdf2 phi{gamma00, gamma01};
    const double scale = 1.0 / (2.0 * gamma00) + 1.0 / gamma01;  // mean switching time
    const double rtol = 1e-9;

    AppendixIdentityReport report;

    // (a) E[max(t1, t2)] over the joint density, using the exchange symmetry:
    //     both orderings contribute equally.
    double mean_num = 2.0 * integrate_to_inf(
                                [&](double t1) {
                                    double inner = integrate(
                                        [&](double t2) { return phi(t1, t2); }, 0.0, t1, rtol);
                                    return t1 * inner;
                                },
                                0.0, scale, rtol);
    double mean_closed = two_series_moments(gamma00, gamma01).mean;
    report.resid_mean_time = std::abs(mean_num - mean_closed) / mean_closed;

    // (b) marginal switching density of device 1 at the given t.
    double phi1_num =
        integrate_to_inf([&](double t2) { return phi(t, t2); }, 0.0, scale, rtol);
    double phi1_closed = memristor1_stats(gamma00, gamma01, t).phi1;
    report.resid_phi1 =
        std::abs(phi1_num - phi1_closed) / std::max(std::abs(phi1_closed), 1e-30);

    // (c) square / strip / quadrant integrals against the transient solution.
    TwoSeriesProbs closed = two_series_solution(gamma00, gamma01, t);
    double p11_num = t == 0.0 ? 0.0
                              : integrate(
                                    [&](double t1) {
                                        return integrate(
                                            [&](double t2) { return phi(t1, t2); }, 0.0, t, rtol);
                                    },
                                    0.0, t, rtol);
    double p01_num = t == 0.0
                         ? 0.0
                         : integrate(
                               [&](double t1) {
                                   return integrate_to_inf(
                                       [&](double t2) { return phi(t1, t2); }, t, scale, rtol);
                               },
                               0.0, t, rtol);
    double p00_num = integrate_to_inf(
        [&](double t1) {
            return integrate_to_inf([&](double t2) { return phi(t1, t2); }, t, scale, rtol);
        },
        t, scale, rtol);

    // Total probability is 1, so absolute differences are already relative
    // to the natural scale.
    report.resid_probs = std::max({std::abs(p11_num - closed.p11),
                                   std::abs(p01_num - closed.p01),
                                   std::abs(p00_num - closed.p00)});
    return report;
}

}  // namespace memkin
