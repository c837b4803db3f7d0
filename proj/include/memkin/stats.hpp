#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "memkin/montecarlo.hpp"

namespace memkin {

// ---------------------------------------------------------------------------
// Histograms and moments
// ---------------------------------------------------------------------------

/// Uniform-width histogram of the finite samples plus exact raw-sample
/// moments (the moments never come from the bins).
struct Histogram {
    std::vector<double> bin_edges;      ///< size counts.size() + 1, starting at 0
    std::vector<std::size_t> counts;
    std::size_t n_total = 0;            ///< finite samples only
    double mean = 0.0;
    double variance = 0.0;              ///< population variance (0 for one sample)
};

/// Bin the finite samples into [0, ceil(max / bin_width) * bin_width).
/// Throws std::invalid_argument without at least one finite sample.
Histogram summarize(std::span<const double> samples, double bin_width);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  ///< sample standard deviation / sqrt(n)
    std::size_t n = 0;
};

/// Mean and standard error of the finite entries.
MeanSe mean_and_se(std::span<const double> samples);

// ---------------------------------------------------------------------------
// Two-series correlation functions (analytic)
// ---------------------------------------------------------------------------

/// Joint density of the two switching times for two identical series devices
/// (t1: device 1, t2: device 2). Symmetric under exchange; integrates to 1
/// over the quadrant.
struct JointPdf2 {
    double gamma00;
    double gamma01;
    double operator()(double t1, double t2) const;
};

/// Two-time correlation K_12(t, s) = (dr)^2 {[1 - p0(t)] p0(t+s) -
/// p01(t) e^{-gamma01 s}} with p0 = p00 + p01. delta_r defaults to 1
/// (normalized form).
double corr_two_series(double gamma00, double gamma01, double t, double s, double delta_r = 1.0);

/// Auto-correlation K_ii(t, s) = (dr)^2 [1 - p0(t)] p0(t+s); at s = 0 this is
/// the resistance variance (dr)^2 p0 (1 - p0).
double autocorr_two_series(double gamma00, double gamma01, double t, double s,
                           double delta_r = 1.0);

// ---------------------------------------------------------------------------
// Empirical correlations
// ---------------------------------------------------------------------------

struct CorrEstimate {
    double value = 0.0;  ///< normalized K tilde
    double se = 0.0;     ///< plug-in standard error of the covariance estimator
};

/// Normalized one-time correlation of devices i and j at time t, from the
/// step-function resistance reconstruction R(t) = r_off + (r_on - r_off)
/// H(t - t_switch) over the ensemble's switch times. i == j gives the
/// auto-correlation. Throws std::domain_error for t < 0.
CorrEstimate empirical_corr(const Ensemble& ensemble, int i, int j, double t);

/// Average of empirical_corr over all unordered pairs i < j.
CorrEstimate empirical_corr_pair_average(const Ensemble& ensemble, double t);

// ---------------------------------------------------------------------------
// Joint-distribution identities (numerical oracles)
// ---------------------------------------------------------------------------

/// Relative residuals of the joint-distribution identities evaluated by
/// adaptive 2-D quadrature against the closed forms:
///  - mean_time: E[max(t1, t2)] vs 1/(2 gamma00) + 1/gamma01
///  - phi1: integral of the joint density over t2 vs the marginal density
///  - probabilities: square/strip/quadrant integrals vs p11/p01/p00 at t
struct AppendixIdentityReport {
    double resid_mean_time = 0.0;
    double resid_phi1 = 0.0;
    double resid_probs = 0.0;

    double max_residual() const;
};

AppendixIdentityReport joint_pdf_identity_residuals(double gamma00, double gamma01, double t);

}  // namespace memkin
