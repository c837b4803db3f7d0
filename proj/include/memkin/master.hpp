#pragma once

#include <cstddef>
#include <vector>

#include "memkin/network.hpp"
#include "memkin/ode.hpp"

namespace memkin {

/// Full-state-space operation is capped here: 2^20 states is already beyond
/// what a dense transient solve can justify.
inline constexpr int kMaxFullStateDevices = 20;

// ---------------------------------------------------------------------------
// Generator over the 2^N state space
// ---------------------------------------------------------------------------

/// Transition-rate structure of the master equation at a fixed time. Only
/// single-bit flips carry rates: state Theta connects to Theta XOR (1 << m)
/// at rate(Theta, m), the rate of device m leaving its current state in
/// configuration Theta. Both off->on and on->off edges are represented; under
/// one-signed DC drive the opposing edges carry zero rate.
struct GeneratorMatrix {
    int n_devices = 0;
    std::size_t dim = 0;        ///< 2^N
    std::vector<double> rates;  ///< rates[state * N + m]

    double rate(std::size_t state, int device) const { return rates[state * n_devices + device]; }

    /// dp/dt of the master equation: inflow from one-bit neighbours minus
    /// total outflow.
    void apply(const std::vector<double>& p, std::vector<double>& dpdt) const;

    /// Dense row-form generator Q (row sums vanish): Q[s][s^m] = rate(s, m),
    /// diagonal = -sum of the row's off-diagonals. dp/dt = Q^T p. Intended
    /// for small N (structure checks).
    std::vector<std::vector<double>> dense() const;
};

/// Assemble the generator for configuration-dependent rates at time t.
/// Per-state rate evaluation is an independent map (OpenMP across states).
/// Throws capacity_error for more than kMaxFullStateDevices devices.
GeneratorMatrix build_generator(const Network& network, double t);

/// Serial reference assembly; bit-identical to build_generator.
GeneratorMatrix build_generator_serial(const Network& network, double t);

// ---------------------------------------------------------------------------
// Transient solutions
// ---------------------------------------------------------------------------

/// Occupation probabilities on a uniform time grid. Full solutions carry all
/// 2^N states; reduced (symmetric-chain) solutions carry levels p_0..p_N,
/// where p_m is the probability of ONE state with m devices on (level
/// multiplicity C(N, m)).
struct MasterSolution {
    std::vector<double> times;
    std::vector<std::vector<double>> p;
    bool reduced = false;
    int n_devices = 0;
};

/// Default tolerances for master-equation solves.
inline OdeOptions master_ode_options() { return OdeOptions{1e-9, 1e-12, 20'000'000}; }

/// Solve the full master equation from p_init over [0, t_end] with steps+1
/// grid points. DC drives freeze the generator; time-varying drives rebuild
/// the rates at every right-hand-side evaluation.
MasterSolution integrate_master(const Network& network, std::vector<double> p_init, double t_end,
                                int steps, const OdeOptions& opt = master_ode_options());

// ---------------------------------------------------------------------------
// Symmetric chain (identical devices)
// ---------------------------------------------------------------------------

/// Level rates of the reduced chain: gamma[j] is the off->on rate of any
/// still-off device when j devices are on; a[m] = (N-m) gamma[m] (a[N] = 0)
/// and b[m] = m gamma[m-1] (b[0] = 0).
struct ChainRates {
    std::vector<double> gamma;
    std::vector<double> a;
    std::vector<double> b;

    int n() const { return static_cast<int>(gamma.size()); }
};

/// Build a chain from caller-supplied level rates (also usable for on->off
/// modelling with an appropriate rate selection).
ChainRates chain_from_rates(std::vector<double> gamma);

/// Collapse an identical-device series/parallel network under DC drive with
/// the all-off initial state. Series: gamma[j] from the divider voltage
/// v_a r_off / (j r_on + (n-j) r_off); parallel: gamma[j] = gamma(v_a).
/// Throws not_reducible_error otherwise.
ChainRates reduce_chain(const Network& network);

/// Reduced-chain transient from p_0(0) = 1 on a uniform grid.
MasterSolution integrate_chain(const ChainRates& chain, double t_end, int steps,
                               const OdeOptions& opt = master_ode_options());

/// Pre-exponential factors C_i of p_m(t) = sum_i C_i exp(-a_i t), kept in
/// sign/log-magnitude form (products of b's over products of rate gaps).
struct ClosedFormCoefficients {
    std::vector<double> log_mag;
    std::vector<int> sign;
    std::vector<double> value;  ///< sign * exp(log_mag); may overflow for extreme chains
};

ClosedFormCoefficients closed_form_coefficients(const ChainRates& chain, int m);

/// Closed-form occupation probability of a level-m state. Requires the decay
/// rates a_0..a_m (a_N = 0 for m = N) to be pairwise distinct: gaps below
/// 1e-9 * max(a) raise degeneracy_error (use integrate_chain instead).
double closed_form_pm(const ChainRates& chain, int m, double t);

/// Probability that the whole network has switched by t (= p_N(t)).
double chain_cdf(const ChainRates& chain, double t);

/// Network completion-time density b_N p_{N-1}(t); integrates to 1.
double switching_time_pdf(const ChainRates& chain, double t);

/// Mean network switching time sum_j 1/a_j. Throws infinite_time_error when
/// a zero rate blocks the chain.
double mean_switch_time_chain(const ChainRates& chain);

// ---------------------------------------------------------------------------
// Two identical devices in series (closed forms)
// ---------------------------------------------------------------------------

struct TwoSeriesProbs {
    double p00, p01, p11;  ///< p01 is one of the two symmetric single-on states
};

/// Transient solution for two identical series devices under positive DC:
/// gamma00 is the per-device rate in state 00, gamma01 the rate of the
/// remaining off device. Throws degeneracy_error when gamma01 == 2 gamma00.
TwoSeriesProbs two_series_solution(double gamma00, double gamma01, double t);

struct SwitchMoments {
    double mean;      ///< [s]
    double variance;  ///< [s^2]
};

/// Network switching time moments: mean 1/(2 gamma00) + 1/gamma01 and
/// variance 1/(4 gamma00^2) + 1/gamma01^2.
SwitchMoments two_series_moments(double gamma00, double gamma01);

struct Memristor1Stats {
    double phi1;  ///< switching-time density of device 1 at t [1/s]
    double mean;  ///< mean switching time of device 1 [s]
};

Memristor1Stats memristor1_stats(double gamma00, double gamma01, double t);

// ---------------------------------------------------------------------------
// Parallel networks (closed forms)
// ---------------------------------------------------------------------------

/// Probability that all n independent devices are on: (1 - e^{-gamma t})^n.
double parallel_all_on(int n, double gamma, double t);

/// Mean switching time H_n / gamma with H_n the n-th harmonic number.
double parallel_mean_time(int n, double gamma);

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

/// Average resistance of one device along a solution: r_off p_off + r_on p_on
/// with the marginals summed over all states with that device fixed (full
/// solutions) or binomially weighted levels (reduced solutions).
std::vector<double> marginal_resistance(const MasterSolution& solution, int device,
                                        const std::vector<DeviceModel>& models);

/// Completion-time density d p_all-on / dt along a full or reduced solution.
std::vector<double> completion_density(const MasterSolution& solution, const Network& network);

}  // namespace memkin
