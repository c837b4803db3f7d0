#include "memkin/master.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "memkin/errors.hpp"

namespace memkin {

namespace {

bool all_sources_dc(const Network& network) {
    if (const auto* g = std::get_if<GeneralTopology>(&network.topology)) {
        for (const auto& s : g->netlist.sources)
            if (!is_dc(s.drive)) return false;
        return true;
    }
    return is_dc(*network.single_drive());
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

void GeneratorMatrix::apply(const std::vector<double>& p, std::vector<double>& dpdt) const {
    for (std::size_t s = 0; s < dim; ++s) {
        double acc = 0.0;
        for (int m = 0; m < n_devices; ++m) {
            std::size_t neighbour = s ^ (std::size_t{1} << m);
            acc += rate(neighbour, m) * p[neighbour] - rate(s, m) * p[s];
        }
        dpdt[s] = acc;
    }
}

std::vector<std::vector<double>> GeneratorMatrix::dense() const {
    std::vector<std::vector<double>> q(dim, std::vector<double>(dim, 0.0));
    for (std::size_t s = 0; s < dim; ++s) {
        double out = 0.0;
        for (int m = 0; m < n_devices; ++m) {
            q[s][s ^ (std::size_t{1} << m)] = rate(s, m);
            out += rate(s, m);
        }
        q[s][s] = -out;
    }
    return q;
}

namespace {

GeneratorMatrix assemble_generator(const Network& network, double t, bool parallel) {
    const int n = network.device_count();
    if (n > kMaxFullStateDevices)
        throw capacity_error("full state space for N = " + std::to_string(n) +
                             " exceeds the 2^20-state cap; use the reduced chain");
    GeneratorMatrix gen;
    gen.n_devices = n;
    gen.dim = std::size_t{1} << n;
    gen.rates.resize(gen.dim * n);

    const auto fill = [&](std::size_t s) {
        NetworkState state{static_cast<std::uint32_t>(s), n};
        std::vector<double> r = transition_rates(network, state, t);
        std::copy(r.begin(), r.end(), gen.rates.begin() + s * n);
    };

    if (parallel) {
        const auto states = static_cast<long long>(gen.dim);
#pragma omp parallel for schedule(dynamic, 64)
        for (long long s = 0; s < states; ++s) fill(static_cast<std::size_t>(s));
    } else {
        for (std::size_t s = 0; s < gen.dim; ++s) fill(s);
    }
    return gen;
}

}  // namespace

GeneratorMatrix build_generator(const Network& network, double t) {
    return assemble_generator(network, t, true);
}

GeneratorMatrix build_generator_serial(const Network& network, double t) {
    return assemble_generator(network, t, false);
}

// ---------------------------------------------------------------------------
// Transient solutions
// ---------------------------------------------------------------------------

namespace {

template <class Rhs>
MasterSolution solve_on_grid(Rhs&& rhs, std::vector<double> p, double t_end, int steps,
                             const OdeOptions& opt, bool reduced, int n_devices) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!(t_end > 0)) throw std::invalid_argument("t_end must be > 0");
    MasterSolution sol;
    sol.reduced = reduced;
    sol.n_devices = n_devices;
    sol.times.reserve(steps + 1);
    sol.p.reserve(steps + 1);
    sol.times.push_back(0.0);
    sol.p.push_back(p);
    for (int k = 1; k <= steps; ++k) {
        double t0 = t_end * (k - 1) / steps;
        double t1 = t_end * k / steps;
        integrate_adaptive(rhs, p, t0, t1, opt);
        sol.times.push_back(t1);
        sol.p.push_back(p);
    }
    return sol;
}

void check_probability_vector(const std::vector<double>& p) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= -1e-12)) throw std::invalid_argument("p_init entries must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("p_init must sum to 1 within 1e-9");
}

}  // namespace

MasterSolution integrate_master(const Network& network, std::vector<double> p_init, double t_end,
                                int steps, const OdeOptions& opt) {
    const int n = network.device_count();
    const std::size_t dim = std::size_t{1} << n;
    if (p_init.size() != dim)
        throw std::invalid_argument("p_init length must be 2^N");
    check_probability_vector(p_init);

    if (all_sources_dc(network)) {
        GeneratorMatrix gen = build_generator(network, 0.0);
        auto rhs = [&gen](double, const std::vector<double>& p, std::vector<double>& dpdt) {
            gen.apply(p, dpdt);
        };
        return solve_on_grid(rhs, std::move(p_init), t_end, steps, opt, false, n);
    }
    // Time-varying drive: rates rebuilt at every evaluation.
    auto rhs = [&network](double t, const std::vector<double>& p, std::vector<double>& dpdt) {
        GeneratorMatrix gen = build_generator(network, t);
        gen.apply(p, dpdt);
    };
    return solve_on_grid(rhs, std::move(p_init), t_end, steps, opt, false, n);
}

// ---------------------------------------------------------------------------
// Symmetric chain
// ---------------------------------------------------------------------------

ChainRates chain_from_rates(std::vector<double> gamma) {
    const int n = static_cast<int>(gamma.size());
    if (n < 1) throw std::invalid_argument("chain needs at least one level rate");
    for (double g : gamma)
        if (!(g >= 0) || !std::isfinite(g))
            throw std::invalid_argument("chain rates must be finite and non-negative");
    ChainRates c;
    c.gamma = std::move(gamma);
    c.a.resize(n + 1);
    c.b.resize(n + 1);
    c.b[0] = 0.0;
    for (int m = 0; m < n; ++m) c.a[m] = (n - m) * c.gamma[m];
    c.a[n] = 0.0;
    for (int m = 1; m <= n; ++m) c.b[m] = m * c.gamma[m - 1];
    return c;
}

ChainRates reduce_chain(const Network& network) {
    if (std::holds_alternative<GeneralTopology>(network.topology))
        throw not_reducible_error("chain reduction requires a series or parallel topology");
    if (!network.identical_models())
        throw not_reducible_error("chain reduction requires identical devices");
    const DriveSpec* drive = network.single_drive();
    if (!is_dc(*drive))
        throw not_reducible_error("chain reduction requires DC drive");
    if (network.initial_state().bits != 0)
        throw not_reducible_error("chain reduction requires the all-off initial state");

    const int n = network.device_count();
    const double v_a = std::get<DriveDC>(*drive).v_a;
    const DeviceModel& model = network.models.front();
    std::vector<double> gamma(n);

    if (std::holds_alternative<ParallelTopology>(network.topology)) {
        std::fill(gamma.begin(), gamma.end(), switching_rate(v_a, model, DeviceState::Off));
    } else {
        const double r_on = r_on_of(model), r_off = r_off_of(model);
        for (int j = 0; j < n; ++j) {
            double v_off = v_a * r_off / (j * r_on + (n - j) * r_off);
            gamma[j] = switching_rate(v_off, model, DeviceState::Off);
        }
    }
    return chain_from_rates(std::move(gamma));
}

MasterSolution integrate_chain(const ChainRates& chain, double t_end, int steps,
                               const OdeOptions& opt) {
    const int n = chain.n();
    std::vector<double> p(n + 1, 0.0);
    p[0] = 1.0;
    auto rhs = [&chain, n](double, const std::vector<double>& y, std::vector<double>& dydt) {
        dydt[0] = -chain.a[0] * y[0];
        for (int m = 1; m <= n; ++m)
            dydt[m] = chain.b[m] * y[m - 1] - chain.a[m] * y[m];
    };
    return solve_on_grid(rhs, std::move(p), t_end, steps, opt, true, n);
}

namespace {

void check_separation(const std::vector<double>& a, int count) {
    // Pairwise-relative criterion: a gap is degenerate when it is small on the
    // scale of the pair itself. Comparing against the global max(a) would
    // spuriously reject healthy chains whose rates span many decades (a series
    // cascade reaches ~1e40 Hz while the slow stages sit near 1e4 Hz).
    for (int i = 0; i <= count; ++i)
        for (int j = i + 1; j <= count; ++j) {
            double scale = std::max(std::abs(a[i]), std::abs(a[j]));
            if (std::abs(a[i] - a[j]) < 1e-9 * scale)
                throw degeneracy_error(
                    "closed form undefined for (near-)equal chain rates a_" + std::to_string(i) +
                    " and a_" + std::to_string(j) + "; integrate the chain numerically instead");
        }
}

/// Coefficients of sum_i C_i e^{-a_i t} for level m, with an optional extra
/// log factor folded in (used to absorb b_N into the completion density).
ClosedFormCoefficients coefficients_impl(const ChainRates& chain, int m, double extra_log) {
    if (m < 0 || m > chain.n()) throw std::invalid_argument("level index out of range");

    ClosedFormCoefficients out;
    out.log_mag.resize(m + 1);
    out.sign.resize(m + 1);
    out.value.resize(m + 1);

    double log_b = extra_log;
    bool blocked = false;
    for (int k = 1; k <= m; ++k) {
        if (chain.b[k] == 0.0) { blocked = true; break; }
        log_b += std::log(chain.b[k]);
    }
    // A blocked chain never populates this level; p_m = 0 regardless of the
    // decay-rate spacing.
    if (!blocked) check_separation(chain.a, m);

    for (int i = 0; i <= m; ++i) {
        if (blocked) {
            out.log_mag[i] = -std::numeric_limits<double>::infinity();
            out.sign[i] = 0;
            out.value[i] = 0.0;
            continue;
        }
        double log_den = 0.0;
        int sign = 1;
        for (int j = 0; j <= m; ++j) {
            if (j == i) continue;
            double gap = chain.a[j] - chain.a[i];
            log_den += std::log(std::abs(gap));
            if (gap < 0) sign = -sign;
        }
        out.log_mag[i] = log_b - log_den;
        out.sign[i] = sign;
        out.value[i] = sign * std::exp(out.log_mag[i]);
    }
    return out;
}

double evaluate_sum(const ClosedFormCoefficients& c, const std::vector<double>& a, double t) {
    double p = 0.0;
    for (std::size_t i = 0; i < c.log_mag.size(); ++i) {
        if (c.sign[i] == 0) continue;
        double ex = c.log_mag[i] - a[i] * t;
        if (ex > 700.0)
            throw accuracy_error("closed-form term overflows; integrate the chain instead");
        p += c.sign[i] * std::exp(ex);
    }
    return p;
}

}  // namespace

ClosedFormCoefficients closed_form_coefficients(const ChainRates& chain, int m) {
    return coefficients_impl(chain, m, 0.0);
}

double closed_form_pm(const ChainRates& chain, int m, double t) {
    ClosedFormCoefficients c = coefficients_impl(chain, m, 0.0);
    return evaluate_sum(c, chain.a, t);
}

double chain_cdf(const ChainRates& chain, double t) {
    return closed_form_pm(chain, chain.n(), t);
}

double switching_time_pdf(const ChainRates& chain, double t) {
    const int n = chain.n();
    if (chain.b[n] == 0.0) return 0.0;
    ClosedFormCoefficients c = coefficients_impl(chain, n - 1, std::log(chain.b[n]));
    return evaluate_sum(c, chain.a, t);
}

double mean_switch_time_chain(const ChainRates& chain) {
    double mean = 0.0;
    for (int j = 0; j < chain.n(); ++j) {
        if (chain.a[j] == 0.0)
            throw infinite_time_error("zero transition rate at level " + std::to_string(j) +
                                      ": mean switching time diverges");
        mean += 1.0 / chain.a[j];
    }
    return mean;
}

// ---------------------------------------------------------------------------
// Two series devices
// ---------------------------------------------------------------------------

TwoSeriesProbs two_series_solution(double gamma00, double gamma01, double t) {
    if (gamma01 == 2.0 * gamma00)
        throw degeneracy_error("two_series_solution: gamma01 == 2 gamma00 (confluent case); "
                               "integrate the chain numerically instead");
    double p00 = std::exp(-2.0 * gamma00 * t);
    double p01 = gamma00 / (gamma01 - 2.0 * gamma00) *
                 (std::exp(-2.0 * gamma00 * t) - std::exp(-gamma01 * t));
    return {p00, p01, 1.0 - p00 - 2.0 * p01};
}

SwitchMoments two_series_moments(double gamma00, double gamma01) {
    return {1.0 / (2.0 * gamma00) + 1.0 / gamma01,
            1.0 / (4.0 * gamma00 * gamma00) + 1.0 / (gamma01 * gamma01)};
}

Memristor1Stats memristor1_stats(double gamma00, double gamma01, double t) {
    TwoSeriesProbs p = two_series_solution(gamma00, gamma01, t);
    // p10 = p01 for identical devices.
    return {gamma00 * p.p00 + gamma01 * p.p01, 1.0 / (2.0 * gamma00) + 1.0 / (2.0 * gamma01)};
}

// ---------------------------------------------------------------------------
// Parallel networks
// ---------------------------------------------------------------------------

double parallel_all_on(int n, double gamma, double t) {
    return std::pow(-std::expm1(-gamma * t), n);
}

double parallel_mean_time(int n, double gamma) {
    double h = 0.0;
    for (int k = n; k >= 1; --k) h += 1.0 / k;
    return h / gamma;
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

std::vector<double> marginal_resistance(const MasterSolution& solution, int device,
                                        const std::vector<DeviceModel>& models) {
    const double r_on = r_on_of(models[device]);
    const double r_off = r_off_of(models[device]);
    std::vector<double> out(solution.times.size());

    if (solution.reduced) {
        const int n = solution.n_devices;
        // States with m devices on and this device off: C(n-1, m) of the
        // C(n, m) level states; each level state carries probability p_m.
        for (std::size_t k = 0; k < out.size(); ++k) {
            double p_off = 0.0, p_on = 0.0;
            for (int m = 0; m <= n; ++m) {
                p_off += binomial(n - 1, m) * solution.p[k][m];
                p_on += binomial(n - 1, m - 1) * solution.p[k][m];
            }
            out[k] = r_off * p_off + r_on * p_on;
        }
        return out;
    }

    for (std::size_t k = 0; k < out.size(); ++k) {
        double p_on = 0.0;
        const auto& p = solution.p[k];
        for (std::size_t s = 0; s < p.size(); ++s)
            if ((s >> device) & 1u) p_on += p[s];
        out[k] = r_off * (1.0 - p_on) + r_on * p_on;
    }
    return out;
}

std::vector<double> completion_density(const MasterSolution& solution, const Network& network) {
    std::vector<double> out(solution.times.size());
    if (solution.reduced) {
        ChainRates chain = reduce_chain(network);
        const int n = chain.n();
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = chain.b[n] * solution.p[k][n - 1];
        return out;
    }
    // d p_allon / dt = inflow - outflow at the all-on state.
    GeneratorMatrix gen = build_generator(network, 0.0);
    const std::size_t target = gen.dim - 1;
    for (std::size_t k = 0; k < out.size(); ++k) {
        double acc = 0.0;
        const auto& p = solution.p[k];
        for (int m = 0; m < gen.n_devices; ++m) {
            std::size_t neighbour = target ^ (std::size_t{1} << m);
            acc += gen.rate(neighbour, m) * p[neighbour] - gen.rate(target, m) * p[target];
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace memkin
