#include "memkin/montecarlo.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>

#include "memkin/errors.hpp"
#include "memkin/master.hpp"

namespace memkin {

namespace {

bool network_is_dc(const Network& network) {
    if (const auto* g = std::get_if<GeneralTopology>(&network.topology)) {
        for (const auto& s : g->netlist.sources)
            if (!is_dc(s.drive)) return false;
        return true;
    }
    return is_dc(*network.single_drive());
}

struct Recorder {
    TrialRecord record;
    NetworkState state;
    bool dc;

    Recorder(const Network& network, bool record_trajectory)
        : state(network.initial_state()), dc(network_is_dc(network)) {
        record.device_switch_times.assign(network.device_count(), kNever);
        if (record_trajectory) record.trajectory.emplace_back(0.0, state);
        if (state.all_on()) record.network_switch_time = 0.0;
    }

    void flip(int m, double t, bool record_trajectory) {
        state.flip(m);
        if (state.on(m) && record.device_switch_times[m] == kNever)
            record.device_switch_times[m] = t;
        if (record_trajectory) record.trajectory.emplace_back(t, state);
        if (state.all_on() && record.network_switch_time == kNever)
            record.network_switch_time = t;
    }
};

}  // namespace

double default_dt(const Network& network) {
    try {
        ChainRates chain = reduce_chain(network);
        bool finite = std::all_of(chain.a.begin(), chain.a.end() - 1,
                                  [](double a) { return a > 0; });
        if (finite) return mean_switch_time_chain(chain) / 75.0;
    } catch (const not_reducible_error&) {
    }

    // Generic fallback: resolve the fastest rate seen from the initial state,
    // probing one drive period for time-varying sources.
    NetworkState s0 = network.initial_state();
    double max_rate = 0.0;
    double period = 0.0;
    if (const DriveSpec* drive = network.single_drive()) {
        if (const auto* sine = std::get_if<DriveSine>(drive)) period = 1.0 / sine->frequency;
    }
    const int probes = period > 0 ? 64 : 1;
    for (int k = 0; k < probes; ++k) {
        std::vector<double> rates = transition_rates(network, s0, period * k / probes);
        for (double r : rates) max_rate = std::max(max_rate, r);
    }
    if (max_rate <= 0)
        throw std::invalid_argument(
            "default_dt: no positive rate at the initial state; pass an explicit dt");
    double dt = 0.01 / max_rate;
    if (period > 0) dt = std::min(dt, period / 1000.0);
    return dt;
}

TrialRecord simulate_fixed_step(const Network& network, const std::vector<DeviceModel>& models,
                                double dt, double horizon, RngStream& rng,
                                bool record_trajectory) {
    if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    const int n = network.device_count();
    Recorder rec(network, record_trajectory);
    if (!rec.dc && !std::isfinite(horizon))
        throw std::invalid_argument("time-varying drive needs a finite horizon");

    std::vector<double> rates = transition_rates(network, models, rec.state, 0.0);
    double max0 = *std::max_element(rates.begin(), rates.end());
    if (dt * max0 > 1.0)
        throw step_size_error("dt * rate = " + std::to_string(dt * max0) +
                              " > 1 at the initial state; reduce dt");
    rec.record.max_step_hazard = dt * max0;

    std::vector<int> flips;
    std::uint64_t k = 0;
    double t = 0.0;
    while (t < horizon) {
        if (k > 0) rates = transition_rates(network, models, rec.state, t);
        double rmax = 0.0;
        for (double r : rates) rmax = std::max(rmax, r);
        rec.record.max_step_hazard = std::max(rec.record.max_step_hazard, dt * rmax);
        if (rec.dc && rmax == 0.0) break;  // absorbing (or fully stalled) under DC

        flips.clear();
        for (int m = 0; m < n; ++m) {
            if (rates[m] <= 0.0) continue;
            // dt * rate >= 1 always exceeds the draw: instantaneous regime.
            if (dt * rates[m] > rng.uniform()) flips.push_back(m);
        }
        ++k;
        t = static_cast<double>(k) * dt;
        // Same-step flips get ulp-staggered times so trajectory times stay
        // strictly increasing (simultaneity is a discretization artifact).
        double tf = t;
        for (int m : flips) {
            rec.flip(m, tf, record_trajectory);
            tf = std::nextafter(tf, kNever);
        }
    }
    return rec.record;
}

TrialRecord simulate_event_driven(const Network& network, const std::vector<DeviceModel>& models,
                                  double horizon, RngStream& rng, bool record_trajectory) {
    if (!network_is_dc(network))
        throw std::invalid_argument("event-driven simulation requires DC drive");
    const int n = network.device_count();
    Recorder rec(network, record_trajectory);

    double t = 0.0;
    for (;;) {
        std::vector<double> rates = transition_rates(network, models, rec.state, t);
        double total = 0.0;
        for (double r : rates) total += r;
        if (total <= 0.0) break;  // absorbing or stalled: remaining sentinels stand

        double next = t + rng.exponential(total);
        // Holding times in a fast cascade can be below one ulp of t; keep the
        // event ordering strict anyway.
        t = next > t ? next : std::nextafter(t, kNever);
        if (t > horizon) break;

        double u = rng.uniform() * total;
        int chosen = -1;
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
            if (rates[m] <= 0.0) continue;
            acc += rates[m];
            chosen = m;
            if (u < acc) break;
        }
        rec.flip(chosen, t, record_trajectory);
    }
    return rec.record;
}

int ensemble_threads() {
    if (const char* env = std::getenv("MEMKIN_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return std::min(v, omp_get_max_threads());
    }
    return omp_get_max_threads();
}

namespace {

constexpr std::uint64_t kDrawOnceStream = ~std::uint64_t{0};

std::vector<DeviceModel> trial_models(const EnsembleSpec& spec, RngStream& rng) {
    const Network& net = spec.network;
    std::vector<DeviceModel> models = net.models;
    for (int d = 0; d < net.device_count(); ++d) {
        const std::optional<ParamSpread>& spread =
            net.spreads[d] ? net.spreads[d] : spec.spread;
        if (!spread)
            throw std::invalid_argument("redrawn parameter mode needs a spread for device " +
                                        std::to_string(d));
        models[d] = sample_params(models[d], *spread, rng);
    }
    return models;
}

Ensemble run_impl(const EnsembleSpec& spec, int n_trials, bool parallel) {
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    const Network& net = spec.network;

    double dt = spec.dt;
    if (spec.scheme == Scheme::FixedStep && dt == 0.0) dt = default_dt(net);

    std::vector<DeviceModel> shared_models = net.models;
    if (spec.param_mode == ParamMode::DrawnOnce) {
        RngStream rng(spec.seed, kDrawOnceStream);
        shared_models = trial_models(spec, rng);
    }

    Ensemble out;
    out.scheme = spec.scheme;
    out.dt = dt;
    out.seed = spec.seed;
    out.param_mode = spec.param_mode;
    out.trials.resize(n_trials);

    std::exception_ptr failure = nullptr;
    const auto run_trial = [&](int i) {
        RngStream rng(spec.seed, static_cast<std::uint64_t>(i));
        const std::vector<DeviceModel>* models = &shared_models;
        std::vector<DeviceModel> redrawn;
        if (spec.param_mode == ParamMode::RedrawnPerTrial) {
            redrawn = trial_models(spec, rng);
            models = &redrawn;
        }
        out.trials[i] = spec.scheme == Scheme::FixedStep
                            ? simulate_fixed_step(net, *models, dt, spec.horizon, rng,
                                                  spec.record_trajectory)
                            : simulate_event_driven(net, *models, spec.horizon, rng,
                                                    spec.record_trajectory);
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(ensemble_threads())
        for (int i = 0; i < n_trials; ++i) {
            try {
                run_trial(i);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
    } else {
        for (int i = 0; i < n_trials; ++i) run_trial(i);
    }
    if (failure) std::rethrow_exception(failure);

    for (const TrialRecord& tr : out.trials)
        out.max_step_hazard = std::max(out.max_step_hazard, tr.max_step_hazard);
    return out;
}

}  // namespace

Ensemble run_ensemble(const EnsembleSpec& spec, int n_trials) {
    return run_impl(spec, n_trials, true);
}

Ensemble run_ensemble_serial(const EnsembleSpec& spec, int n_trials) {
    return run_impl(spec, n_trials, false);
}

}  // namespace memkin
