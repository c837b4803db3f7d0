#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "memkin/network.hpp"
#include "memkin/rng.hpp"

namespace memkin {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// Outcome of one stochastic trajectory. device_switch_times holds the first
/// off->on time of each device (+inf if it never switched within the
/// horizon); network_switch_time is the first moment the network reached
/// all-on. The optional trajectory lists the initial state followed by one
/// entry per flip, with strictly increasing times and one-bit state changes.
struct TrialRecord {
    std::vector<double> device_switch_times;
    double network_switch_time = kNever;
    std::vector<std::pair<double, NetworkState>> trajectory;
    double max_step_hazard = 0.0;  ///< max dt * rate encountered (fixed-step only)
};

enum class Scheme { FixedStep, EventDriven };

enum class ParamMode {
    Identical,        ///< every trial uses the network's models as given
    RedrawnPerTrial,  ///< tau0/v0 redrawn from the spreads before each trial
    DrawnOnce,        ///< one redraw shared by the whole ensemble
};

struct EnsembleSpec {
    Network network;
    Scheme scheme = Scheme::EventDriven;
    double dt = 0.0;  ///< fixed-step size; 0 selects default_dt(network)
    double horizon = kNever;
    std::uint64_t seed = 0;
    ParamMode param_mode = ParamMode::Identical;
    std::optional<ParamSpread> spread;  ///< fallback for devices without their own
    bool record_trajectory = false;
};

struct Ensemble {
    Scheme scheme = Scheme::EventDriven;
    double dt = 0.0;
    std::uint64_t seed = 0;
    ParamMode param_mode = ParamMode::Identical;
    std::vector<TrialRecord> trials;
    double max_step_hazard = 0.0;
};

/// Step size heuristic. Chain-reducible networks use the mean switching time
/// divided by 75, which resolves every stage that contributes materially to
/// the mean and reproduces the discretization bias of the reference
/// fixed-step results. Otherwise 0.01 over the largest rate at the initial
/// state, probed across a drive period for sinusoidal drive.
double default_dt(const Network& network);

/// The fixed-time-step procedure: at each step recompute the device voltages
/// for the current configuration, compare dt * rate against one uniform draw
/// per still-switchable device in device-index order, and flip where the
/// probability exceeds the draw. Rates with dt * rate >= 1 switch at the next
/// step (effectively instantaneous); dt * rate > 1 at the *initial* state
/// raises step_size_error, and the largest dt * rate seen is recorded in the
/// trial for the > 0.1 warning. Stops at absorption (DC) or the horizon.
TrialRecord simulate_fixed_step(const Network& network, const std::vector<DeviceModel>& models,
                                double dt, double horizon, RngStream& rng,
                                bool record_trajectory = false);

/// Exact event-driven sampling (DC only): exponential holding time with the
/// total exit rate, flipping device chosen proportionally to its rate.
/// Free of time-discretization bias. Throws std::invalid_argument for
/// non-DC drive.
TrialRecord simulate_event_driven(const Network& network, const std::vector<DeviceModel>& models,
                                  double horizon, RngStream& rng,
                                  bool record_trajectory = false);

/// Run n_trials independent trials with per-trial random streams derived from
/// (seed, trial index). Identical (seed, scheme, inputs) give bit-identical
/// ensembles regardless of thread count or scheduling.
Ensemble run_ensemble(const EnsembleSpec& spec, int n_trials);

/// Serial reference of run_ensemble; bit-identical output.
Ensemble run_ensemble_serial(const EnsembleSpec& spec, int n_trials);

/// Thread budget: MEMKIN_THREADS when set (>= 1), else the OpenMP default.
int ensemble_threads();

}  // namespace memkin
