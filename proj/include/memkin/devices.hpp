#pragma once

#include <array>
#include <variant>

#include "memkin/rng.hpp"

namespace memkin {

/// All quantities are SI: seconds, volts, ohms, hertz. This is a documented
/// convention rather than a unit system in the types; the netlist parser
/// enforces positivity and ordering constraints on construction.

enum class DeviceState : int { Off = 0, On = 1 };

/// Transition rates above this value are physically indistinguishable from
/// instantaneous switching; rate evaluation clamps here instead of overflowing.
inline constexpr double kRateCap = 1e300;

/// Poisson-statistics switching model with exponential voltage acceleration:
/// tau(V) = tau0 * exp(-V/v0) for the off->on transition (V > 0), and the
/// mirrored law with (tau1, v1, |V|) for on->off (V < 0).
struct PoissonExpModel {
    double tau0;   ///< off->on characteristic time at V = 0 [s]
    double v0;     ///< off->on voltage scale [V]
    double tau1;   ///< on->off characteristic time at V = 0 [s]
    double v1;     ///< on->off voltage scale [V]
    double r_on;   ///< on-state resistance [ohm]
    double r_off;  ///< off-state resistance [ohm], > r_on

    void validate() const;
    bool operator==(const PoissonExpModel&) const = default;
};

/// Adaptive probabilistic threshold model: zero rate inside (v_off, v_on),
/// power-law overdrive dependence outside.
struct AptmModel {
    double k_on;       ///< off->on rate prefactor [Hz]
    double k_off;      ///< on->off rate prefactor [Hz]
    double v_on;       ///< off->on threshold, > 0 [V]
    double v_off;      ///< on->off threshold, < 0 [V]
    double alpha_on;   ///< off->on overdrive exponent
    double alpha_off;  ///< on->off overdrive exponent
    double r_on;
    double r_off;

    void validate() const;
    bool operator==(const AptmModel&) const = default;
};

using DeviceModel = std::variant<PoissonExpModel, AptmModel>;

/// Closed intervals for uniform redraws of tau0 and v0 (device-to-device
/// variability in the Poisson-exponential model).
struct ParamSpread {
    std::array<double, 2> tau0_range;  ///< [lo, hi], 0 < lo <= hi [s]
    std::array<double, 2> v0_range;    ///< [lo, hi], 0 < lo <= hi [V]

    void validate() const;
    bool operator==(const ParamSpread&) const = default;
};

/// Characteristic off->on switching time tau0 * exp(-v/v0).
/// Strictly positive for any finite v within double range; throws
/// std::domain_error on non-finite input.
double tau_of_voltage(double v, double tau0, double v0);

/// Off->on switching rate: 1/tau(v) for v > 0, exactly 0 for v <= 0.
/// v = 0 is assigned to the zero branch (no drive, no switching).
double rate_off_on(double v, const PoissonExpModel& model);

/// On->off switching rate: mirror of rate_off_on with v < 0, (tau1, v1, |v|).
double rate_on_off(double v, const PoissonExpModel& model);

/// APTM rate out of the given state at voltage v (zero inside the thresholds).
double aptm_rate(double v, const AptmModel& model, DeviceState from);

/// Rate of leaving `from` at voltage v, dispatched over the model variant.
double switching_rate(double v, const DeviceModel& model, DeviceState from);

/// Two-level resistance of a device in the given state.
double resistance(DeviceState state, const DeviceModel& model);

double r_on_of(const DeviceModel& model);
double r_off_of(const DeviceModel& model);

/// Copy of `base` with tau0 and v0 redrawn independently and uniformly from
/// the closed spread intervals; all other fields unchanged. Draw order is
/// tau0 first, then v0 (two uniforms consumed from `rng`).
PoissonExpModel sample_params(const PoissonExpModel& base, const ParamSpread& spread,
                              RngStream& rng);

/// Variant dispatch of sample_params; throws std::invalid_argument for APTM
/// models, which have no tau0/v0 to redraw.
DeviceModel sample_params(const DeviceModel& base, const ParamSpread& spread, RngStream& rng);

}  // namespace memkin
