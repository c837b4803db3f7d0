#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "memkin/devices.hpp"

namespace memkin {

// ---------------------------------------------------------------------------
// Drive
// ---------------------------------------------------------------------------

struct DriveDC {
    double v_a;  ///< applied voltage [V]
    bool operator==(const DriveDC&) const = default;
};

struct DriveSine {
    double amplitude;    ///< [V]
    double frequency;    ///< [Hz], > 0
    double phase = 0.0;  ///< [rad]
    bool operator==(const DriveSine&) const = default;
};

using DriveSpec = std::variant<DriveDC, DriveSine>;

double drive_voltage(const DriveSpec& drive, double t);
bool is_dc(const DriveSpec& drive);

// ---------------------------------------------------------------------------
// Network state
// ---------------------------------------------------------------------------

/// Joint on/off configuration of an N-device network, encoded as a bitmask:
/// bit m is the state of memristor m (0 = off, 1 = on). The bitmask doubles
/// as the state index into 2^N-dimensional probability vectors.
struct NetworkState {
    std::uint32_t bits = 0;
    int n = 0;

    bool on(int m) const { return (bits >> m) & 1u; }
    void flip(int m) { bits ^= (1u << m); }
    NetworkState with_flipped(int m) const {
        NetworkState s = *this;
        s.flip(m);
        return s;
    }
    int on_count() const { return __builtin_popcount(bits); }
    bool all_on() const { return bits + 1 == (1u << n); }
    std::size_t index() const { return bits; }

    bool operator==(const NetworkState&) const = default;
};

// ---------------------------------------------------------------------------
// Netlist (general circuits)
// ---------------------------------------------------------------------------

/// Node-edge description of a circuit of sources, resistors and memristors.
/// Node "0" is ground. Memristor polarity follows terminal order: the device
/// voltage is v(node_pos) - v(node_neg).
struct Netlist {
    struct Source {
        std::string name;
        std::string node_pos, node_neg;
        DriveSpec drive;
        int line = 0;  ///< 1-based source-text line, 0 when built in code
        bool operator==(const Source& o) const {
            return name == o.name && node_pos == o.node_pos && node_neg == o.node_neg &&
                   drive == o.drive;
        }
    };
    struct Resistor {
        std::string name;
        std::string node_a, node_b;
        double ohms;
        int line = 0;
        bool operator==(const Resistor& o) const {
            return name == o.name && node_a == o.node_a && node_b == o.node_b && ohms == o.ohms;
        }
    };
    struct Memristor {
        std::string name;
        std::string node_pos, node_neg;
        std::string model_id;
        DeviceState initial = DeviceState::Off;
        std::optional<ParamSpread> spread;  ///< per-device redraw intervals
        int line = 0;
        bool operator==(const Memristor& o) const {
            return name == o.name && node_pos == o.node_pos && node_neg == o.node_neg &&
                   model_id == o.model_id && initial == o.initial && spread == o.spread;
        }
    };

    std::vector<std::pair<std::string, DeviceModel>> models;  // declaration order
    std::vector<Source> sources;
    std::vector<Resistor> resistors;
    std::vector<Memristor> memristors;  // device index = position here

    const DeviceModel* find_model(const std::string& id) const;

    /// Structural checks: declared models, positive values, no self-loops,
    /// at least one source, every node connected to ground. Throws parse_error.
    void validate() const;

    bool operator==(const Netlist&) const = default;
};

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

/// N memristors in series with one source; all devices oriented with their
/// + terminal toward the source's + terminal.
struct SeriesTopology {
    int n;
    DriveSpec drive;
    bool operator==(const SeriesTopology&) const = default;
};

/// N memristors each directly across the source.
struct ParallelTopology {
    int n;
    DriveSpec drive;
    bool operator==(const ParallelTopology&) const = default;
};

/// Arbitrary circuit given by a netlist.
struct GeneralTopology {
    Netlist netlist;
    bool operator==(const GeneralTopology&) const = default;
};

using Topology = std::variant<SeriesTopology, ParallelTopology, GeneralTopology>;

/// A simulatable network: topology plus per-device models, initial states and
/// optional per-device redraw spreads (index-aligned with the device order).
struct Network {
    Topology topology;
    std::vector<DeviceModel> models;
    std::vector<DeviceState> initial;
    std::vector<std::optional<ParamSpread>> spreads;

    int device_count() const { return static_cast<int>(models.size()); }
    NetworkState initial_state() const;
    bool identical_models() const;
    const DriveSpec* single_drive() const;  ///< null for multi-source netlists
};

/// Series/parallel convenience constructors with identical devices, all off.
Network make_series(int n, const DeviceModel& model, DriveSpec drive);
Network make_parallel(int n, const DeviceModel& model, DriveSpec drive);

/// Wrap a validated netlist as a Network (resolves model references,
/// initial states and spreads in memristor declaration order).
Network make_network(const Netlist& netlist);

/// Equivalent explicit netlist for a series/parallel topology (chain of nodes
/// n1..nN for series). Used for cross-checking the closed-form dividers.
Netlist to_netlist(const Network& network);

// ---------------------------------------------------------------------------
// Per-state circuit solution
// ---------------------------------------------------------------------------

/// Voltage across each memristor (+ to - terminal) in configuration `state`
/// at time t. Parallel: the drive voltage for every device. Series: the
/// resistive divider share of the drive. General: dense nodal analysis.
std::vector<double> device_voltages(const Network& network, const NetworkState& state, double t);

/// Node voltages of a general netlist with memristor resistances fixed by
/// `state`. Ground maps to 0. Throws topology_error when the conductance
/// system is singular (names the offending nodes).
std::unordered_map<std::string, double> nodal_solve(const Netlist& netlist,
                                                    const NetworkState& state, double t);

/// Transition rate of each device out of its current state in `state` at
/// time t: rate_off_on for off devices, rate_on_off for on devices (both
/// edges of the transition scheme are representable under either drive sign).
std::vector<double> transition_rates(const Network& network, const NetworkState& state, double t);

/// transition_rates with the network's models replaced (redrawn-per-trial mode).
std::vector<double> transition_rates(const Network& network,
                                     const std::vector<DeviceModel>& models,
                                     const NetworkState& state, double t);

std::vector<double> device_voltages(const Network& network,
                                    const std::vector<DeviceModel>& models,
                                    const NetworkState& state, double t);

}  // namespace memkin
