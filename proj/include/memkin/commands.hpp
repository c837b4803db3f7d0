#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memkin/montecarlo.hpp"
#include "memkin/network.hpp"
#include "memkin/stats.hpp"

namespace memkin {

/// Everything a command needs: one topology source (netlist text, --series N
/// or --parallel N), the drive, and command-specific options.
struct Scenario {
    std::string netlist_text;  ///< empty when using the series/parallel shorthand
    int series_n = 0;
    int parallel_n = 0;
    DeviceModel model = paper_model();  ///< shorthand-topology device model
    double v_a = 1.0;                   ///< DC drive for shorthand topologies

    // sinusoidal drive (iv command)
    double amplitude = 1.5;
    double frequency = 1e3;
    double phase = 0.0;
    int cycles = 1000;

    int trials = 10000;
    std::uint64_t seed = 1;
    double dt = 0.0;    ///< 0 = auto
    Scheme scheme = Scheme::EventDriven;
    double t_end = 0.0;  ///< 0 = auto where a chain mean exists
    int steps = 0;       ///< 0 = per-command default
    double bin_width = 0.0;
    std::optional<std::pair<int, int>> pair;
    ParamMode param_mode = ParamMode::Identical;
    std::optional<ParamSpread> spread;
    std::string out_dir = ".";

    /// Electrochemical-cell reference parameters: tau0 = tau1 = 3e5 s,
    /// v0 = v1 = 0.05 V, r_on = 1 kOhm, r_off = 10 kOhm.
    static DeviceModel paper_model() {
        return PoissonExpModel{3e5, 0.05, 3e5, 0.05, 1e3, 1e4};
    }
};

/// "k=v,..." model option parser (type=poisson|aptm plus the netlist keys).
DeviceModel parse_model_option(const std::string& text);

/// "lo,hi" interval parser for the spread options.
std::array<double, 2> parse_interval_option(const std::string& text);

/// Build the network described by the scenario, using `drive` for the
/// shorthand topologies.
Network scenario_network(const Scenario& scenario, const DriveSpec& drive);

// ---------------------------------------------------------------------------
// Commands (CSV outputs land in scenario.out_dir)
// ---------------------------------------------------------------------------

struct McResult {
    MeanSe network_time;
    std::size_t sentinels = 0;  ///< trials that missed the horizon
    double max_step_hazard = 0.0;
    std::string switch_times_csv;
    std::string histogram_csv;
};

/// Monte Carlo ensemble: writes switch_times.csv (trial, device_0.., network_time)
/// and histogram.csv (bin_lo, bin_hi, count); prints mean +- SE.
McResult cmd_mc(const Scenario& scenario);

struct MasterResult {
    double density_integral = 0.0;  ///< trapezoid integral of the density column
    std::string master_csv;
};

/// Master-equation transient: writes master.csv with t, the occupation
/// probabilities (reduced levels p_0..p_N for identical series/parallel
/// networks, otherwise one column per state), the completion density and the
/// per-device average resistance.
MasterResult cmd_master(const Scenario& scenario);

struct IvSweepResult {
    std::vector<double> phase_time;   ///< one period, sample times
    std::vector<double> avg_voltage;  ///< drive voltage per phase point
    std::vector<double> avg_current;  ///< cycle-averaged current
    double loop_area = 0.0;           ///< |closed integral I dV| of the averaged trace
    std::string raw_csv;
    std::string avg_csv;
};

/// Stochastic I-V sweep under sinusoidal drive: simulates `cycles` periods at
/// fixed step (dt <= 1/(1000 f)), averages the current at matched phase, and
/// writes raw (cycle, t, v, i) and averaged (t, v, i) traces.
IvSweepResult cmd_iv(const Scenario& scenario);

struct CorrelateResult {
    std::vector<double> t;
    std::vector<CorrEstimate> k;
    std::string corr_csv;
};

/// One-time correlation functions across an ensemble: writes corr.csv
/// (t, ktilde, se), pair-averaged unless a single pair is requested.
CorrelateResult cmd_correlate(const Scenario& scenario);

}  // namespace memkin
