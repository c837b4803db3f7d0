#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>

#include "memkin/commands.hpp"
#include "memkin/errors.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw memkin::parse_error(0, "cannot open netlist file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void add_common_options(CLI::App* cmd, memkin::Scenario& s, std::string& netlist_path,
                        std::string& model_text, std::string& spread_tau0,
                        std::string& spread_v0) {
    cmd->add_option("--netlist", netlist_path, "netlist file (see README for the format)");
    cmd->add_option("--series", s.series_n, "series network of N identical devices");
    cmd->add_option("--parallel", s.parallel_n, "parallel network of N identical devices");
    cmd->add_option("--model", model_text,
                    "device model for --series/--parallel, e.g. tau0=3e5,v0=0.05,ron=1e3 "
                    "or type=aptm,kon=1e5,... (defaults to the reference cell parameters)");
    cmd->add_option("--va", s.v_a, "applied DC voltage [V]");
    cmd->add_option("--trials", s.trials, "number of Monte Carlo trials");
    cmd->add_option("--seed", s.seed, "RNG seed (fixed seed => byte-identical outputs)");
    cmd->add_option("--dt", s.dt, "fixed-step size [s] (default: auto)");
    cmd->add_option("--scheme", [&s](const std::vector<std::string>& v) {
        if (v[0] == "fixed") s.scheme = memkin::Scheme::FixedStep;
        else if (v[0] == "event") s.scheme = memkin::Scheme::EventDriven;
        else return false;
        return true;
    }, "sampling scheme: fixed | event")->expected(1);
    cmd->add_option("--t-end", s.t_end, "time horizon / grid end [s] (default: auto)");
    cmd->add_option("--steps", s.steps, "grid points (master/correlate)");
    cmd->add_option("--bin", s.bin_width, "histogram bin width [s]");
    cmd->add_option("--spread-tau0", spread_tau0, "tau0 redraw interval lo,hi [s]");
    cmd->add_option("--spread-v0", spread_v0, "v0 redraw interval lo,hi [V]");
    cmd->add_option("--param-mode", [&s](const std::vector<std::string>& v) {
        if (v[0] == "identical") s.param_mode = memkin::ParamMode::Identical;
        else if (v[0] == "redrawn") s.param_mode = memkin::ParamMode::RedrawnPerTrial;
        else if (v[0] == "drawn-once") s.param_mode = memkin::ParamMode::DrawnOnce;
        else return false;
        return true;
    }, "identical | redrawn | drawn-once")->expected(1);
    cmd->add_option("--out", s.out_dir, "output directory for CSV files");
}

void finalize_scenario(memkin::Scenario& s, const std::string& netlist_path,
                       const std::string& model_text, const std::string& spread_tau0,
                       const std::string& spread_v0) {
    if (!netlist_path.empty()) s.netlist_text = read_file(netlist_path);
    if (!model_text.empty()) s.model = memkin::parse_model_option(model_text);
    if (spread_tau0.empty() != spread_v0.empty())
        throw memkin::parse_error(0, "--spread-tau0 and --spread-v0 must be given together");
    if (!spread_tau0.empty()) {
        memkin::ParamSpread spread{memkin::parse_interval_option(spread_tau0),
                                   memkin::parse_interval_option(spread_v0)};
        spread.validate();
        s.spread = spread;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memkin - kinetics of probabilistic binary memristor networks"};
    app.require_subcommand(1);

    memkin::Scenario s;
    std::string netlist_path, model_text, spread_tau0, spread_v0;
    std::string pair_text;

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo switching-time ensemble");
    CLI::App* master = app.add_subcommand("master", "master-equation transient solve");
    CLI::App* iv = app.add_subcommand("iv", "stochastic I-V sweep under sinusoidal drive");
    CLI::App* corr = app.add_subcommand("correlate", "one-time correlation functions");

    for (CLI::App* cmd : {mc, master, iv, corr})
        add_common_options(cmd, s, netlist_path, model_text, spread_tau0, spread_v0);

    iv->add_option("--amp", s.amplitude, "sine amplitude [V]");
    iv->add_option("--freq", s.frequency, "sine frequency [Hz]");
    iv->add_option("--phase", s.phase, "sine phase [rad]");
    iv->add_option("--cycles", s.cycles, "number of periods to simulate and average");
    corr->add_option("--pair", pair_text, "single device pair i,j (default: all pairs averaged)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    try {
        finalize_scenario(s, netlist_path, model_text, spread_tau0, spread_v0);
        if (!pair_text.empty()) {
            auto iv_pair = memkin::parse_interval_option(pair_text);
            s.pair = {static_cast<int>(iv_pair[0]), static_cast<int>(iv_pair[1])};
        }
        if (mc->parsed()) memkin::cmd_mc(s);
        if (master->parsed()) memkin::cmd_master(s);
        if (iv->parsed()) memkin::cmd_iv(s);
        if (corr->parsed()) memkin::cmd_correlate(s);
        return 0;
    } catch (const memkin::parse_error& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}
