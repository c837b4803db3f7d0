#include "memkin/network.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "memkin/errors.hpp"

namespace memkin {

double drive_voltage(const DriveSpec& drive, double t) {
    if (const auto* dc = std::get_if<DriveDC>(&drive)) return dc->v_a;
    const auto& s = std::get<DriveSine>(drive);
    return s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * t + s.phase);
}

bool is_dc(const DriveSpec& drive) { return std::holds_alternative<DriveDC>(drive); }

// ---------------------------------------------------------------------------
// Netlist
// ---------------------------------------------------------------------------

const DeviceModel* Netlist::find_model(const std::string& id) const {
    for (const auto& [name, model] : models)
        if (name == id) return &model;
    return nullptr;
}

namespace {

// Union-find over small node sets, for the connected-to-ground check.
class NodeGroups {
  public:
    int id(const std::string& name) {
        auto [it, inserted] = index_.try_emplace(name, static_cast<int>(parent_.size()));
        if (inserted) parent_.push_back(it->second);
        return it->second;
    }
    int root(int i) {
        while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
        return i;
    }
    void join(int a, int b) { parent_[root(a)] = root(b); }
    const std::unordered_map<std::string, int>& names() const { return index_; }

  private:
    std::unordered_map<std::string, int> index_;
    std::vector<int> parent_;
};

void check_drive(const DriveSpec& drive, const std::string& name, int line) {
    if (const auto* s = std::get_if<DriveSine>(&drive)) {
        if (!(s->frequency > 0))
            throw parse_error(line, "source '" + name + "': SIN frequency must be > 0");
    }
}

}  // namespace

void Netlist::validate() const {
    std::set<std::string> names;
    auto unique_name = [&](const std::string& n, int line) {
        if (!names.insert(n).second)
            throw parse_error(line, "duplicate element name '" + n + "'");
    };

    std::set<std::string> model_ids;
    for (const auto& [id, model] : models) {
        if (!model_ids.insert(id).second) throw parse_error(0, "duplicate model '" + id + "'");
        std::visit([](const auto& m) { m.validate(); }, model);
    }

    if (sources.empty()) throw parse_error(0, "no source");

    NodeGroups groups;
    int ground = groups.id("0");

    for (const auto& s : sources) {
        unique_name(s.name, s.line);
        if (s.node_pos == s.node_neg)
            throw parse_error(s.line, "source '" + s.name + "' shorts a node to itself");
        check_drive(s.drive, s.name, s.line);
        groups.join(groups.id(s.node_pos), groups.id(s.node_neg));
    }
    for (const auto& r : resistors) {
        unique_name(r.name, r.line);
        if (r.node_a == r.node_b)
            throw parse_error(r.line, "resistor '" + r.name + "' connects a node to itself");
        if (!(std::isfinite(r.ohms) && r.ohms > 0))
            throw parse_error(r.line, "resistor '" + r.name + "' must have positive resistance");
        groups.join(groups.id(r.node_a), groups.id(r.node_b));
    }
    for (const auto& m : memristors) {
        unique_name(m.name, m.line);
        if (m.node_pos == m.node_neg)
            throw parse_error(m.line, "memristor '" + m.name + "' connects a node to itself");
        if (find_model(m.model_id) == nullptr)
            throw parse_error(m.line, "memristor '" + m.name + "' references undefined model '" +
                                          m.model_id + "'");
        if (m.spread) m.spread->validate();
        groups.join(groups.id(m.node_pos), groups.id(m.node_neg));
    }

    std::vector<std::string> floating;
    for (const auto& [name, idx] : groups.names())
        if (groups.root(idx) != groups.root(ground)) floating.push_back(name);
    if (!floating.empty()) {
        std::sort(floating.begin(), floating.end());
        std::string list;
        for (const auto& n : floating) list += (list.empty() ? "" : ", ") + n;
        throw parse_error(0, "nodes not connected to ground: " + list);
    }
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

NetworkState Network::initial_state() const {
    NetworkState s{0, device_count()};
    for (int m = 0; m < s.n; ++m)
        if (initial[m] == DeviceState::On) s.flip(m);
    return s;
}

bool Network::identical_models() const {
    return std::all_of(models.begin(), models.end(),
                       [&](const DeviceModel& m) { return m == models.front(); });
}

const DriveSpec* Network::single_drive() const {
    if (const auto* s = std::get_if<SeriesTopology>(&topology)) return &s->drive;
    if (const auto* p = std::get_if<ParallelTopology>(&topology)) return &p->drive;
    const auto& nl = std::get<GeneralTopology>(topology).netlist;
    return nl.sources.size() == 1 ? &nl.sources.front().drive : nullptr;
}

namespace {

Network make_uniform(Topology topology, int n, const DeviceModel& model) {
    if (n < 1) throw std::invalid_argument("device count must be >= 1");
    std::visit([](const auto& m) { m.validate(); }, model);
    Network net;
    net.topology = std::move(topology);
    net.models.assign(n, model);
    net.initial.assign(n, DeviceState::Off);
    net.spreads.assign(n, std::nullopt);
    return net;
}

}  // namespace

Network make_series(int n, const DeviceModel& model, DriveSpec drive) {
    return make_uniform(SeriesTopology{n, drive}, n, model);
}

Network make_parallel(int n, const DeviceModel& model, DriveSpec drive) {
    return make_uniform(ParallelTopology{n, drive}, n, model);
}

Network make_network(const Netlist& netlist) {
    netlist.validate();
    Network net;
    net.topology = GeneralTopology{netlist};
    for (const auto& m : netlist.memristors) {
        net.models.push_back(*netlist.find_model(m.model_id));
        net.initial.push_back(m.initial);
        net.spreads.push_back(m.spread);
    }
    if (net.models.empty()) throw parse_error(0, "netlist contains no memristors");
    return net;
}

Netlist to_netlist(const Network& network) {
    if (const auto* g = std::get_if<GeneralTopology>(&network.topology)) return g->netlist;

    Netlist nl;
    const int n = network.device_count();
    const bool identical = network.identical_models();
    for (int m = 0; m < (identical ? 1 : n); ++m)
        nl.models.emplace_back("mdl" + std::to_string(m), network.models[m]);

    auto model_id = [&](int m) { return identical ? "mdl0" : "mdl" + std::to_string(m); };
    auto node = [](int k) { return "n" + std::to_string(k); };

    if (const auto* s = std::get_if<SeriesTopology>(&network.topology)) {
        nl.sources.push_back({"src", node(1), "0", s->drive});
        for (int m = 0; m < n; ++m) {
            std::string neg = (m == n - 1) ? "0" : node(m + 2);
            nl.memristors.push_back(
                {"d" + std::to_string(m), node(m + 1), neg, model_id(m), network.initial[m],
                 network.spreads[m]});
        }
    } else {
        const auto& p = std::get<ParallelTopology>(network.topology);
        nl.sources.push_back({"src", node(1), "0", p.drive});
        for (int m = 0; m < n; ++m)
            nl.memristors.push_back({"d" + std::to_string(m), node(1), "0", model_id(m),
                                     network.initial[m], network.spreads[m]});
    }
    return nl;
}

// ---------------------------------------------------------------------------
// Per-state circuit solution
// ---------------------------------------------------------------------------

namespace {

/// Dense modified nodal analysis: unknowns are the non-ground node voltages
/// followed by one branch current per voltage source.
struct MnaSolution {
    std::unordered_map<std::string, double> node_voltages;  // includes ground = 0
    std::vector<double> source_currents;                    // out of node_pos, through circuit
};

MnaSolution mna_solve(const Netlist& netlist, const std::vector<double>& device_resistance,
                      double t) {
    std::unordered_map<std::string, int> node_index;
    std::vector<std::string> node_names;
    auto idx = [&](const std::string& name) -> int {
        if (name == "0") return -1;
        auto [it, inserted] = node_index.try_emplace(name, static_cast<int>(node_names.size()));
        if (inserted) node_names.push_back(name);
        return it->second;
    };

    for (const auto& s : netlist.sources) { idx(s.node_pos); idx(s.node_neg); }
    for (const auto& r : netlist.resistors) { idx(r.node_a); idx(r.node_b); }
    for (const auto& m : netlist.memristors) { idx(m.node_pos); idx(m.node_neg); }

    const int k = static_cast<int>(node_names.size());
    const int ns = static_cast<int>(netlist.sources.size());
    const int dim = k + ns;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);

    auto stamp_conductance = [&](int na, int nb, double g) {
        if (na >= 0) a(na, na) += g;
        if (nb >= 0) a(nb, nb) += g;
        if (na >= 0 && nb >= 0) {
            a(na, nb) -= g;
            a(nb, na) -= g;
        }
    };

    for (const auto& r : netlist.resistors)
        stamp_conductance(idx(r.node_a), idx(r.node_b), 1.0 / r.ohms);
    for (std::size_t m = 0; m < netlist.memristors.size(); ++m)
        stamp_conductance(idx(netlist.memristors[m].node_pos), idx(netlist.memristors[m].node_neg),
                          1.0 / device_resistance[m]);

    for (int s = 0; s < ns; ++s) {
        const auto& src = netlist.sources[s];
        int np = idx(src.node_pos), nm = idx(src.node_neg);
        // Branch current flows out of node_pos into the external circuit.
        if (np >= 0) { a(np, k + s) += 1.0; a(k + s, np) += 1.0; }
        if (nm >= 0) { a(nm, k + s) -= 1.0; a(k + s, nm) -= 1.0; }
        b(k + s) = drive_voltage(src.drive, t);
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
        // Report the nodes whose voltage is undetermined (kernel support).
        Eigen::MatrixXd kernel = lu.kernel();
        std::set<std::string> bad;
        for (int c = 0; c < kernel.cols(); ++c) {
            double scale = kernel.col(c).cwiseAbs().maxCoeff();
            for (int ni = 0; ni < k; ++ni)
                if (std::abs(kernel(ni, c)) > 1e-8 * scale) bad.insert(node_names[ni]);
        }
        std::string list;
        for (const auto& n : bad) list += (list.empty() ? "" : ", ") + n;
        throw topology_error("singular conductance system (floating subcircuit); nodes: " +
                             (list.empty() ? std::string("<branch equations>") : list));
    }

    Eigen::VectorXd x = lu.solve(b);

    double scale = a.cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().maxCoeff() +
                   b.cwiseAbs().maxCoeff();
    double residual = (a * x - b).cwiseAbs().maxCoeff();
    if (scale > 0 && residual > 1e-9 * scale)
        throw accuracy_error("nodal solve residual " + std::to_string(residual / scale) +
                             " exceeds 1e-9 relative");

    MnaSolution sol;
    sol.node_voltages["0"] = 0.0;
    for (int ni = 0; ni < k; ++ni) sol.node_voltages[node_names[ni]] = x(ni);
    for (int s = 0; s < ns; ++s) sol.source_currents.push_back(-x(k + s));
    return sol;
}

std::vector<double> resistances_for(const Netlist& netlist,
                                    const std::vector<DeviceModel>& models,
                                    const NetworkState& state) {
    std::vector<double> r(netlist.memristors.size());
    for (std::size_t m = 0; m < r.size(); ++m)
        r[m] = resistance(state.on(static_cast<int>(m)) ? DeviceState::On : DeviceState::Off,
                          models[m]);
    return r;
}

}  // namespace

std::unordered_map<std::string, double> nodal_solve(const Netlist& netlist,
                                                    const NetworkState& state, double t) {
    std::vector<DeviceModel> models;
    for (const auto& m : netlist.memristors) models.push_back(*netlist.find_model(m.model_id));
    return mna_solve(netlist, resistances_for(netlist, models, state), t).node_voltages;
}

std::vector<double> device_voltages(const Network& network,
                                    const std::vector<DeviceModel>& models,
                                    const NetworkState& state, double t) {
    const int n = network.device_count();
    if (state.n != n)
        throw std::invalid_argument("state length does not match device count");
    std::vector<double> v(n);

    if (const auto* series = std::get_if<SeriesTopology>(&network.topology)) {
        double total = 0.0;
        std::vector<double> r(n);
        for (int m = 0; m < n; ++m) {
            r[m] = resistance(state.on(m) ? DeviceState::On : DeviceState::Off, models[m]);
            total += r[m];
        }
        double va = drive_voltage(series->drive, t);
        for (int m = 0; m < n; ++m) v[m] = va * r[m] / total;
        return v;
    }
    if (const auto* par = std::get_if<ParallelTopology>(&network.topology)) {
        std::fill(v.begin(), v.end(), drive_voltage(par->drive, t));
        return v;
    }

    const auto& nl = std::get<GeneralTopology>(network.topology).netlist;
    auto sol = mna_solve(nl, resistances_for(nl, models, state), t);
    for (int m = 0; m < n; ++m) {
        const auto& dev = nl.memristors[m];
        v[m] = sol.node_voltages.at(dev.node_pos) - sol.node_voltages.at(dev.node_neg);
    }
    return v;
}

std::vector<double> device_voltages(const Network& network, const NetworkState& state, double t) {
    return device_voltages(network, network.models, state, t);
}

std::vector<double> transition_rates(const Network& network,
                                     const std::vector<DeviceModel>& models,
                                     const NetworkState& state, double t) {
    std::vector<double> v = device_voltages(network, models, state, t);
    std::vector<double> rates(v.size());
    for (std::size_t m = 0; m < v.size(); ++m) {
        DeviceState from = state.on(static_cast<int>(m)) ? DeviceState::On : DeviceState::Off;
        rates[m] = switching_rate(v[m], models[m], from);
    }
    return rates;
}

std::vector<double> transition_rates(const Network& network, const NetworkState& state, double t) {
    return transition_rates(network, network.models, state, t);
}

}  // namespace memkin
