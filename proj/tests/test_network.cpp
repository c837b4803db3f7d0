#include <doctest.h>

#include <cmath>
#include <numeric>

#include "memkin/errors.hpp"
#include "memkin/network.hpp"

using namespace memkin;

namespace {

PoissonExpModel ref_model() { return {3e5, 0.05, 3e5, 0.05, 1e3, 1e4}; }

constexpr double kRateAt1V = 1617.2173180326343;  // exp(20) / 3e5

NetworkState state_of(std::uint32_t bits, int n) { return NetworkState{bits, n}; }

}  // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("drive_voltage") {
    CHECK(drive_voltage(DriveDC{2.0}, 123.0) == 2.0);
    DriveSine s{1.5, 1e3, 0.0};
    CHECK(drive_voltage(s, 0.0) == 0.0);
    CHECK(drive_voltage(s, 0.25e-3) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(drive_voltage(s, 0.75e-3) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("series voltages split by the resistive divider") {
    Network net = make_series(2, ref_model(), DriveDC{2.0});

    auto v00 = device_voltages(net, state_of(0b00, 2), 0.0);
    CHECK(v00[0] == doctest::Approx(1.0).epsilon(1e-15));  // V_a / 2 per device
    CHECK(v00[1] == doctest::Approx(1.0).epsilon(1e-15));

    // One device on: the off device takes R_off / (R_on + R_off) of the drive.
    auto v01 = device_voltages(net, state_of(0b01, 2), 0.0);
    CHECK(v01[1] == doctest::Approx(2.0 * 10.0 / 11.0).epsilon(1e-15));
    CHECK(v01[0] == doctest::Approx(2.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("parallel devices all see the source") {
    Network net = make_parallel(10, ref_model(), DriveDC{1.0});
    for (std::uint32_t bits : {0u, 5u, 1023u}) {
        auto v = device_voltages(net, state_of(bits, 10), 0.0);
        for (double x : v) CHECK(x == 1.0);
    }
}

TEST_CASE("series voltages obey KVL in every state") {
    Network net = make_series(5, ref_model(), DriveDC{3.0});
    for (std::uint32_t bits = 0; bits < (1u << 5); ++bits) {
        auto v = device_voltages(net, state_of(bits, 5), 0.0);
        double sum = std::accumulate(v.begin(), v.end(), 0.0);
        CHECK(sum == doctest::Approx(3.0).epsilon(1e-12));
    }
}

TEST_CASE("series topology and its explicit netlist agree in all states") {
    for (int n : {2, 4, 6}) {
        Network series = make_series(n, ref_model(), DriveDC{2.0});
        Network general = make_network(to_netlist(series));
        for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
            auto va = device_voltages(series, state_of(bits, n), 0.0);
            auto vb = device_voltages(general, state_of(bits, n), 0.0);
            for (int m = 0; m < n; ++m)
                CHECK(va[m] == doctest::Approx(vb[m]).epsilon(1e-12));
        }
    }
}

TEST_CASE("series divider at N = 10 with nine devices on") {
    Network series = make_series(10, ref_model(), DriveDC{10.0});
    Network general = make_network(to_netlist(series));
    NetworkState nine_on = state_of(0b0111111111, 10);  // device 9 still off
    auto va = device_voltages(series, nine_on, 0.0);
    auto vb = device_voltages(general, nine_on, 0.0);
    CHECK(va[9] == doctest::Approx(100.0 / 19.0).epsilon(1e-12));
    CHECK(vb[9] == doctest::Approx(100.0 / 19.0).epsilon(1e-12));
}

TEST_CASE("nodal_solve basics") {
    Netlist nl;
    nl.sources.push_back({"src", "n1", "0", DriveDC{2.0}});
    nl.resistors.push_back({"r1", "n1", "n2", 100.0});
    nl.resistors.push_back({"r2", "n2", "0", 100.0});
    auto v = nodal_solve(nl, state_of(0, 0), 0.0);
    CHECK(v.at("n1") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v.at("n2") == doctest::Approx(1.0).epsilon(1e-12));  // symmetric divider
    CHECK(v.at("0") == 0.0);

    Netlist single;
    single.sources.push_back({"src", "a", "0", DriveDC{5.0}});
    single.resistors.push_back({"r", "a", "0", 42.0});
    CHECK(nodal_solve(single, state_of(0, 0), 0.0).at("a") ==
          doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("nodal_solve reports floating subcircuits") {
    Netlist nl;  // r2 hangs between two nodes that never reach ground
    nl.sources.push_back({"src", "n1", "0", DriveDC{1.0}});
    nl.resistors.push_back({"r1", "n1", "0", 100.0});
    nl.resistors.push_back({"r2", "n2", "n3", 100.0});
    CHECK_THROWS_AS(nodal_solve(nl, state_of(0, 0), 0.0), topology_error);
    try {
        nodal_solve(nl, state_of(0, 0), 0.0);
    } catch (const topology_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("n2") != std::string::npos);
        CHECK(msg.find("n3") != std::string::npos);
    }
}

TEST_CASE("memristor polarity follows terminal order") {
    Netlist nl;
    nl.models.emplace_back("m1", ref_model());
    nl.sources.push_back({"src", "n1", "0", DriveDC{2.0}});
    nl.memristors.push_back({"d0", "n1", "n2", "m1", DeviceState::Off, {}});
    nl.memristors.push_back({"d1", "0", "n2", "m1", DeviceState::Off, {}});  // reversed
    Network net = make_network(nl);
    auto v = device_voltages(net, state_of(0, 2), 0.0);
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("transition_rates composes dividers with the rate law") {
    Network net = make_series(2, ref_model(), DriveDC{2.0});
    auto r = transition_rates(net, state_of(0b00, 2), 0.0);
    CHECK(r[0] == doctest::Approx(kRateAt1V).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(kRateAt1V).epsilon(1e-12));

    // Negative DC with everything off: all-zero rates.
    Network neg = make_series(4, ref_model(), DriveDC{-2.0});
    auto rn = transition_rates(neg, state_of(0, 4), 0.0);
    for (double x : rn) CHECK(x == 0.0);

    Network par = make_parallel(6, ref_model(), DriveDC{1.0});
    auto rp = transition_rates(par, state_of(0, 6), 0.0);
    for (double x : rp) CHECK(x == doctest::Approx(kRateAt1V).epsilon(1e-12));
}

TEST_CASE("transition_rates stay finite and non-negative everywhere") {
    Network net = make_series(4, ref_model(), DriveDC{8.0});
    Network sine = make_series(3, ref_model(), DriveSine{2.0, 1e3, 0.0});
    for (std::uint32_t bits = 0; bits < (1u << 4); ++bits) {
        for (double r : transition_rates(net, state_of(bits, 4), 0.0)) {
            CHECK(r >= 0.0);
            CHECK(std::isfinite(r));
        }
    }
    for (std::uint32_t bits = 0; bits < (1u << 3); ++bits)
        for (double t : {0.0, 1e-4, 3e-4, 7e-4})
            for (double r : transition_rates(sine, state_of(bits, 3), t)) {
                CHECK(r >= 0.0);
                CHECK(std::isfinite(r));
            }
}

TEST_CASE("switching one series device raises the voltage on every off device") {
    Network net = make_series(6, ref_model(), DriveDC{6.0});
    const int n = 6;
    for (std::uint32_t bits = 0; bits + 1 < (1u << n); ++bits) {
        NetworkState s = state_of(bits, n);
        auto before = device_voltages(net, s, 0.0);
        for (int j = 0; j < n; ++j) {
            if (s.on(j)) continue;
            auto after = device_voltages(net, s.with_flipped(j), 0.0);
            for (int m = 0; m < n; ++m) {
                if (m == j || s.on(m)) continue;
                CHECK(after[m] > before[m]);
            }
        }
    }
}

TEST_CASE("netlist validation catches structural errors") {
    auto base = [] {
        Netlist nl;
        nl.models.emplace_back("m1", ref_model());
        nl.sources.push_back({"src", "n1", "0", DriveDC{1.0}});
        nl.memristors.push_back({"d0", "n1", "0", "m1", DeviceState::Off, {}});
        return nl;
    };
    CHECK_NOTHROW(base().validate());

    Netlist no_source = base();
    no_source.sources.clear();
    CHECK_THROWS_AS(no_source.validate(), parse_error);

    Netlist bad_model = base();
    bad_model.memristors[0].model_id = "nope";
    CHECK_THROWS_AS(bad_model.validate(), parse_error);

    Netlist self_loop = base();
    self_loop.resistors.push_back({"r1", "n1", "n1", 100.0});
    CHECK_THROWS_AS(self_loop.validate(), parse_error);

    Netlist neg_r = base();
    neg_r.resistors.push_back({"r1", "n1", "0", -5.0});
    CHECK_THROWS_AS(neg_r.validate(), parse_error);

    Netlist dup = base();
    dup.resistors.push_back({"d0", "n1", "0", 5.0});  // name collides with the memristor
    CHECK_THROWS_AS(dup.validate(), parse_error);

    Netlist floating = base();
    floating.resistors.push_back({"r9", "x1", "x2", 10.0});
    CHECK_THROWS_AS(floating.validate(), parse_error);
}

TEST_CASE("network state helpers") {
    NetworkState s{0b0101, 4};
    CHECK(s.on(0));
    CHECK(!s.on(1));
    CHECK(s.on_count() == 2);
    CHECK(!s.all_on());
    CHECK(s.with_flipped(1).bits == 0b0111);
    CHECK(NetworkState{0b1111, 4}.all_on());
    CHECK(s.index() == 5);
}

TEST_SUITE_END();
