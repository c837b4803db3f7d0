#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "memkin/devices.hpp"
#include "memkin/rng.hpp"

using namespace memkin;

namespace {

// Reference electrochemical-cell parameters (Fig.-2-style fit).
PoissonExpModel ref_model() { return {3e5, 0.05, 3e5, 0.05, 1e3, 1e4}; }

AptmModel ref_aptm() { return {1e5, 1e5, 1.0, -1.0, 1.0, 1.0, 1e3, 1e4}; }

// High-precision values (computed once with 40-digit arithmetic).
constexpr double kTauAt1V = 6.1834608673156735e-4;   // 3e5 * exp(-20)
constexpr double kTauAt2V = 1.2745062765874767e-12;  // 3e5 * exp(-40)
constexpr double kRateAt1V = 1617.2173180326343;     // exp(20) / 3e5

}  // namespace

TEST_SUITE_BEGIN("devices");

TEST_CASE("tau_of_voltage evaluates the exponential law") {
    CHECK(tau_of_voltage(0.0, 3e5, 0.05) == 3e5);  // exp(0) is exact
    CHECK(tau_of_voltage(1.0, 3e5, 0.05) == doctest::Approx(kTauAt1V).epsilon(1e-13));
    CHECK(tau_of_voltage(2.0, 3e5, 0.05) == doctest::Approx(kTauAt2V).epsilon(1e-13));
}

TEST_CASE("tau_of_voltage rejects non-finite input and stays positive") {
    CHECK_THROWS_AS(tau_of_voltage(std::numeric_limits<double>::quiet_NaN(), 3e5, 0.05),
                    std::domain_error);
    CHECK_THROWS_AS(tau_of_voltage(std::numeric_limits<double>::infinity(), 3e5, 0.05),
                    std::domain_error);
    for (double v = -30.0; v <= 60.0; v += 1.3) CHECK(tau_of_voltage(v, 3e5, 0.05) > 0.0);
    // Far beyond double range for the product itself.
    CHECK(tau_of_voltage(1e3, 3e5, 0.05) > 0.0);
}

TEST_CASE("rate_off_on gates on the voltage sign") {
    PoissonExpModel m = ref_model();
    CHECK(rate_off_on(-0.5, m) == 0.0);
    CHECK(rate_off_on(0.0, m) == 0.0);  // boundary assigned to the zero branch
    CHECK(rate_off_on(1.0, m) == doctest::Approx(kRateAt1V).epsilon(1e-13));
    for (double v = -5.0; v <= 0.0; v += 0.25) CHECK(rate_off_on(v, m) == 0.0);
    for (double v = 0.05; v <= 5.0; v += 0.25) CHECK(rate_off_on(v, m) > 0.0);
}

TEST_CASE("rate_on_off mirrors rate_off_on") {
    PoissonExpModel m = ref_model();
    CHECK(rate_on_off(0.5, m) == 0.0);
    CHECK(rate_on_off(0.0, m) == 0.0);
    CHECK(rate_on_off(-1.0, m) == doctest::Approx(kRateAt1V).epsilon(1e-13));
    for (double v = 0.1; v <= 5.0; v += 0.3)
        CHECK(rate_on_off(-v, m) == doctest::Approx(rate_off_on(v, m)).epsilon(1e-15));
}

TEST_CASE("rate_off_on is strictly increasing for V > 0") {
    PoissonExpModel m = ref_model();
    double prev = 0.0;
    for (double v = 0.01; v <= 3.0; v += 0.01) {
        double r = rate_off_on(v, m);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("reciprocity: rate * tau = 1") {
    PoissonExpModel m = ref_model();
    for (double v = 0.02; v <= 20.0; v += 0.37) {
        double p = rate_off_on(v, m) * tau_of_voltage(v, m.tau0, m.v0);
        CHECK(std::abs(p - 1.0) <= 1e-12);
    }
}

TEST_CASE("huge overdrive clamps to the rate cap instead of overflowing") {
    PoissonExpModel m = ref_model();
    double r = rate_off_on(40.0, m);  // V/V0 = 800
    CHECK(std::isfinite(r));
    CHECK(r == kRateCap);
    CHECK(std::isfinite(rate_on_off(-40.0, m)));
}

TEST_CASE("aptm_rate thresholds and power law") {
    AptmModel m = ref_aptm();
    CHECK(aptm_rate(0.9, m, DeviceState::Off) == 0.0);  // below threshold
    CHECK(aptm_rate(2.0, m, DeviceState::Off) == doctest::Approx(1e5).epsilon(1e-15));
    CHECK(aptm_rate(-2.0, m, DeviceState::On) == doctest::Approx(1e5).epsilon(1e-15));
    // Inside the dead zone both rates vanish identically.
    for (double v = -0.99; v <= 0.99; v += 0.11) {
        CHECK(aptm_rate(v, m, DeviceState::Off) == 0.0);
        CHECK(aptm_rate(v, m, DeviceState::On) == 0.0);
    }
    // No off->on response for negative voltage, no on->off for positive.
    CHECK(aptm_rate(-3.0, m, DeviceState::Off) == 0.0);
    CHECK(aptm_rate(3.0, m, DeviceState::On) == 0.0);
}

TEST_CASE("aptm_rate is continuous at the threshold") {
    AptmModel m = ref_aptm();
    m.alpha_on = 0.7;
    double prev = aptm_rate(1.0 + 1e-2, m, DeviceState::Off);
    for (double eps = 1e-3; eps >= 1e-9; eps /= 10.0) {
        double r = aptm_rate(1.0 + eps, m, DeviceState::Off);
        CHECK(r < prev);
        prev = r;
    }
    CHECK(prev < 1e-5 * m.k_on);
}

TEST_CASE("switching_rate dispatches over the model variant") {
    DeviceModel poisson = ref_model();
    DeviceModel aptm = ref_aptm();
    CHECK(switching_rate(1.0, poisson, DeviceState::Off) ==
          doctest::Approx(kRateAt1V).epsilon(1e-13));
    CHECK(switching_rate(-1.0, poisson, DeviceState::On) ==
          doctest::Approx(kRateAt1V).epsilon(1e-13));
    CHECK(switching_rate(2.0, aptm, DeviceState::Off) == doctest::Approx(1e5));
}

TEST_CASE("resistance returns the two levels") {
    DeviceModel m = ref_model();
    CHECK(resistance(DeviceState::Off, m) == 1e4);
    CHECK(resistance(DeviceState::On, m) == 1e3);
    // Flip round-trip lands on the other level.
    DeviceState s = DeviceState::Off;
    s = s == DeviceState::Off ? DeviceState::On : DeviceState::Off;
    CHECK(resistance(s, m) == 1e3);
}

TEST_CASE("sample_params with degenerate intervals returns the base") {
    RngStream rng(1, 0);
    ParamSpread spread{{3e5, 3e5}, {0.05, 0.05}};
    PoissonExpModel out = sample_params(ref_model(), spread, rng);
    CHECK(out == ref_model());
}

TEST_CASE("sample_params stays inside the closed intervals and keeps other fields") {
    RngStream rng(7, 3);
    ParamSpread spread{{2e5, 4e5}, {0.04, 0.06}};
    for (int i = 0; i < 2000; ++i) {
        PoissonExpModel out = sample_params(ref_model(), spread, rng);
        CHECK(out.tau0 >= 2e5);
        CHECK(out.tau0 <= 4e5);
        CHECK(out.v0 >= 0.04);
        CHECK(out.v0 <= 0.06);
        CHECK(out.tau1 == 3e5);
        CHECK(out.r_on == 1e3);
        CHECK(out.r_off == 1e4);
    }
}

TEST_CASE("sample_params mean matches the uniform distribution") {
    RngStream rng(2024, 11);
    ParamSpread spread{{2e5, 4e5}, {0.04, 0.06}};
    const int n = 100000;
    double sum_tau = 0.0, sum_v = 0.0;
    for (int i = 0; i < n; ++i) {
        PoissonExpModel out = sample_params(ref_model(), spread, rng);
        sum_tau += out.tau0;
        sum_v += out.v0;
    }
    double se_tau = (2e5 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
    double se_v = (0.02 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum_tau / n - 3e5) <= 3 * se_tau);
    CHECK(std::abs(sum_v / n - 0.05) <= 3 * se_v);
}

TEST_CASE("sample_params rejects APTM models and bad spreads") {
    RngStream rng(0, 0);
    ParamSpread spread{{2e5, 4e5}, {0.04, 0.06}};
    CHECK_THROWS_AS(sample_params(DeviceModel{ref_aptm()}, spread, rng), std::invalid_argument);
    ParamSpread inverted{{4e5, 2e5}, {0.04, 0.06}};
    CHECK_THROWS_AS(sample_params(ref_model(), inverted, rng), std::invalid_argument);
}

TEST_CASE("model validation enforces the invariants") {
    PoissonExpModel bad = ref_model();
    bad.tau0 = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ref_model();
    bad.r_off = bad.r_on;  // r_off must exceed r_on
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    AptmModel a = ref_aptm();
    a.v_off = 0.5;  // must be negative
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
    CHECK_NOTHROW(ref_model().validate());
    CHECK_NOTHROW(ref_aptm().validate());
}

TEST_SUITE_END();
