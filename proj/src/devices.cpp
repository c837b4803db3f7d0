#include "memkin/devices.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace memkin {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

void require_finite(double v) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite voltage");
}

}  // namespace

void PoissonExpModel::validate() const {
    require(std::isfinite(tau0) && tau0 > 0, "PoissonExpModel: tau0 must be > 0");
    require(std::isfinite(v0) && v0 > 0, "PoissonExpModel: v0 must be > 0");
    require(std::isfinite(tau1) && tau1 > 0, "PoissonExpModel: tau1 must be > 0");
    require(std::isfinite(v1) && v1 > 0, "PoissonExpModel: v1 must be > 0");
    require(std::isfinite(r_on) && r_on > 0, "PoissonExpModel: r_on must be > 0");
    require(std::isfinite(r_off) && r_off > r_on, "PoissonExpModel: r_off must exceed r_on");
}

void AptmModel::validate() const {
    require(std::isfinite(k_on) && k_on > 0, "AptmModel: k_on must be > 0");
    require(std::isfinite(k_off) && k_off > 0, "AptmModel: k_off must be > 0");
    require(std::isfinite(v_on) && v_on > 0, "AptmModel: v_on must be > 0");
    require(std::isfinite(v_off) && v_off < 0, "AptmModel: v_off must be < 0");
    require(std::isfinite(alpha_on) && alpha_on > 0, "AptmModel: alpha_on must be > 0");
    require(std::isfinite(alpha_off) && alpha_off > 0, "AptmModel: alpha_off must be > 0");
    require(std::isfinite(r_on) && r_on > 0, "AptmModel: r_on must be > 0");
    require(std::isfinite(r_off) && r_off > r_on, "AptmModel: r_off must exceed r_on");
}

void ParamSpread::validate() const {
    require(tau0_range[0] > 0 && tau0_range[0] <= tau0_range[1],
            "ParamSpread: tau0 interval must be positive and ordered");
    require(v0_range[0] > 0 && v0_range[0] <= v0_range[1],
            "ParamSpread: v0 interval must be positive and ordered");
}

double tau_of_voltage(double v, double tau0, double v0) {
    require_finite(v);
    double tau = tau0 * std::exp(-v / v0);
    // For |v|/v0 beyond ~700 the product underflows; keep the result strictly
    // positive so downstream reciprocals stay well defined.
    if (tau == 0.0) return std::numeric_limits<double>::denorm_min();
    return tau;
}

double rate_off_on(double v, const PoissonExpModel& model) {
    require_finite(v);
    if (v <= 0.0) return 0.0;
    double tau = tau_of_voltage(v, model.tau0, model.v0);
    if (tau <= 1.0 / kRateCap) return kRateCap;
    return 1.0 / tau;
}

double rate_on_off(double v, const PoissonExpModel& model) {
    require_finite(v);
    if (v >= 0.0) return 0.0;
    double tau = tau_of_voltage(-v, model.tau1, model.v1);
    if (tau <= 1.0 / kRateCap) return kRateCap;
    return 1.0 / tau;
}

double aptm_rate(double v, const AptmModel& model, DeviceState from) {
    require_finite(v);
    if (from == DeviceState::Off) {
        if (v <= model.v_on) return 0.0;
        return model.k_on * std::pow(v / model.v_on - 1.0, model.alpha_on);
    }
    if (v >= model.v_off) return 0.0;
    return model.k_off * std::pow(v / model.v_off - 1.0, model.alpha_off);
}

double switching_rate(double v, const DeviceModel& model, DeviceState from) {
    if (const auto* pe = std::get_if<PoissonExpModel>(&model)) {
        return from == DeviceState::Off ? rate_off_on(v, *pe) : rate_on_off(v, *pe);
    }
    return aptm_rate(v, std::get<AptmModel>(model), from);
}

double resistance(DeviceState state, const DeviceModel& model) {
    return state == DeviceState::On ? r_on_of(model) : r_off_of(model);
}

double r_on_of(const DeviceModel& model) {
    return std::visit([](const auto& m) { return m.r_on; }, model);
}

double r_off_of(const DeviceModel& model) {
    return std::visit([](const auto& m) { return m.r_off; }, model);
}

PoissonExpModel sample_params(const PoissonExpModel& base, const ParamSpread& spread,
                              RngStream& rng) {
    spread.validate();
    PoissonExpModel out = base;
    out.tau0 = rng.uniform(spread.tau0_range[0], spread.tau0_range[1]);
    out.v0 = rng.uniform(spread.v0_range[0], spread.v0_range[1]);
    return out;
}

DeviceModel sample_params(const DeviceModel& base, const ParamSpread& spread, RngStream& rng) {
    if (const auto* pe = std::get_if<PoissonExpModel>(&base)) {
        return sample_params(*pe, spread, rng);
    }
    throw std::invalid_argument("sample_params: parameter spreads apply to POISSON models only");
}

}  // namespace memkin
