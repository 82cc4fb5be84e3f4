#include "cvshot/scenarios.hpp"

namespace cvshot {
namespace scenarios {

namespace {
constexpr double kReferenceSlope = 2.07e-3;  // reference noise-vs-signal slope
constexpr double kGainV2 = 783.16e-6;    // 783.16 mV^2 per SNU
}  // namespace

SystemParams honest_default() {
    SystemParams p;
    p.v_a = 40.0;
    p.t_channel = 1.0;
    p.eta = 0.9;
    p.eps_mod = kReferenceSlope * p.v_a;
    p.v_el = 0.01;
    p.gain_v2 = kGainV2;
    p.n_per_group = 1'000'000;
    p.seed = 1;
    return p;
}

AttenuationSchedule honest_schedule() { return build_geometric_schedule(16, 0.7, 1.0); }

SystemParams wavelength_masking_system() {
    SystemParams p;
    p.v_a = 20.0;
    p.t_channel = 1.0;
    p.eta = 0.322;
    p.eps_mod = kReferenceSlope * p.v_a;
    p.v_el = 0.01;
    p.gain_v2 = kGainV2;
    p.n_per_group = 1'000'000;
    p.seed = 1;
    return p;
}

AttackConfig wavelength_masking_attack(const SystemParams& params,
                                       const AttenuationSchedule& schedule) {
    const WavelengthInjection wl = calibrate_wavelength_masking(params, schedule, 1.0);
    AttackConfig config;
    config.attacks.push_back(InterceptResend{1.0});
    config.attacks.push_back(wl);
    config.validate();
    return config;
}

SystemParams saturation_system(double v_b) {
    SystemParams p;
    p.v_a = v_b;  // eta = t = 1, so V_B at the detector equals V_A
    p.t_channel = 1.0;
    p.eta = 1.0;
    p.eps_mod = kReferenceSlope * p.v_a;
    p.v_el = 0.01;
    p.gain_v2 = kGainV2;
    p.n_per_group = 1'000'000;
    p.seed = 1;
    return p;
}

AttackConfig saturation_attack(double mu, double alpha, double delta) {
    AttackConfig config;
    if (mu > 0.0) config.attacks.push_back(InterceptResend{mu});
    Saturation sat;
    sat.alpha = alpha;
    sat.delta = delta;
    config.attacks.push_back(sat);
    config.validate();
    return config;
}

AttenuationSchedule saturation_schedule() { return build_uniform_schedule(16); }

SystemParams hidden_slope_system() {
    SystemParams p;
    p.v_a = 1.25;
    p.t_channel = 1.0;
    p.eta = 1.0;
    p.eps_mod = kReferenceSlope * p.v_a;
    p.v_el = 0.01;
    p.gain_v2 = kGainV2;
    p.n_per_group = 1'000'000;
    p.seed = 1;
    return p;
}

}  // namespace scenarios
}  // namespace cvshot
