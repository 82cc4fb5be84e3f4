#pragma once

#include "cvshot/attacks.hpp"
#include "cvshot/params.hpp"
#include "cvshot/schedule.hpp"

namespace cvshot {
namespace scenarios {

/// Honest reference system: 16-level geometric schedule, noise-vs-signal
/// slope 2.07e-3, V_B = eta*V_A = 36 SNU (large enough that the desk-scale
/// R^2 criterion has headroom).
SystemParams honest_default();
AttenuationSchedule honest_schedule();

/// Full intercept-and-resend masked by a calibrated wavelength injection
/// (V_A = 20, T = 1, eta = 0.322).
SystemParams wavelength_masking_system();
AttackConfig wavelength_masking_attack(const SystemParams& params,
                                       const AttenuationSchedule& schedule);

/// Saturation attack regimes: V_B in {20, 1, 5} at eta = 1, T = 1, with full
/// intercept-and-resend and alpha = delta = 4 shot-noise std. The attack
/// simulations use a uniform 16-ratio schedule spanning 0..1.
SystemParams saturation_system(double v_b);
AttackConfig saturation_attack(double mu = 1.0, double alpha = 4.0, double delta = 4.0);
AttenuationSchedule saturation_schedule();

/// Reference grid for the hidden-slope bound: geometric schedule with top
/// signal variance 1.25 SNU.
SystemParams hidden_slope_system();

}  // namespace scenarios
}  // namespace cvshot
