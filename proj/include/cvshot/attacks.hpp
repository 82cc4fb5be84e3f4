#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "cvshot/params.hpp"
#include "cvshot/rng.hpp"
#include "cvshot/schedule.hpp"

namespace cvshot {

/// Eve measures a fraction mu of the pulses and resends; each intercepted
/// pulse carries 2 SNU of added noise at the channel output (before Bob's
/// attenuation), so group excess noise at Bob scales as r*eta*2*mu.
struct InterceptResend {
    double mu = 1.0;
};

/// Detector saturation: the homodyne output x (SNU std units) becomes
/// clip(x + delta_eff, -alpha, +alpha). delta is the offset imposed on the
/// states at Bob's entrance; the engine refers it to the detector as
/// delta * (r*eta)^offset_atten_exponent, which vanishes with the signal
/// path shut (r = 0) so the shot-noise measurement is unaffected.
struct Saturation {
    double alpha = 4.0;
    double delta = 4.0;
    double offset_atten_exponent = 1.25;
};

/// Attenuation-dependent noise injection at the detector input with variance
/// v_wl(r) = c2 r^2 + c1 r + c0, minimum at r = 1 (c1 = -2 c2, c0 >= c2).
/// At r = 0 it inflates the apparent shot noise by c0.
struct WavelengthInjection {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    double variance_at(double r) const { return (c2 * r + c1) * r + c0; }
    bool is_null() const { return c0 == 0.0 && c1 == 0.0 && c2 == 0.0; }
};

using SingleAttack = std::variant<InterceptResend, Saturation, WavelengthInjection>;

/// An attack configuration is any subset of the three models; composition
/// order through the receiver is fixed: intercept-resend (channel), then
/// wavelength injection (detector input), then saturation (detector output).
struct AttackConfig {
    std::vector<SingleAttack> attacks;

    static AttackConfig none() { return {}; }
    static AttackConfig single(SingleAttack a) { return AttackConfig{{std::move(a)}}; }

    bool empty() const { return attacks.empty(); }
    void validate() const;
};

/// Validated, order-normalized view used by the simulation engine.
struct AttackPipeline {
    std::optional<InterceptResend> intercept_resend;
    std::optional<WavelengthInjection> wavelength;
    std::optional<Saturation> saturation;
};

AttackPipeline normalize_attack(const AttackConfig& config);

/// Channel-output transform: with probability mu adds Gaussian noise of
/// variance 2 SNU. mu = 0 is the identity and consumes no randomness.
double apply_intercept_resend(double mu, double channel_output, RngStream& stream);

/// clip(x + delta, -alpha, +alpha) in shot-noise std units.
double apply_saturation(double alpha, double delta, double detector_output_snu);

/// Returns +-sqrt(v_wl(r)) with equiprobable sign, so a group's noise
/// variance gains exactly v_wl(r) and its mean is unchanged. Independent of
/// the Alice symbol.
double apply_wavelength_injection(const WavelengthInjection& coeffs, double r, RngStream& stream);

/// Admissible coefficient region for the wavelength searches (c1 = -2 c2 is
/// implied; 0 <= c2 <= c0 <= c0_max enforces v_wl >= 0 on [0,1]).
struct WavelengthCoeffSpace {
    double c0_max = 25.0;
    double c2_max = 25.0;
};

/// Eve's calibration against a full (or partial) intercept-and-resend:
/// grid search over (c0, c2) minimizing the apparent noise-vs-signal slope
/// of the expected group curve, subject to v_wl >= 0 within the injection
/// budget. Ties resolve toward the smallest injected power.
WavelengthInjection calibrate_wavelength_masking(const SystemParams& params,
                                                 const AttenuationSchedule& schedule, double mu,
                                                 const WavelengthCoeffSpace& space = {});

/// Largest reduction of the apparent noise-vs-signal slope achievable by a
/// wavelength injection while every linear-fit residual, in true shot-noise
/// units (honest intercept 1 + v_el), stays <= residual_budget. Derivative-
/// free refinement of a (c0, c2) grid; an infeasible budget returns 0.
double max_hidden_slope(const WavelengthCoeffSpace& space, double residual_budget,
                        const SystemParams& params, const AttenuationSchedule& schedule);

}  // namespace cvshot
