#include "cvshot/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "cvshot/estimator.hpp"
#include "cvshot/simulate.hpp"

namespace cvshot {

namespace {

void validate_single(const SingleAttack& attack) {
    if (const auto* ir = std::get_if<InterceptResend>(&attack)) {
        if (ir->mu < 0.0 || ir->mu > 1.0)
            throw Error(ErrorCode::Validation, "intercept-resend fraction must lie in [0,1]");
    } else if (const auto* sat = std::get_if<Saturation>(&attack)) {
        if (sat->alpha <= 0.0) throw Error(ErrorCode::Validation, "saturation alpha must be > 0");
        if (sat->offset_atten_exponent < 0.0)
            throw Error(ErrorCode::Validation, "saturation offset exponent must be >= 0");
    } else if (const auto* wl = std::get_if<WavelengthInjection>(&attack)) {
        if (wl->is_null()) return;  // degenerate null injection is allowed
        if (wl->c2 <= 0.0)
            throw Error(ErrorCode::Validation, "wavelength injection needs c2 > 0");
        if (wl->c1 != -2.0 * wl->c2)
            throw Error(ErrorCode::Validation,
                        "wavelength polynomial must have its minimum at r = 1 (c1 = -2*c2)");
        if (wl->c0 < wl->c2)
            throw Error(ErrorCode::Validation, "wavelength polynomial must satisfy c0 >= c2");
        if (wl->c0 <= 0.0)
            throw Error(ErrorCode::Validation, "wavelength injection needs v_wl(0) = c0 > 0");
    }
}

}  // namespace

void AttackConfig::validate() const {
    bool seen[3] = {false, false, false};
    for (const auto& a : attacks) {
        validate_single(a);
        const std::size_t kind = a.index();
        if (seen[kind])
            throw Error(ErrorCode::Validation, "composite attack repeats an attack kind");
        seen[kind] = true;
    }
}

AttackPipeline normalize_attack(const AttackConfig& config) {
    config.validate();
    AttackPipeline pipeline;
    for (const auto& a : config.attacks) {
        if (const auto* ir = std::get_if<InterceptResend>(&a)) {
            if (ir->mu > 0.0) pipeline.intercept_resend = *ir;
        } else if (const auto* wl = std::get_if<WavelengthInjection>(&a)) {
            if (!wl->is_null()) pipeline.wavelength = *wl;
        } else if (const auto* sat = std::get_if<Saturation>(&a)) {
            pipeline.saturation = *sat;
        }
    }
    return pipeline;
}

double apply_intercept_resend(double mu, double channel_output, RngStream& stream) {
    if (mu < 0.0 || mu > 1.0)
        throw Error(ErrorCode::Validation, "intercept-resend fraction must lie in [0,1]");
    if (mu == 0.0) return channel_output;
    if (stream.uniform01() < mu) channel_output += stream.normal_var(2.0);
    return channel_output;
}

double apply_saturation(double alpha, double delta, double detector_output_snu) {
    return std::clamp(detector_output_snu + delta, -alpha, alpha);
}

double apply_wavelength_injection(const WavelengthInjection& coeffs, double r, RngStream& stream) {
    const double v = coeffs.variance_at(r);
    if (v <= 0.0) return 0.0;
    const double sign = stream.uniform01() < 0.5 ? -1.0 : 1.0;
    return sign * std::sqrt(v);
}

namespace {

struct CurveEval {
    double slope = 0.0;
    double max_residual_true_snu = 0.0;  // residuals over the honest intercept 1 + v_el
};

CurveEval eval_expected_curve(const SystemParams& params, const AttenuationSchedule& schedule,
                              double mu, const WavelengthInjection& wl) {
    std::vector<double> s(schedule.size()), n(schedule.size());
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const double r = schedule.ratios[i];
        s[i] = expected_signal_variance_snu(params, r);
        n[i] = expected_noise_variance_snu(params, r, mu, &wl);
    }
    const LinearFit fit = fit_affine(s, n);
    CurveEval eval;
    eval.slope = fit.slope;
    eval.max_residual_true_snu = fit.max_abs_residual / (1.0 + params.v_el);
    return eval;
}

WavelengthInjection coeffs_from(double c0, double c2) {
    WavelengthInjection wl;
    wl.c0 = c0;
    wl.c2 = c2;
    wl.c1 = -2.0 * c2;
    return wl;
}

}  // namespace

WavelengthInjection calibrate_wavelength_masking(const SystemParams& params,
                                                 const AttenuationSchedule& schedule, double mu,
                                                 const WavelengthCoeffSpace& space) {
    params.validate();
    schedule.validate();
    if (space.c0_max <= 0.0 || space.c2_max <= 0.0)
        throw Error(ErrorCode::Validation, "wavelength coefficient space must be positive");
    // Grid over (c0, c2) with v_wl >= 0 (c0 >= c2), minimizing the apparent
    // fitted slope; ties resolve toward less injected power (smaller c0).
    constexpr int kGrid = 41;
    WavelengthInjection best;
    double best_slope = eval_expected_curve(params, schedule, mu, best).slope;
    double best_c0 = 0.0;
    for (int i = 1; i <= kGrid; ++i) {
        const double c2 = space.c2_max * i / kGrid;
        for (int j = 0; j <= kGrid; ++j) {
            const double c0 = c2 + (space.c0_max - c2) * j / kGrid;
            if (c0 > space.c0_max || c0 < c2) continue;
            const WavelengthInjection wl = coeffs_from(c0, c2);
            const double slope = eval_expected_curve(params, schedule, mu, wl).slope;
            if (slope < best_slope - 1e-15 ||
                (std::abs(slope - best_slope) <= 1e-15 && c0 < best_c0)) {
                best = wl;
                best_slope = slope;
                best_c0 = c0;
            }
        }
    }
    return best;
}

double max_hidden_slope(const WavelengthCoeffSpace& space, double residual_budget,
                        const SystemParams& params, const AttenuationSchedule& schedule) {
    if (residual_budget < 0.0)
        throw Error(ErrorCode::Validation, "residual budget must be >= 0");
    if (residual_budget == 0.0) return 0.0;
    params.validate();
    schedule.validate();

    const double honest_slope =
        eval_expected_curve(params, schedule, 0.0, WavelengthInjection{}).slope;

    const auto hidden_if_feasible = [&](double c0, double c2) -> double {
        const CurveEval eval = eval_expected_curve(params, schedule, 0.0, coeffs_from(c0, c2));
        if (eval.max_residual_true_snu > residual_budget) return -1.0;
        return honest_slope - eval.slope;
    };

    // Log-scale grid over c2 (the residual scales linearly with c2, so the
    // feasible region can sit many decades below c2_max) crossed with a few
    // c0 choices, then bisection onto the feasibility boundary. Hiding grows
    // with c2 while the residual constraint tightens, so the optimum sits at
    // the largest feasible c2.
    double best_hidden = 0.0, best_c0 = 0.0, best_c2 = 0.0;
    constexpr int kGrid = 64;
    for (int i = 0; i <= kGrid; ++i) {
        const double c2 = space.c2_max * std::pow(1e-8, 1.0 - static_cast<double>(i) / kGrid);
        for (int j = 0; j <= 2; ++j) {
            const double c0 = c2 + (space.c0_max - c2) * j / 2;
            if (c0 < c2 || c0 > space.c0_max) continue;
            const double hidden = hidden_if_feasible(c0, c2);
            if (hidden > best_hidden) {
                best_hidden = hidden;
                best_c0 = c0;
                best_c2 = c2;
            }
        }
    }
    if (best_hidden <= 0.0) return 0.0;
    double lo = best_c2;
    double hi = std::min({space.c2_max, space.c0_max, best_c2 * std::pow(1e-8, -1.0 / kGrid)});
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double c0 = std::min(space.c0_max, std::max(best_c0, mid));
        const double hidden = hidden_if_feasible(c0, mid);
        if (hidden > best_hidden) {
            best_hidden = hidden;
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return best_hidden;
}

}  // namespace cvshot
