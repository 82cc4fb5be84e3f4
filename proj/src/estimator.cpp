#include "cvshot/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace cvshot {

double MomentAccumulator::alice_variance() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    return saa_ / n - (sa_ / n) * (sa_ / n);
}

double MomentAccumulator::bob_variance() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    return sbb_ / n - (sb_ / n) * (sb_ / n);
}

ProjectionStats MomentAccumulator::projection() const {
    const double n = static_cast<double>(n_);
    const double var_a = alice_variance();
    const double var_b = bob_variance();
    ProjectionStats out;
    if (var_a <= 0.0) {
        out.signal_var = 0.0;
        out.noise_var = var_b;
        out.correlation = 0.0;
        return out;
    }
    const double cov = sab_ / n - (sa_ / n) * (sb_ / n);
    out.signal_var = cov * cov / var_a;
    out.noise_var = var_b - out.signal_var;
    out.correlation = var_b > 0.0 ? cov / std::sqrt(var_a * var_b) : 0.0;
    return out;
}

ProjectionStats project_signal_noise(std::span<const double> alice, std::span<const double> bob) {
    if (alice.size() != bob.size() || alice.size() < 2)
        throw Error(ErrorCode::Validation, "projection needs two equal-length vectors, n >= 2");
    const double n = static_cast<double>(alice.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < alice.size(); ++i) {
        mean_a += alice[i];
        mean_b += bob[i];
    }
    mean_a /= n;
    mean_b /= n;
    double saa = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < alice.size(); ++i) {
        const double da = alice[i] - mean_a;
        saa += da * da;
        sab += da * (bob[i] - mean_b);
    }
    if (saa <= 0.0) throw Error(ErrorCode::VarZero, "VAR_ZERO: alice vector has no variance");
    const double rho = sab / saa;
    // S = rho * centered alice; the residual is orthogonal to alice by
    // construction, so the two variances sum to Var(bob).
    double ss = 0.0, sn = 0.0, sb2 = 0.0;
    for (std::size_t i = 0; i < alice.size(); ++i) {
        const double s = rho * (alice[i] - mean_a);
        const double e = (bob[i] - mean_b) - s;
        ss += s * s;
        sn += e * e;
        sb2 += (bob[i] - mean_b) * (bob[i] - mean_b);
    }
    ProjectionStats out;
    out.signal_var = ss / n;
    out.noise_var = sn / n;
    out.correlation = sb2 > 0.0 ? sab / std::sqrt(saa * sb2) : 0.0;
    return out;
}

LinearFit fit_affine(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw Error(ErrorCode::FitDegenerate, "FIT_DEGENERATE: affine fit needs >= 3 points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0)
        throw Error(ErrorCode::FitDegenerate, "FIT_DEGENERATE: x values have no variance");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.residuals.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fit.residuals[i] = ys[i] - (fit.intercept + fit.slope * xs[i]);
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(fit.residuals[i]));
    }
    return fit;
}

std::vector<GroupStats> normalize_to_snu(const std::vector<GroupStats>& stats,
                                         const LinearFit& noise_fit) {
    if (noise_fit.intercept <= 0.0)
        throw Error(ErrorCode::ShotNonPositive, "SHOT_NONPOSITIVE: noise-fit intercept <= 0");
    std::vector<GroupStats> out = stats;
    for (auto& g : out) {
        g.signal_var /= noise_fit.intercept;
        g.noise_var /= noise_fit.intercept;
        g.unit = VarianceUnit::Snu;
    }
    return out;
}

std::vector<GroupStats> stats_for_quadrature(const std::vector<GroupStats>& all_stats,
                                             Quadrature q) {
    std::vector<GroupStats> out;
    for (const auto& g : all_stats)
        if (g.quadrature == q) out.push_back(g);
    std::sort(out.begin(), out.end(),
              [](const GroupStats& a, const GroupStats& b) { return a.atten_index < b.atten_index; });
    return out;
}

GateVerdict gate(const std::vector<GroupStats>& stats, const AttenuationSchedule& schedule,
                 const GateThresholds& thresholds) {
    if (stats.size() < 3) throw Error(ErrorCode::Validation, "gate needs at least 3 groups");
    if (stats.size() != schedule.size())
        throw Error(ErrorCode::Validation, "gate needs one group per schedule level");
    GateVerdict verdict;
    std::vector<double> s(stats.size()), nv(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        s[i] = stats[i].signal_var;
        nv[i] = stats[i].noise_var;
    }
    try {
        const LinearFit noise_fit = fit_affine(s, nv);
        verdict.r2_noise_signal = noise_fit.r_squared;
        verdict.shot_noise_estimate = noise_fit.intercept;
        verdict.excess_noise_slope = noise_fit.slope;
        if (noise_fit.intercept <= 0.0) {
            verdict.reject_reasons.push_back(kReasonShotNonPositive);
        } else {
            verdict.max_residual_snu = noise_fit.max_abs_residual / noise_fit.intercept;
            verdict.key_group_signal_snu =
                stats[schedule.key_group_index].signal_var / noise_fit.intercept;
            if (noise_fit.r_squared < thresholds.r2_min)
                verdict.reject_reasons.push_back(kReasonNoiseFitR2);
            if (verdict.max_residual_snu > thresholds.residual_max_snu)
                verdict.reject_reasons.push_back(kReasonResidualBudget);
        }
        const LinearFit atten_fit = fit_affine(schedule.ratios, s);
        verdict.r2_signal_atten = atten_fit.r_squared;
        if (atten_fit.r_squared < thresholds.r2_min)
            verdict.reject_reasons.push_back(kReasonAttenFitR2);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::FitDegenerate)
            verdict.reject_reasons.push_back(kReasonFitDegenerate);
        else if (e.code() == ErrorCode::ShotNonPositive)
            verdict.reject_reasons.push_back(kReasonShotNonPositive);
        else
            throw;
    }
    verdict.accepted = verdict.reject_reasons.empty();
    return verdict;
}

BlockVerdict gate_block(const std::vector<GroupStats>& all_stats,
                        const AttenuationSchedule& schedule, const GateThresholds& thresholds) {
    BlockVerdict block;
    block.x = gate(stats_for_quadrature(all_stats, Quadrature::X), schedule, thresholds);
    block.p = gate(stats_for_quadrature(all_stats, Quadrature::P), schedule, thresholds);
    block.accepted = block.x.accepted && block.p.accepted;
    return block;
}

double estimator_sigma(std::int64_t n) {
    if (n < 2) throw Error(ErrorCode::Validation, "estimator_sigma needs n >= 2");
    return std::sqrt(2.0 / static_cast<double>(n));
}

}  // namespace cvshot
