#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cvshot/params.hpp"
#include "cvshot/schedule.hpp"

namespace cvshot {

enum class VarianceUnit : std::uint8_t { Volts2 = 0, Snu = 1 };

/// Per-(attenuation level, quadrature) signal and noise variance.
struct GroupStats {
    std::uint32_t atten_index = 0;
    Quadrature quadrature = Quadrature::X;
    std::int64_t n = 0;
    double signal_var = 0.0;
    double noise_var = 0.0;
    VarianceUnit unit = VarianceUnit::Volts2;
};

struct ProjectionStats {
    double signal_var = 0.0;
    double noise_var = 0.0;
    double correlation = 0.0;
};

/// Streaming first/second moment accumulator for one group. Merging two
/// accumulators over a partition of the data reproduces the whole-data sums
/// exactly (count-weighted combination of raw sums).
class MomentAccumulator {
public:
    void add(double alice, double bob) {
        ++n_;
        sa_ += alice;
        sb_ += bob;
        saa_ += alice * alice;
        sbb_ += bob * bob;
        sab_ += alice * bob;
    }
    void merge(const MomentAccumulator& other) {
        n_ += other.n_;
        sa_ += other.sa_;
        sb_ += other.sb_;
        saa_ += other.saa_;
        sbb_ += other.sbb_;
        sab_ += other.sab_;
    }
    std::int64_t count() const { return n_; }
    double alice_variance() const;
    double bob_variance() const;
    double bob_mean() const { return n_ > 0 ? sb_ / static_cast<double>(n_) : 0.0; }

    /// Projection split from the accumulated moments. Zero alice variance
    /// reports signal_var = 0 and noise_var = Var(bob) (the r = 0 bypass).
    ProjectionStats projection() const;

private:
    std::int64_t n_ = 0;
    double sa_ = 0.0, sb_ = 0.0, saa_ = 0.0, sbb_ = 0.0, sab_ = 0.0;
};

/// Projects bob onto alice after mean-centering both: Y = S + (Y - S) with
/// S proportional to X. Returns Var(S), Var(Y-S) and the correlation.
/// The two parts are orthogonal, so signal_var + noise_var = Var(Y) up to
/// roundoff. Throws VAR_ZERO when alice has no variance.
ProjectionStats project_signal_noise(std::span<const double> alice, std::span<const double> bob);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> residuals;  // observed - fitted, input order
    double max_abs_residual = 0.0;
};

/// Ordinary least squares y = intercept + slope*x. r_squared is
/// Cov^2(x,y) / (Var(x) Var(y)). Requires >= 3 points and Var(x) > 0
/// (FIT_DEGENERATE otherwise).
LinearFit fit_affine(std::span<const double> xs, std::span<const double> ys);

/// Divides every variance by the noise-fit intercept, so the fitted noise
/// intercept becomes exactly 1 (the shot-noise unit). Non-positive intercept
/// throws SHOT_NONPOSITIVE.
std::vector<GroupStats> normalize_to_snu(const std::vector<GroupStats>& stats,
                                         const LinearFit& noise_fit);

struct GateThresholds {
    double r2_min = 0.99;
    double residual_max_snu = 2e-4;
};

/// Reject reason labels, reported verbatim.
inline constexpr const char* kReasonNoiseFitR2 = "NOISE_FIT_R2";
inline constexpr const char* kReasonResidualBudget = "RESIDUAL_BUDGET";
inline constexpr const char* kReasonAttenFitR2 = "ATTEN_FIT_R2";
inline constexpr const char* kReasonShotNonPositive = "SHOT_NONPOSITIVE";
inline constexpr const char* kReasonFitDegenerate = "FIT_DEGENERATE";

struct GateVerdict {
    bool accepted = false;
    double r2_noise_signal = 0.0;
    double r2_signal_atten = 0.0;
    double max_residual_snu = 0.0;
    double shot_noise_estimate = 0.0;  // volts^2; 1 SNU by definition
    double excess_noise_slope = 0.0;   // SNU per SNU
    double key_group_signal_snu = 0.0;
    std::vector<std::string> reject_reasons;
};

/// Applies the acceptance criteria to one quadrature's group curve: the
/// noise-vs-signal fit must have R^2 >= r2_min and max |residual| in SNU
/// <= residual_max_snu, and the signal-vs-attenuation fit must have
/// R^2 >= r2_min. stats must hold one entry per schedule level.
GateVerdict gate(const std::vector<GroupStats>& stats, const AttenuationSchedule& schedule,
                 const GateThresholds& thresholds);

/// Both quadratures gated independently; the block is used for key only if
/// both accept.
struct BlockVerdict {
    GateVerdict x;
    GateVerdict p;
    bool accepted = false;
};

BlockVerdict gate_block(const std::vector<GroupStats>& all_stats,
                        const AttenuationSchedule& schedule, const GateThresholds& thresholds);

/// Relative standard deviation of the variance estimator of n normalized
/// Gaussian values: sqrt(2/n). Sizes error bars and acceptance tolerances.
double estimator_sigma(std::int64_t n);

/// Splits stats by quadrature and orders by attenuation index.
std::vector<GroupStats> stats_for_quadrature(const std::vector<GroupStats>& all_stats,
                                             Quadrature q);

}  // namespace cvshot
