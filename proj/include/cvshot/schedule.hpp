#pragma once

#include <cstdint>
#include <vector>

#include "cvshot/params.hpp"
#include "cvshot/rng.hpp"

namespace cvshot {

/// Ordered attenuation ratios r_0 < r_1 < ... < r_{K-1}, each an intensity
/// transmission in [0,1]. Key is produced from the least attenuated group
/// (index K-1); all ratios are needed for parameter estimation.
struct AttenuationSchedule {
    std::vector<double> ratios;
    std::size_t key_group_index = 0;

    // Optional multiplicative control bias per level: effective ratio is
    // ratios[i] * (1 + level_bias[i]). Empty means unbiased. The analysis
    // side always uses the nominal ratios; the bias models a systematic
    // error in the attenuator control.
    std::vector<double> level_bias;

    std::size_t size() const { return ratios.size(); }
    double effective_ratio(std::size_t i) const {
        double r = ratios[i];
        if (!level_bias.empty()) r *= 1.0 + level_bias[i];
        return r;
    }
    /// Nominal fraction of pulses used for parameter estimation when only
    /// the key group feeds key production: (K-1)/K.
    double parameter_estimation_fraction() const {
        return static_cast<double>(ratios.size() - 1) / static_cast<double>(ratios.size());
    }

    void validate() const;
};

/// Geometric schedule r_i = top * step^(k-1-i). With k=16, step=0.7 the
/// dynamic range r_0/r_15 = 0.7^15 ~ 4.75e-3 (~23 dB), matching an amplitude
/// modulator extinction ratio of roughly 25 dB.
AttenuationSchedule build_geometric_schedule(int k, double step, double top);

/// Uniform schedule r_i = top * i/(k-1), i = 0..k-1 (includes an exact r=0
/// level, which a finite-extinction modulator cannot realize; used by the
/// attack simulations).
AttenuationSchedule build_uniform_schedule(int k, double top = 1.0);

AttenuationSchedule make_schedule_from_ratios(std::vector<double> ratios);

/// Uniform independent per-pulse assignment of attenuation levels, optionally
/// weighted (weights need not be normalized). Deterministic per stream.
std::vector<std::uint32_t> assign_random(const AttenuationSchedule& schedule, std::int64_t count,
                                         RngStream& stream,
                                         const std::vector<double>& weights = {});

}  // namespace cvshot
