#pragma once

#include <vector>

#include "cvshot/attacks.hpp"
#include "cvshot/estimator.hpp"
#include "cvshot/params.hpp"
#include "cvshot/rng.hpp"
#include "cvshot/schedule.hpp"

namespace cvshot {

/// Independent Gaussian draws, mean 0, variance v_a (sqrt(SNU) amplitudes).
std::vector<double> draw_alice_symbols(const SystemParams& params, std::int64_t count,
                                       RngStream& stream);

/// One honest pulse: sqrt(gain_v2) * ( sqrt(r*eta*t)*(a + z) + n0 + n_el )
/// with z ~ N(0, eps_mod), n0 ~ N(0, 1), n_el ~ N(0, v_el). Per-pulse draw
/// order from the stream is fixed: z, n0, n_el (zero-variance terms consume
/// nothing).
double simulate_pulse(const SystemParams& params, double alice_value, double r,
                      RngStream& stream);

/// Closed-form expectations of the group statistics in SNU (the affine law):
/// s(r) = r*eta*t*v_a and n(r) = 1 + v_el + r*eta*(t*eps_mod + 2*mu) + v_wl(r).
double expected_signal_variance_snu(const SystemParams& params, double r);
double expected_noise_variance_snu(const SystemParams& params, double r, double mu_intercept = 0.0,
                                   const WavelengthInjection* wavelength = nullptr);

/// Full block: K*n_per_group pulses per quadrature, quadratures alternating
/// deterministically along the global pulse index. Each (quadrature, group)
/// pair owns its own noise sub-stream, so the block is reproducible
/// bit-for-bit regardless of how work is scheduled across threads.
std::vector<PulseRecord> simulate_block(const SystemParams& params,
                                        const AttenuationSchedule& schedule,
                                        const AttackConfig& attack = AttackConfig::none());

/// Same simulation, but streams per-group moment accumulators instead of
/// materializing pulse records (memory stays flat in n_per_group).
std::vector<GroupStats> simulate_group_stats(const SystemParams& params,
                                             const AttenuationSchedule& schedule,
                                             const AttackConfig& attack = AttackConfig::none());

/// Group statistics recomputed from a pulse record list (the analyze path).
std::vector<GroupStats> group_stats_from_records(const std::vector<PulseRecord>& records,
                                                 const AttenuationSchedule& schedule);

}  // namespace cvshot
