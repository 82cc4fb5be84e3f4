#include "cvshot/simulate.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace cvshot {

std::vector<double> draw_alice_symbols(const SystemParams& params, std::int64_t count,
                                       RngStream& stream) {
    params.validate(/*allow_degenerate=*/true);
    if (count < 1) throw Error(ErrorCode::Validation, "symbol count must be >= 1");
    std::vector<double> symbols(static_cast<std::size_t>(count));
    const double sd = std::sqrt(params.v_a);
    for (auto& s : symbols) s = sd * stream.standard_normal();
    return symbols;
}

double simulate_pulse(const SystemParams& params, double alice_value, double r,
                      RngStream& stream) {
    if (r < 0.0 || r > 1.0)
        throw Error(ErrorCode::Validation, "attenuation ratio must lie in [0,1]");
    const double z = params.eps_mod > 0.0 ? stream.normal_var(params.eps_mod) : 0.0;
    const double n0 = stream.standard_normal();
    const double el = params.v_el > 0.0 ? stream.normal_var(params.v_el) : 0.0;
    const double amp = std::sqrt(r * params.eta * params.t_channel);
    return std::sqrt(params.gain_v2) * (amp * (alice_value + z) + n0 + el);
}

double expected_signal_variance_snu(const SystemParams& params, double r) {
    return r * params.eta * params.t_channel * params.v_a;
}

double expected_noise_variance_snu(const SystemParams& params, double r, double mu_intercept,
                                   const WavelengthInjection* wavelength) {
    double n = 1.0 + params.v_el +
               r * params.eta * (params.t_channel * params.eps_mod + 2.0 * mu_intercept);
    if (wavelength != nullptr) n += std::max(0.0, wavelength->variance_at(r));
    return n;
}

namespace {

// Per-group constants of the pulse transform, precomputed once.
struct GroupModel {
    double amp = 0.0;        // sqrt(r_eff * eta)
    double sqrt_t = 1.0;     // sqrt(t_channel)
    double wl_sigma = -1.0;  // sqrt(v_wl(r_eff)), < 0 when inactive
    double sat_alpha = 0.0;
    double sat_delta_eff = 0.0;
    bool saturate = false;
    double ir_mu = 0.0;
};

GroupModel make_group_model(const SystemParams& params, const AttenuationSchedule& schedule,
                            std::size_t group, const AttackPipeline& pipeline) {
    GroupModel m;
    const double r_eff = schedule.effective_ratio(group);
    m.amp = std::sqrt(r_eff * params.eta);
    m.sqrt_t = std::sqrt(params.t_channel);
    if (pipeline.intercept_resend) m.ir_mu = pipeline.intercept_resend->mu;
    if (pipeline.wavelength) {
        const double v = pipeline.wavelength->variance_at(r_eff);
        if (v > 0.0) m.wl_sigma = std::sqrt(v);
    }
    if (pipeline.saturation) {
        m.saturate = true;
        m.sat_alpha = pipeline.saturation->alpha;
        m.sat_delta_eff = pipeline.saturation->delta *
                          std::pow(r_eff * params.eta, pipeline.saturation->offset_atten_exponent);
    }
    return m;
}

// One pulse through channel and detector, in shot-noise std units. The
// per-pulse draw order from the group stream is frozen: z, [u_ir, w_ir],
// n0, n_el, [wavelength sign]; zero-variance terms consume nothing.
inline double pulse_snu(const SystemParams& params, const GroupModel& m, double alice,
                        RngStream& stream) {
    const double z = params.eps_mod > 0.0 ? stream.normal_var(params.eps_mod) : 0.0;
    double x_ch = m.sqrt_t * (alice + z);
    if (m.ir_mu > 0.0) x_ch = apply_intercept_resend(m.ir_mu, x_ch, stream);
    double x_det = m.amp * x_ch + stream.standard_normal();
    if (params.v_el > 0.0) x_det += stream.normal_var(params.v_el);
    if (m.wl_sigma >= 0.0) x_det += (stream.uniform01() < 0.5 ? -m.wl_sigma : m.wl_sigma);
    if (m.saturate) x_det = apply_saturation(m.sat_alpha, m.sat_delta_eff, x_det);
    return x_det;
}

// Each worker owns a stride of the groups and makes a single pass over the
// assignment vector, feeding every owned group's pulses to its own noise
// stream in pulse order. The streams make the output independent of the
// worker count and scheduling.
template <typename PerPulseSink>
void run_block(const SystemParams& params, const AttenuationSchedule& schedule,
               const AttackConfig& attack, PerPulseSink&& sink) {
    params.validate(/*allow_degenerate=*/true);
    schedule.validate();
    const AttackPipeline pipeline = normalize_attack(attack);
    const std::size_t k = schedule.size();
    const std::int64_t per_quad = static_cast<std::int64_t>(k) * params.n_per_group;

    for (unsigned quad = 0; quad < 2; ++quad) {
        RngStream assign_stream(params.seed, stream_id(StreamPurpose::Assignment, quad));
        const std::vector<std::uint32_t> assignment =
            assign_random(schedule, per_quad, assign_stream);
        RngStream alice_stream(params.seed, stream_id(StreamPurpose::AliceSymbols, quad));
        const std::vector<double> alice = draw_alice_symbols(params, per_quad, alice_stream);

        const unsigned n_workers = std::max(
            1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                   static_cast<unsigned>(k)));
        auto worker = [&](unsigned worker_id) {
            std::vector<GroupModel> models;
            std::vector<RngStream> streams;
            models.reserve(k);
            streams.reserve(k);
            for (std::size_t g = 0; g < k; ++g) {
                models.push_back(make_group_model(params, schedule, g, pipeline));
                streams.emplace_back(params.seed, stream_id(StreamPurpose::GroupNoise, quad,
                                                            static_cast<unsigned>(g)));
            }
            for (std::size_t j = 0; j < assignment.size(); ++j) {
                const std::uint32_t g = assignment[j];
                if (g % n_workers != worker_id) continue;
                const double bob_snu = pulse_snu(params, models[g], alice[j], streams[g]);
                sink(static_cast<Quadrature>(quad), j, g, alice[j], bob_snu);
            }
        };
        std::vector<std::thread> threads;
        threads.reserve(n_workers - 1);
        for (unsigned t = 1; t < n_workers; ++t) threads.emplace_back(worker, t);
        worker(0);
        for (auto& t : threads) t.join();
    }
}

}  // namespace

std::vector<PulseRecord> simulate_block(const SystemParams& params,
                                        const AttenuationSchedule& schedule,
                                        const AttackConfig& attack) {
    const std::size_t k = schedule.size();
    const std::size_t per_quad = k * static_cast<std::size_t>(params.n_per_group);
    std::vector<PulseRecord> records(2 * per_quad);
    const double sqrt_gain = std::sqrt(params.gain_v2);

    run_block(params, schedule, attack,
              [&](Quadrature quad, std::size_t j, std::uint32_t group, double alice,
                  double bob_snu) {
                  const std::size_t idx = 2 * j + static_cast<std::size_t>(quad);
                  PulseRecord& rec = records[idx];
                  rec.index = idx;
                  rec.quadrature = quad;
                  rec.atten_index = group;
                  rec.alice_value = alice;
                  rec.bob_value_volts = sqrt_gain * bob_snu;
              });
    return records;
}

std::vector<GroupStats> simulate_group_stats(const SystemParams& params,
                                             const AttenuationSchedule& schedule,
                                             const AttackConfig& attack) {
    const std::size_t k = schedule.size();
    std::vector<MomentAccumulator> acc(2 * k);
    const double sqrt_gain = std::sqrt(params.gain_v2);

    run_block(params, schedule, attack,
              [&](Quadrature quad, std::size_t /*j*/, std::uint32_t group, double alice,
                  double bob_snu) {
                  acc[static_cast<std::size_t>(quad) * k + group].add(alice,
                                                                      sqrt_gain * bob_snu);
              });

    std::vector<GroupStats> stats;
    stats.reserve(2 * k);
    for (unsigned quad = 0; quad < 2; ++quad) {
        for (std::size_t g = 0; g < k; ++g) {
            const MomentAccumulator& a = acc[quad * k + g];
            const ProjectionStats proj = a.projection();
            GroupStats s;
            s.atten_index = static_cast<std::uint32_t>(g);
            s.quadrature = static_cast<Quadrature>(quad);
            s.n = a.count();
            s.signal_var = proj.signal_var;
            s.noise_var = proj.noise_var;
            s.unit = VarianceUnit::Volts2;
            stats.push_back(s);
        }
    }
    return stats;
}

std::vector<GroupStats> group_stats_from_records(const std::vector<PulseRecord>& records,
                                                 const AttenuationSchedule& schedule) {
    const std::size_t k = schedule.size();
    std::vector<MomentAccumulator> acc(2 * k);
    for (const PulseRecord& rec : records) {
        if (rec.atten_index >= k)
            throw Error(ErrorCode::Validation, "record attenuation index outside schedule");
        acc[static_cast<std::size_t>(rec.quadrature) * k + rec.atten_index].add(
            rec.alice_value, rec.bob_value_volts);
    }
    std::vector<GroupStats> stats;
    stats.reserve(2 * k);
    for (unsigned quad = 0; quad < 2; ++quad) {
        for (std::size_t g = 0; g < k; ++g) {
            const MomentAccumulator& a = acc[quad * k + g];
            if (a.count() < 2)
                throw Error(ErrorCode::Validation, "every (group, quadrature) needs >= 2 pulses");
            const ProjectionStats proj = a.projection();
            GroupStats s;
            s.atten_index = static_cast<std::uint32_t>(g);
            s.quadrature = static_cast<Quadrature>(quad);
            s.n = a.count();
            s.signal_var = proj.signal_var;
            s.noise_var = proj.noise_var;
            s.unit = VarianceUnit::Volts2;
            stats.push_back(s);
        }
    }
    return stats;
}

}  // namespace cvshot
