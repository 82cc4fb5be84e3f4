#include "cvshot/schedule.hpp"

#include <cmath>

namespace cvshot {

void AttenuationSchedule::validate() const {
    if (ratios.size() < 3)
        throw Error(ErrorCode::Validation, "schedule needs at least 3 attenuation ratios");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i] < 0.0 || ratios[i] > 1.0)
            throw Error(ErrorCode::Validation, "attenuation ratios must lie in [0,1]");
        if (i > 0 && ratios[i] <= ratios[i - 1])
            throw Error(ErrorCode::Validation, "attenuation ratios must be strictly increasing");
    }
    if (key_group_index != ratios.size() - 1)
        throw Error(ErrorCode::Validation, "key group must be the least attenuated level");
    if (!level_bias.empty()) {
        if (level_bias.size() != ratios.size())
            throw Error(ErrorCode::Validation, "level_bias must match the ratio count");
        for (std::size_t i = 0; i < level_bias.size(); ++i) {
            double eff = ratios[i] * (1.0 + level_bias[i]);
            if (eff < 0.0 || eff > 1.0)
                throw Error(ErrorCode::Validation, "biased ratio falls outside [0,1]");
        }
    }
}

AttenuationSchedule build_geometric_schedule(int k, double step, double top) {
    if (k < 3) throw Error(ErrorCode::Validation, "geometric schedule needs k >= 3");
    if (!(step > 0.0 && step < 1.0))
        throw Error(ErrorCode::Validation, "geometric step must lie in (0,1)");
    if (!(top > 0.0 && top <= 1.0))
        throw Error(ErrorCode::Validation, "top ratio must lie in (0,1]");
    AttenuationSchedule schedule;
    schedule.ratios.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        schedule.ratios[static_cast<std::size_t>(i)] = top * std::pow(step, k - 1 - i);
    schedule.key_group_index = static_cast<std::size_t>(k - 1);
    schedule.validate();
    return schedule;
}

AttenuationSchedule build_uniform_schedule(int k, double top) {
    if (k < 3) throw Error(ErrorCode::Validation, "uniform schedule needs k >= 3");
    if (!(top > 0.0 && top <= 1.0))
        throw Error(ErrorCode::Validation, "top ratio must lie in (0,1]");
    AttenuationSchedule schedule;
    schedule.ratios.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        schedule.ratios[static_cast<std::size_t>(i)] = top * static_cast<double>(i) / (k - 1);
    schedule.key_group_index = static_cast<std::size_t>(k - 1);
    schedule.validate();
    return schedule;
}

AttenuationSchedule make_schedule_from_ratios(std::vector<double> ratios) {
    AttenuationSchedule schedule;
    schedule.ratios = std::move(ratios);
    schedule.key_group_index = schedule.ratios.empty() ? 0 : schedule.ratios.size() - 1;
    schedule.validate();
    return schedule;
}

std::vector<std::uint32_t> assign_random(const AttenuationSchedule& schedule, std::int64_t count,
                                         RngStream& stream, const std::vector<double>& weights) {
    const auto k = static_cast<std::uint32_t>(schedule.size());
    if (count < static_cast<std::int64_t>(k))
        throw Error(ErrorCode::Validation, "assignment count must cover every group");
    std::vector<std::uint32_t> assignment(static_cast<std::size_t>(count));
    if (weights.empty()) {
        for (auto& a : assignment) a = stream.uniform_index(k);
        return assignment;
    }
    if (weights.size() != schedule.size())
        throw Error(ErrorCode::Validation, "weights must match the ratio count");
    std::vector<double> cdf(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) throw Error(ErrorCode::Validation, "weights must be positive");
        total += weights[i];
        cdf[i] = total;
    }
    for (auto& a : assignment) {
        double u = stream.uniform01() * total;
        std::uint32_t idx = 0;
        while (idx + 1 < k && u > cdf[idx]) ++idx;
        a = idx;
    }
    return assignment;
}

}  // namespace cvshot
