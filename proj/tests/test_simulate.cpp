#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "cvshot/scenarios.hpp"
#include "cvshot/simulate.hpp"
#include "oracles.hpp"

using namespace cvshot;

namespace {

SystemParams small_honest(std::int64_t n, std::uint64_t seed) {
    SystemParams p = scenarios::honest_default();
    p.n_per_group = n;
    p.seed = seed;
    return p;
}

}  // namespace

TEST_CASE("alice symbols: variance, degenerate mode, determinism") {
    SystemParams p;
    p.v_a = 9.5;
    const std::int64_t count = 1'000'000;
    RngStream s1(42, 1);
    const auto sym = draw_alice_symbols(p, count, s1);
    REQUIRE(sym.size() == static_cast<std::size_t>(count));
    const double var = oracle::variance(sym);
    CHECK(std::abs(var - 9.5) < 5.0 * std::sqrt(2.0 / count) * 9.5);
    CHECK(std::abs(oracle::mean(sym)) < 5.0 * std::sqrt(9.5 / count));

    SystemParams zero = p;
    zero.v_a = 0.0;
    RngStream s2(42, 1);
    const auto zeros = draw_alice_symbols(zero, 1000, s2);
    for (double v : zeros) CHECK(v == 0.0);

    RngStream s3(42, 1);
    CHECK(draw_alice_symbols(p, count, s3) == sym);
    RngStream s4(42, 2);
    CHECK(draw_alice_symbols(p, count, s4) != sym);
}

TEST_CASE("simulate_pulse: r = 0 with v_el = 0 leaves pure shot noise") {
    SystemParams p = small_honest(2, 1);
    p.v_el = 0.0;
    RngStream stream(5, 77);
    const std::int64_t n = 200'000;
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (auto& v : vals) v = simulate_pulse(p, 1.3, 0.0, stream) / std::sqrt(p.gain_v2);
    CHECK(std::abs(oracle::variance(vals) - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gain calibration: r = 0 group noise measures gain_v2 volts^2") {
    SystemParams p = small_honest(2, 1);
    p.v_el = 0.0;
    RngStream stream(5, 78);
    const std::int64_t n = 400'000;
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (auto& v : vals) v = simulate_pulse(p, 0.4, 0.0, stream);
    const double var_mv2 = oracle::variance(vals) * 1e6;
    CHECK(std::abs(var_mv2 - 783.16) < 5.0 * std::sqrt(2.0 / n) * 783.16);
}

TEST_CASE("block structure: counts, alternation, indices") {
    SystemParams p = small_honest(500, 3);
    const auto sched = build_geometric_schedule(4, 0.5, 1.0);
    const auto records = simulate_block(p, sched);
    REQUIRE(records.size() == 2u * 4u * 500u);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].index == i);
        CHECK(records[i].quadrature == (i % 2 == 0 ? Quadrature::X : Quadrature::P));
        CHECK(records[i].atten_index < 4);
    }
}

TEST_CASE("determinism: identical config gives bit-identical records") {
    SystemParams p = small_honest(2000, 9);
    const auto sched = build_geometric_schedule(8, 0.7, 1.0);
    const auto a = simulate_block(p, sched);
    const auto b = simulate_block(p, sched);
    REQUIRE(a.size() == b.size());
    const auto same = [](const PulseRecord& l, const PulseRecord& r) {
        return l.index == r.index && l.quadrature == r.quadrature &&
               l.atten_index == r.atten_index && l.alice_value == r.alice_value &&
               l.bob_value_volts == r.bob_value_volts;
    };
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i) identical = identical && same(a[i], b[i]);
    CHECK(identical);

    SystemParams p2 = p;
    p2.seed = 10;
    const auto c = simulate_block(p2, sched);
    bool all_same = true;
    for (std::size_t i = 0; i < a.size(); ++i) all_same = all_same && same(a[i], c[i]);
    CHECK_FALSE(all_same);
}

TEST_CASE("streamed group stats equal the record-path stats") {
    SystemParams p = small_honest(5000, 21);
    const auto sched = build_geometric_schedule(6, 0.6, 1.0);
    const auto direct = simulate_group_stats(p, sched);
    const auto via_records = group_stats_from_records(simulate_block(p, sched), sched);
    REQUIRE(direct.size() == via_records.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(direct[i].n == via_records[i].n);
        CHECK(direct[i].signal_var ==
              doctest::Approx(via_records[i].signal_var).epsilon(1e-12));
        CHECK(direct[i].noise_var ==
              doctest::Approx(via_records[i].noise_var).epsilon(1e-12));
    }
}

TEST_CASE("affine law: group variances converge to the closed-form model") {
    SystemParams p = small_honest(100'000, 5);
    const auto sched = scenarios::honest_schedule();
    const auto stats = simulate_group_stats(p, sched);
    for (const auto& g : stats) {
        const double r = sched.ratios[g.atten_index];
        const double s_exp = oracle::honest_signal_snu(p.v_a, p.t_channel, p.eta, r);
        const double n_exp = oracle::honest_noise_snu(p.v_el, p.eps_mod, p.t_channel, p.eta, r);
        const double s_meas = g.signal_var / p.gain_v2;
        const double n_meas = g.noise_var / p.gain_v2;
        const double cnt = static_cast<double>(g.n);
        // noise variance: relative sqrt(2/N); signal variance: delta-method
        // bound sigma^2 ~ (4 s (n + s) + 2 n^2)/N
        CHECK(std::abs(n_meas - n_exp) < 5.0 * std::sqrt(2.0 / cnt) * n_exp);
        const double s_sigma = std::sqrt((4.0 * s_exp * (n_exp + s_exp) + 2.0 * n_exp * n_exp) / cnt);
        CHECK(std::abs(s_meas - s_exp) < 5.0 * s_sigma);
    }
}

TEST_CASE("closed-form expectations follow the affine law exactly") {
    SystemParams p = scenarios::honest_default();
    const auto sched = scenarios::honest_schedule();
    // (s(r), n(r)) lies exactly on a line with slope eps_mod/v_a and
    // intercept 1 + v_el
    const double slope = p.eps_mod / p.v_a;
    for (double r : sched.ratios) {
        const double s = expected_signal_variance_snu(p, r);
        const double n = expected_noise_variance_snu(p, r);
        CHECK(n == doctest::Approx(1.0 + p.v_el + slope * s).epsilon(1e-14));
    }
    // doubling v_a doubles s(r), leaves the intercept alone
    SystemParams p2 = p;
    p2.v_a *= 2.0;
    for (double r : sched.ratios) {
        CHECK(expected_signal_variance_snu(p2, r) ==
              doctest::Approx(2.0 * expected_signal_variance_snu(p, r)));
    }
    CHECK(expected_noise_variance_snu(p2, 0.0) == doctest::Approx(1.0 + p.v_el));
}

TEST_CASE("SNU consistency: gain_v2 only rescales values") {
    SystemParams p1 = small_honest(20'000, 13);
    SystemParams p2 = p1;
    p2.gain_v2 = 1.0;
    const auto sched = build_geometric_schedule(5, 0.6, 1.0);
    const auto r1 = simulate_block(p1, sched);
    const auto r2 = simulate_block(p2, sched);
    const double root_gain = std::sqrt(p1.gain_v2);
    REQUIRE(r1.size() == r2.size());
    double max_rel = 0.0;
    for (std::size_t i = 0; i < r1.size(); ++i) {
        const double a = r1[i].bob_value_volts / root_gain;
        const double b = r2[i].bob_value_volts;
        if (b != 0.0) max_rel = std::max(max_rel, std::abs(a / b - 1.0));
    }
    CHECK(max_rel < 1e-12);

    const auto s1 = group_stats_from_records(r1, sched);
    const auto s2 = group_stats_from_records(r2, sched);
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i].noise_var / p1.gain_v2 ==
              doctest::Approx(s2[i].noise_var).epsilon(1e-12));
        if (s2[i].signal_var > 0)
            CHECK(s1[i].signal_var / p1.gain_v2 ==
                  doctest::Approx(s2[i].signal_var).epsilon(1e-12));
    }
}

TEST_CASE("invalid parameters are rejected at construction") {
    SystemParams p;
    p.v_a = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = SystemParams{};
    p.eta = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = SystemParams{};
    p.t_channel = 1.5;
    CHECK_THROWS_AS(p.validate(), Error);
    p = SystemParams{};
    p.n_per_group = 1;
    CHECK_THROWS_AS(p.validate(), Error);
    p = SystemParams{};
    p.gain_v2 = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
}
