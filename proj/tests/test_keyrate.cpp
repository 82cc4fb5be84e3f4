#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cvshot/keyrate.hpp"

using namespace cvshot;

namespace {
const double kT80 = transmission_from_length(80.5);
}

TEST_CASE("transmission and excess-noise referral") {
    CHECK(transmission_from_length(0.0) == doctest::Approx(1.0));
    CHECK(kT80 == doctest::Approx(std::pow(10.0, -1.61)).epsilon(1e-12));

    // reference operating point: 2.4e-4 * 10^(0.02*80.5) / 0.322, about 3%
    const double xi_a = refer_excess_noise_to_alice(2.4e-4, 80.5, 0.322);
    CHECK(xi_a == doctest::Approx(2.4e-4 * std::pow(10.0, 1.61) / 0.322).epsilon(1e-12));
    CHECK(xi_a == doctest::Approx(0.030).epsilon(0.02));

    CHECK(refer_excess_noise_to_alice(5e-3, 0.0, 1.0) == doctest::Approx(5e-3));
    CHECK(refer_excess_noise_to_alice(4.8e-4, 80.5, 0.322) == doctest::Approx(2.0 * xi_a));
    CHECK_THROWS_AS(refer_excess_noise_to_alice(-1.0, 80.5, 0.322), Error);
}

TEST_CASE("conservative excess noise on Bob's side") {
    CHECK(conservative_xi_bob(2e-3, 1e-3, 0.08) == doctest::Approx(2.4e-4).epsilon(1e-12));
    CHECK(conservative_xi_bob(0.0, 0.0, 1.0) == 0.0);
    CHECK(conservative_xi_bob(2e-3, 1e-3, 0.8) == doctest::Approx(2.4e-3).epsilon(1e-12));
}

TEST_CASE("modulation variance for the target SNR") {
    CHECK(modulation_for_snr(0.0, kT80, 0.322, 0.01) == 0.0);
    const double va = modulation_for_snr(0.075, kT80, 0.322, 0.01);
    CHECK(va == doctest::Approx(9.5).epsilon(0.032));  // reference: 9.5 SNU
    CHECK(modulation_for_snr(0.075, 2.0 * kT80, 0.322, 0.01) == doctest::Approx(va / 2.0));
}

TEST_CASE("mutual information: SNR route equals covariance route") {
    for (double va : {5.0, 9.5835, 20.0}) {
        for (double xi : {0.0, 0.03, 0.2}) {
            const double chl = (1.0 - kT80) / kT80 + xi;
            const double chh = (1.0 + 0.01) / 0.322 - 1.0;
            const double snr = va / (1.0 + chl + chh / kT80);
            const double a = mutual_information_from_snr(snr);
            const double b = mutual_information_from_covariance(va, kT80, 0.322, 0.01, xi);
            CHECK(std::abs(a - b) / b < 1e-9);
        }
    }
}

TEST_CASE("collective key rate at the reference operating point") {
    const double va = modulation_for_snr(0.075, kT80, 0.322, 0.01);
    const double rate = collective_key_rate(va, kT80, 0.322, 0.01, 0.03, 0.948);
    CHECK(rate > 5e-4);   // reference: approximately 1e-3 bits/symbol
    CHECK(rate < 2e-3);
}

TEST_CASE("rate limits: noise, reconciliation, lossless channel") {
    const double va = 9.5;
    CHECK(collective_key_rate(va, kT80, 0.322, 0.01, 1.0, 0.948) == 0.0);
    CHECK(collective_key_rate(va, kT80, 0.322, 0.01, 0.03, 0.0) == 0.0);
    // perfect channel and detector, no excess noise: Eve learns nothing
    const double perfect = collective_key_rate(va, 1.0, 1.0, 0.0, 0.0, 1.0);
    CHECK(perfect == doctest::Approx(mutual_information_from_snr(va)).epsilon(1e-9));
    CHECK(holevo_bound(va, 1.0, 1.0, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rate is monotone in noise, length and reconciliation") {
    const double va = 9.5;
    double prev = 1e9;
    for (double xi : {0.0, 0.01, 0.03, 0.06, 0.12}) {
        const double r = collective_key_rate(va, kT80, 0.322, 0.01, xi, 0.948);
        CHECK(r <= prev + 1e-15);
        prev = r;
    }
    prev = 1e9;
    for (double km : {10.0, 40.0, 80.5, 120.0}) {
        const double r = collective_key_rate(va, transmission_from_length(km), 0.322, 0.01,
                                             0.03, 0.948);
        CHECK(r <= prev + 1e-15);
        prev = r;
    }
    prev = -1.0;
    for (double beta : {0.5, 0.8, 0.948, 1.0}) {
        const double r = collective_key_rate(va, kT80, 0.322, 0.01, 0.03, beta);
        CHECK(r >= prev - 1e-15);
        prev = r;
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(collective_key_rate(9.5, 0.0, 0.322, 0.01, 0.03, 0.948), Error);
    CHECK_THROWS_AS(collective_key_rate(9.5, kT80, 1.5, 0.01, 0.03, 0.948), Error);
    CHECK_THROWS_AS(collective_key_rate(9.5, kT80, 0.322, -0.01, 0.03, 0.948), Error);
    CHECK_THROWS_AS(collective_key_rate(9.5, kT80, 0.322, 0.01, 0.03, 1.2), Error);
    LinkParams link;
    link.beta = 0.0;
    CHECK_THROWS_AS(link.validate(), Error);
}
