#include "cvshot/keyrate.hpp"

#include <algorithm>
#include <cmath>

namespace cvshot {

namespace {

void validate_state_params(double v_a, double t_channel, double eta, double v_el,
                           double xi_alice, double beta) {
    if (v_a < 0.0 || t_channel <= 0.0 || t_channel > 1.0 || eta <= 0.0 || eta > 1.0 ||
        v_el < 0.0 || xi_alice < 0.0 || beta < 0.0 || beta > 1.0)
        throw Error(ErrorCode::Validation, "invalid key-rate parameters");
}

double chi_line(double t_channel, double xi_alice) {
    return (1.0 - t_channel) / t_channel + xi_alice;
}

double chi_hom(double eta, double v_el) { return (1.0 + v_el) / eta - 1.0; }

double chi_tot(double t_channel, double eta, double v_el, double xi_alice) {
    return chi_line(t_channel, xi_alice) + chi_hom(eta, v_el) / t_channel;
}

// G(x) = (x+1) log2(x+1) - x log2 x, the bosonic entropy of a thermal state
// with mean photon number x.
double g_entropy(double x) {
    if (x <= 0.0) return 0.0;
    return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

}  // namespace

double transmission_from_length(double length_km, double loss_db_per_km) {
    if (length_km < 0.0 || loss_db_per_km <= 0.0)
        throw Error(ErrorCode::Validation, "invalid fiber parameters");
    return std::pow(10.0, -loss_db_per_km * length_km / 10.0);
}

double refer_excess_noise_to_alice(double xi_bob, double length_km, double eta,
                                   double loss_db_per_km) {
    if (xi_bob < 0.0 || length_km < 0.0 || eta <= 0.0)
        throw Error(ErrorCode::Validation, "invalid excess-noise referral parameters");
    return xi_bob * std::pow(10.0, loss_db_per_km * length_km / 10.0) / eta;
}

double conservative_xi_bob(double measured_slope, double slope_margin, double signal_var_bob) {
    if (measured_slope < 0.0 || slope_margin < 0.0 || signal_var_bob < 0.0)
        throw Error(ErrorCode::Validation, "conservative excess noise needs nonnegative inputs");
    return (measured_slope + slope_margin) * signal_var_bob;
}

double modulation_for_snr(double snr_target, double t_channel, double eta, double v_el) {
    if (snr_target < 0.0 || t_channel <= 0.0 || eta <= 0.0 || v_el < 0.0)
        throw Error(ErrorCode::Validation, "invalid SNR solve parameters");
    return snr_target * (1.0 + v_el) / (t_channel * eta);
}

double mutual_information_from_snr(double snr) {
    if (snr < 0.0) throw Error(ErrorCode::Validation, "SNR must be >= 0");
    return 0.5 * std::log2(1.0 + snr);
}

double mutual_information_from_covariance(double v_a, double t_channel, double eta, double v_el,
                                          double xi_alice) {
    validate_state_params(v_a, t_channel, eta, v_el, xi_alice, 1.0);
    const double v = v_a + 1.0;
    const double ct = chi_tot(t_channel, eta, v_el, xi_alice);
    return 0.5 * std::log2((v + ct) / (1.0 + ct));
}

double holevo_bound(double v_a, double t_channel, double eta, double v_el, double xi_alice) {
    validate_state_params(v_a, t_channel, eta, v_el, xi_alice, 1.0);
    const double v = v_a + 1.0;
    const double cl = chi_line(t_channel, xi_alice);
    const double ch = chi_hom(eta, v_el);
    const double ct = chi_tot(t_channel, eta, v_el, xi_alice);
    const double t = t_channel;

    const double a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + cl) * (v + cl);
    const double b = t * t * (v * cl + 1.0) * (v * cl + 1.0);
    const double disc_ab = a * a - 4.0 * b;
    if (disc_ab < 0.0 || a <= 0.0)
        throw Error(ErrorCode::UnphysicalState, "UNPHYSICAL_STATE: shared-state eigenvalues");
    const double nu1_sq = 0.5 * (a + std::sqrt(disc_ab));
    const double nu2_sq = b / nu1_sq;  // product of the roots is b

    const double denom = t * (v + ct);
    const double c =
        (v * std::sqrt(b) + t * (v + cl) + a * ch) / denom;
    const double d = std::sqrt(b) * (v + std::sqrt(b) * ch) / denom;
    const double disc_cd = c * c - 4.0 * d;
    if (disc_cd < 0.0 || c <= 0.0)
        throw Error(ErrorCode::UnphysicalState, "UNPHYSICAL_STATE: conditional eigenvalues");
    const double nu3_sq = 0.5 * (c + std::sqrt(disc_cd));
    const double nu4_sq = d / nu3_sq;

    constexpr double kTol = 1e-9;
    const double nus[4] = {std::sqrt(nu1_sq), std::sqrt(nu2_sq), std::sqrt(nu3_sq),
                           std::sqrt(nu4_sq)};
    for (double nu : nus)
        if (nu < 1.0 - kTol)
            throw Error(ErrorCode::UnphysicalState, "UNPHYSICAL_STATE: symplectic eigenvalue < 1");

    return g_entropy((nus[0] - 1.0) / 2.0) + g_entropy((nus[1] - 1.0) / 2.0) -
           g_entropy((nus[2] - 1.0) / 2.0) - g_entropy((nus[3] - 1.0) / 2.0);
}

double collective_key_rate(double v_a, double t_channel, double eta, double v_el, double xi_alice,
                           double beta) {
    validate_state_params(v_a, t_channel, eta, v_el, xi_alice, beta);
    const double i_ab = mutual_information_from_covariance(v_a, t_channel, eta, v_el, xi_alice);
    const double chi_be = holevo_bound(v_a, t_channel, eta, v_el, xi_alice);
    return std::max(0.0, beta * i_ab - chi_be);
}

}  // namespace cvshot
