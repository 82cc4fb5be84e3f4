#pragma once

#include "cvshot/params.hpp"

namespace cvshot {

/// Link/receiver parameters for the conservative key-rate evaluation.
struct LinkParams {
    double length_km = 80.5;
    double loss_db_per_km = 0.2;
    double eta = 0.322;
    double v_el = 0.01;
    double beta = 0.948;        // reconciliation efficiency
    double snr_target = 0.075;  // SNR on Bob's side
    double slope_margin = 1e-3; // wavelength-attack allowance, SNU per SNU

    void validate() const {
        if (length_km < 0.0 || loss_db_per_km <= 0.0 || eta <= 0.0 || eta > 1.0 || v_el < 0.0 ||
            beta <= 0.0 || beta > 1.0 || snr_target < 0.0 || slope_margin < 0.0)
            throw Error(ErrorCode::Validation, "invalid link parameters");
    }
};

/// Intensity transmission of length_km of fiber at loss_db_per_km.
double transmission_from_length(double length_km, double loss_db_per_km = 0.2);

/// xi_bob * 10^(0.02*length_km) / eta at 0.2 dB/km: inverts the channel
/// transmission and the detector efficiency.
double refer_excess_noise_to_alice(double xi_bob, double length_km, double eta,
                                   double loss_db_per_km = 0.2);

/// Conservative excess noise on Bob's side: (measured_slope + slope_margin)
/// * signal_var_bob.
double conservative_xi_bob(double measured_slope, double slope_margin, double signal_var_bob);

/// Alice modulation variance solving snr = T*eta*V_A / (1 + v_el). The
/// excess-noise correction to the denominator is below the quoted precision
/// at the reference operating point and is omitted.
double modulation_for_snr(double snr_target, double t_channel, double eta, double v_el);

/// Shannon mutual information of the homodyne channel from its SNR.
double mutual_information_from_snr(double snr);

/// Same quantity from the covariance-matrix route 0.5*log2((V+chi_tot)/(1+chi_tot)).
double mutual_information_from_covariance(double v_a, double t_channel, double eta, double v_el,
                                          double xi_alice);

/// Holevo bound chi_BE for collective attacks against GG02 homodyne with
/// trusted (detector) noise, from the symplectic eigenvalues of the shared
/// state and of Eve's state conditioned on Bob's measurement.
double holevo_bound(double v_a, double t_channel, double eta, double v_el, double xi_alice);

/// Asymptotic collective secret key rate max(0, beta*I_AB - chi_BE) in bits
/// per symbol. Throws UNPHYSICAL_STATE if the covariance matrix is not a
/// valid quantum state.
double collective_key_rate(double v_a, double t_channel, double eta, double v_el, double xi_alice,
                           double beta);

}  // namespace cvshot
