#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cvshot {

enum class ErrorCode {
    Validation,
    Io,
    Parse,
    VarZero,
    FitDegenerate,
    ShotNonPositive,
    UnphysicalState,
    GateRejected,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

enum class Quadrature : std::uint8_t { X = 0, P = 1 };

inline char quadrature_label(Quadrature q) { return q == Quadrature::X ? 'X' : 'P'; }

/// Physical/statistical configuration of Alice, the channel and Bob's
/// detector. All variances are in shot-noise units (SNU) except gain_v2,
/// the detector conversion in volts^2 per SNU: a pure shot-noise group
/// measures gain_v2 volts^2.
struct SystemParams {
    double v_a = 40.0;        // Alice modulation variance, SNU
    double t_channel = 1.0;   // channel intensity transmission
    double eta = 0.9;         // receiver detection efficiency
    double eps_mod = 0.0828;  // modulation-imperfection noise at Alice output, SNU
    double v_el = 0.01;       // electronic noise variance, SNU
    double gain_v2 = 783.16e-6;  // volts^2 per SNU (783.16 mV^2)
    std::int64_t n_per_group = 1'000'000;
    std::uint64_t seed = 1;

    // v_a == 0 is tolerated only when allow_degenerate is set (test mode).
    void validate(bool allow_degenerate = false) const {
        if (v_a < 0.0 || (!allow_degenerate && v_a == 0.0))
            throw Error(ErrorCode::Validation, "v_a must be > 0");
        if (t_channel < 0.0 || t_channel > 1.0)
            throw Error(ErrorCode::Validation, "t_channel must be in [0,1]");
        if (eta <= 0.0 || eta > 1.0)
            throw Error(ErrorCode::Validation, "eta must be in (0,1]");
        if (eps_mod < 0.0) throw Error(ErrorCode::Validation, "eps_mod must be >= 0");
        if (v_el < 0.0) throw Error(ErrorCode::Validation, "v_el must be >= 0");
        if (gain_v2 <= 0.0) throw Error(ErrorCode::Validation, "gain_v2 must be > 0");
        if (n_per_group < 2) throw Error(ErrorCode::Validation, "n_per_group must be >= 2");
    }
};

/// One simulated pulse. alice_value is in sqrt(SNU); bob_value_volts is the
/// homodyne output after the transimpedance stage.
struct PulseRecord {
    std::uint64_t index = 0;
    Quadrature quadrature = Quadrature::X;
    std::uint32_t atten_index = 0;
    double alice_value = 0.0;
    double bob_value_volts = 0.0;
};

}  // namespace cvshot
