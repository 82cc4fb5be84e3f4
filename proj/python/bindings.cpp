#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvshot/attacks.hpp"
#include "cvshot/estimator.hpp"
#include "cvshot/keyrate.hpp"
#include "cvshot/scenarios.hpp"
#include "cvshot/simulate.hpp"

namespace py = pybind11;
using namespace cvshot;

namespace {

AttackConfig attack_from_kwargs(double ir_mu, py::object saturation, py::object wavelength) {
    AttackConfig config;
    if (ir_mu > 0.0) config.attacks.push_back(InterceptResend{ir_mu});
    if (!wavelength.is_none()) {
        auto t = wavelength.cast<std::tuple<double, double, double>>();
        WavelengthInjection wl;
        wl.c0 = std::get<0>(t);
        wl.c1 = std::get<1>(t);
        wl.c2 = std::get<2>(t);
        config.attacks.push_back(wl);
    }
    if (!saturation.is_none()) {
        auto t = saturation.cast<std::pair<double, double>>();
        Saturation sat;
        sat.alpha = t.first;
        sat.delta = t.second;
        config.attacks.push_back(sat);
    }
    config.validate();
    return config;
}

py::dict verdict_dict(const GateVerdict& v) {
    py::dict d;
    d["accepted"] = v.accepted;
    d["r2_noise_signal"] = v.r2_noise_signal;
    d["r2_signal_atten"] = v.r2_signal_atten;
    d["max_residual_snu"] = v.max_residual_snu;
    d["shot_noise_estimate"] = v.shot_noise_estimate;
    d["excess_noise_slope"] = v.excess_noise_slope;
    d["key_group_signal_snu"] = v.key_group_signal_snu;
    d["reject_reasons"] = v.reject_reasons;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pulse-level CVQKD shot-noise countermeasure simulator";

    py::register_exception<Error>(m, "CvshotError");

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("v_a", &SystemParams::v_a)
        .def_readwrite("t_channel", &SystemParams::t_channel)
        .def_readwrite("eta", &SystemParams::eta)
        .def_readwrite("eps_mod", &SystemParams::eps_mod)
        .def_readwrite("v_el", &SystemParams::v_el)
        .def_readwrite("gain_v2", &SystemParams::gain_v2)
        .def_readwrite("n_per_group", &SystemParams::n_per_group)
        .def_readwrite("seed", &SystemParams::seed)
        .def("validate", &SystemParams::validate, py::arg("allow_degenerate") = false);

    py::class_<AttenuationSchedule>(m, "AttenuationSchedule")
        .def_readonly("ratios", &AttenuationSchedule::ratios)
        .def_readonly("key_group_index", &AttenuationSchedule::key_group_index)
        .def("parameter_estimation_fraction",
             &AttenuationSchedule::parameter_estimation_fraction);

    m.def("build_geometric_schedule", &build_geometric_schedule, py::arg("k"), py::arg("step"),
          py::arg("top") = 1.0);
    m.def("build_uniform_schedule", &build_uniform_schedule, py::arg("k"), py::arg("top") = 1.0);

    m.def("estimator_sigma", &estimator_sigma, py::arg("n"),
          "Relative std of the variance estimator of n Gaussian values: sqrt(2/n)");
    m.def("apply_saturation", &apply_saturation, py::arg("alpha"), py::arg("delta"),
          py::arg("x"));

    m.def(
        "fit_affine",
        [](const std::vector<double>& xs, const std::vector<double>& ys) {
            const auto fit = fit_affine(xs, ys);
            py::dict d;
            d["slope"] = fit.slope;
            d["intercept"] = fit.intercept;
            d["r_squared"] = fit.r_squared;
            d["residuals"] = fit.residuals;
            d["max_abs_residual"] = fit.max_abs_residual;
            return d;
        },
        py::arg("xs"), py::arg("ys"));

    m.def(
        "project_signal_noise",
        [](const std::vector<double>& alice, const std::vector<double>& bob) {
            const auto ps = project_signal_noise(alice, bob);
            return py::make_tuple(ps.signal_var, ps.noise_var, ps.correlation);
        },
        py::arg("alice"), py::arg("bob"));

    m.def(
        "simulate_group_stats",
        [](const SystemParams& params, const AttenuationSchedule& schedule, double ir_mu,
           py::object saturation, py::object wavelength) {
            const auto stats = simulate_group_stats(
                params, schedule, attack_from_kwargs(ir_mu, saturation, wavelength));
            py::list out;
            for (const auto& g : stats) {
                py::dict d;
                d["quadrature"] = std::string(1, quadrature_label(g.quadrature));
                d["atten_index"] = g.atten_index;
                d["n"] = g.n;
                d["signal_var"] = g.signal_var;
                d["noise_var"] = g.noise_var;
                out.append(d);
            }
            return out;
        },
        py::arg("params"), py::arg("schedule"), py::arg("intercept_resend_mu") = 0.0,
        py::arg("saturation") = py::none(), py::arg("wavelength") = py::none(),
        "Per-(level, quadrature) signal/noise variances in volts^2");

    m.def(
        "gate_block",
        [](const SystemParams& params, const AttenuationSchedule& schedule, double r2_min,
           double residual_max_snu, double ir_mu, py::object saturation, py::object wavelength) {
            const auto stats = simulate_group_stats(
                params, schedule, attack_from_kwargs(ir_mu, saturation, wavelength));
            const auto verdict =
                gate_block(stats, schedule, GateThresholds{r2_min, residual_max_snu});
            py::dict d;
            d["accepted"] = verdict.accepted;
            d["x"] = verdict_dict(verdict.x);
            d["p"] = verdict_dict(verdict.p);
            return d;
        },
        py::arg("params"), py::arg("schedule"), py::arg("r2_min") = 0.99,
        py::arg("residual_max_snu") = 2e-4, py::arg("intercept_resend_mu") = 0.0,
        py::arg("saturation") = py::none(), py::arg("wavelength") = py::none(),
        "Simulate a block and gate both quadratures");

    m.def("calibrate_wavelength_masking",
          [](const SystemParams& params, const AttenuationSchedule& schedule, double mu,
             double budget) {
              const auto wl =
                  calibrate_wavelength_masking(params, schedule, mu, {budget, budget});
              return py::make_tuple(wl.c0, wl.c1, wl.c2);
          },
          py::arg("params"), py::arg("schedule"), py::arg("mu") = 1.0,
          py::arg("budget_snu") = 25.0);

    m.def(
        "max_hidden_slope",
        [](double residual_budget, const SystemParams& params,
           const AttenuationSchedule& schedule) {
            return max_hidden_slope({}, residual_budget, params, schedule);
        },
        py::arg("residual_budget"), py::arg("params"), py::arg("schedule"));

    m.def("transmission_from_length", &transmission_from_length, py::arg("length_km"),
          py::arg("loss_db_per_km") = 0.2);
    m.def("refer_excess_noise_to_alice", &refer_excess_noise_to_alice, py::arg("xi_bob"),
          py::arg("length_km"), py::arg("eta"), py::arg("loss_db_per_km") = 0.2);
    m.def("conservative_xi_bob", &conservative_xi_bob, py::arg("measured_slope"),
          py::arg("slope_margin"), py::arg("signal_var_bob"));
    m.def("modulation_for_snr", &modulation_for_snr, py::arg("snr_target"),
          py::arg("t_channel"), py::arg("eta"), py::arg("v_el"));
    m.def("collective_key_rate", &collective_key_rate, py::arg("v_a"), py::arg("t_channel"),
          py::arg("eta"), py::arg("v_el"), py::arg("xi_alice"), py::arg("beta"));

    auto scen = m.def_submodule("scenarios", "Reference configurations");
    scen.def("honest_default", &scenarios::honest_default);
    scen.def("honest_schedule", &scenarios::honest_schedule);
    scen.def("wavelength_masking_system", &scenarios::wavelength_masking_system);
    scen.def("saturation_system", &scenarios::saturation_system, py::arg("v_b"));
    scen.def("saturation_schedule", &scenarios::saturation_schedule);
    scen.def("hidden_slope_system", &scenarios::hidden_slope_system);
}
