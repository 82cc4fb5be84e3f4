// cvshot - pulse-level CVQKD shot-noise countermeasure simulator and analyzer.
//
// Subcommands:
//   simulate      run a configured block and write the pulse trace (or a
//                 group summary) plus a run manifest
//   analyze       gate a trace or group summary, write the JSON report and
//                 plot-ready figure CSVs
//   keyrate       conservative collective key rate from a report or from
//                 explicit parameters
//   attack-sweep  R^2 vs attack parameter tables (saturation delta or V_B)

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "cvshot/estimator.hpp"
#include "cvshot/keyrate.hpp"
#include "cvshot/scenarios.hpp"
#include "cvshot/simulate.hpp"
#include "cvshot/trace_io.hpp"

namespace {

using namespace cvshot;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Validation: return 2;
        case ErrorCode::Io: return 3;
        case ErrorCode::Parse: return 4;
        case ErrorCode::GateRejected: return 5;
        default: return 2;
    }
}

void write_figure_csv(const std::string& path, const char* header,
                      const std::vector<double>& xs, const std::vector<double>& ys,
                      const LinearFit& fit) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    std::fprintf(f, "%s\n", header);
    for (std::size_t i = 0; i < xs.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", xs[i], ys[i], fit.intercept + fit.slope * xs[i]);
    std::fclose(f);
}

void emit_figures(const std::string& dir, const std::vector<GroupStats>& all_stats,
                  const AttenuationSchedule& schedule) {
    std::filesystem::create_directories(dir);
    for (Quadrature q : {Quadrature::X, Quadrature::P}) {
        const auto stats = stats_for_quadrature(all_stats, q);
        std::vector<double> s(stats.size()), n(stats.size());
        for (std::size_t i = 0; i < stats.size(); ++i) {
            s[i] = stats[i].signal_var;
            n[i] = stats[i].noise_var;
        }
        const char label = quadrature_label(q);
        write_figure_csv(dir + "/noise_vs_signal_" + label + ".csv",
                         "signal_var,noise_var,fitted", s, n, fit_affine(s, n));
        write_figure_csv(dir + "/signal_vs_atten_" + label + ".csv", "ratio,signal_var,fitted",
                         schedule.ratios, s, fit_affine(schedule.ratios, s));
    }
}

void print_verdict(const BlockVerdict& verdict) {
    for (const auto* v : {&verdict.x, &verdict.p}) {
        const char label = v == &verdict.x ? 'X' : 'P';
        std::printf("%c: accepted=%s r2_noise=%.6f r2_atten=%.6f max_residual=%.3e SNU "
                    "shot=%.6g V^2 slope=%.4e\n",
                    label, v->accepted ? "yes" : "no", v->r2_noise_signal, v->r2_signal_atten,
                    v->max_residual_snu, v->shot_noise_estimate, v->excess_noise_slope);
        if (!v->reject_reasons.empty()) {
            std::printf("%c: reject reasons:", label);
            for (const auto& r : v->reject_reasons) std::printf(" %s", r.c_str());
            std::printf("\n");
        }
    }
    std::printf("block: %s\n", verdict.accepted ? "ACCEPTED" : "REJECTED");
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                 const std::string& out_path, bool summary_only) {
    RunConfig config = parse_run_config(config_path);
    if (has_seed) config.system.seed = seed_override;
    std::string trace_path = out_path.empty() ? config.trace_path : out_path;
    if (trace_path.empty()) trace_path = summary_only ? "summary.csv" : "trace.csv";

    if (summary_only) {
        const auto stats = simulate_group_stats(config.system, config.schedule, config.attack);
        write_group_summary_csv(trace_path, stats, config.schedule);
    } else {
        const auto records = simulate_block(config.system, config.schedule, config.attack);
        write_trace_csv(trace_path, records);
    }
    write_manifest_json(trace_path + ".manifest.json", config, trace_path);
    std::printf("wrote %s (%zu groups x 2 quadratures, n_per_group=%lld, seed=%llu)\n",
                trace_path.c_str(), config.schedule.size(),
                static_cast<long long>(config.system.n_per_group),
                static_cast<unsigned long long>(config.system.seed));
    return 0;
}

int cmd_analyze(const std::string& trace_path, const std::string& config_path,
                const std::string& out_path, const std::string& figures_dir) {
    std::vector<GroupStats> stats;
    AttenuationSchedule schedule;
    GateThresholds thresholds;
    std::string report_default;
    if (!config_path.empty()) {
        const RunConfig config = parse_run_config(config_path);
        schedule = config.schedule;
        thresholds = config.thresholds;
        report_default = config.report_path;
    }
    if (is_group_summary_csv(trace_path)) {
        std::vector<double> ratios;
        stats = read_group_summary_csv(trace_path, &ratios);
        if (config_path.empty()) schedule = make_schedule_from_ratios(std::move(ratios));
    } else {
        if (config_path.empty())
            throw Error(ErrorCode::Validation,
                        "analyzing a full pulse trace requires --config for the schedule");
        stats = group_stats_from_records(read_trace_csv(trace_path), schedule);
    }
    const BlockVerdict verdict = gate_block(stats, schedule, thresholds);
    std::string report_path = out_path.empty() ? report_default : out_path;
    if (report_path.empty()) report_path = "report.json";
    write_report_json(report_path, verdict, thresholds);
    if (!figures_dir.empty()) emit_figures(figures_dir, stats, schedule);
    print_verdict(verdict);
    std::printf("wrote %s\n", report_path.c_str());
    return 0;
}

int cmd_keyrate(const std::string& report_path, LinkParams link, double xi_override,
                bool has_xi_override) {
    link.validate();
    const double t = transmission_from_length(link.length_km, link.loss_db_per_km);
    const double v_a = modulation_for_snr(link.snr_target, t, link.eta, link.v_el);

    double xi_alice;
    if (has_xi_override) {
        xi_alice = xi_override;
    } else if (!report_path.empty()) {
        const BlockVerdict verdict = read_report_json(report_path);
        if (!verdict.accepted)
            throw Error(ErrorCode::GateRejected,
                        "GATE_REJECTED: report '" + report_path + "' was not accepted");
        const double slope =
            std::max(verdict.x.excess_noise_slope, verdict.p.excess_noise_slope);
        const double signal_bob = t * link.eta * v_a;
        const double xi_bob = conservative_xi_bob(slope, link.slope_margin, signal_bob);
        xi_alice = refer_excess_noise_to_alice(xi_bob, link.length_km, link.eta,
                                               link.loss_db_per_km);
    } else {
        // No measurement: the default conservative budget (technical slope
        // does not apply; only the wavelength-attack margin).
        const double signal_bob = t * link.eta * v_a;
        const double xi_bob = conservative_xi_bob(0.0, link.slope_margin, signal_bob);
        xi_alice = refer_excess_noise_to_alice(xi_bob, link.length_km, link.eta,
                                               link.loss_db_per_km);
    }

    const double rate = collective_key_rate(v_a, t, link.eta, link.v_el, xi_alice, link.beta);
    std::printf("length_km=%.6g T=%.6g V_A=%.6g SNU xi_alice=%.6g SNU beta=%.6g\n",
                link.length_km, t, v_a, xi_alice, link.beta);
    std::printf("collective key rate: %.6e bits/symbol\n", rate);
    return 0;
}

int cmd_attack_sweep(const std::string& param, double lo, double hi, int steps,
                     std::uint64_t seed, std::int64_t n_per_group, const std::string& out_path) {
    if (steps < 2) throw Error(ErrorCode::Validation, "sweep needs at least 2 steps");
    if (param != "delta" && param != "vb")
        throw Error(ErrorCode::Validation, "sweep parameter must be 'delta' or 'vb'");

    std::FILE* f = std::fopen(out_path.c_str(), "wb");
    if (f == nullptr) throw Error(ErrorCode::Io, "cannot open '" + out_path + "' for writing");
    std::fprintf(f, "%s,r2_noise_signal_X,r2_signal_atten_X,excess_noise_slope_X,"
                    "max_residual_snu_X,accepted\n",
                 param.c_str());

    const AttenuationSchedule schedule = scenarios::saturation_schedule();
    const GateThresholds thresholds{0.99, 2e-4 * std::sqrt(5e8 / double(n_per_group))};
    for (int i = 0; i < steps; ++i) {
        const double value = lo + (hi - lo) * i / (steps - 1);
        SystemParams params = scenarios::saturation_system(param == "vb" ? value : 5.0);
        params.seed = seed;
        params.n_per_group = n_per_group;
        const double delta = param == "delta" ? value : 4.0;
        const AttackConfig attack = scenarios::saturation_attack(1.0, 4.0, delta);
        const auto stats = simulate_group_stats(params, schedule, attack);
        const BlockVerdict verdict = gate_block(stats, schedule, thresholds);
        std::fprintf(f, "%.17g,%.6f,%.6f,%.6e,%.6e,%d\n", value, verdict.x.r2_noise_signal,
                     verdict.x.r2_signal_atten, verdict.x.excess_noise_slope,
                     verdict.x.max_residual_snu, verdict.accepted ? 1 : 0);
        std::printf("%s=%.6g r2_noise=%.4f r2_atten=%.4f %s\n", param.c_str(), value,
                    verdict.x.r2_noise_signal, verdict.x.r2_signal_atten,
                    verdict.accepted ? "accepted" : "rejected");
    }
    std::fclose(f);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CVQKD shot-noise countermeasure simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, trace_path, figures_dir, report_path;
    std::uint64_t seed = 0;
    bool summary_only = false;

    auto* sim = app.add_subcommand("simulate", "simulate a block and write the trace");
    sim->add_option("--config", config_path, "run config (JSON)")->required();
    auto* seed_opt = sim->add_option("--seed", seed, "override the config seed");
    sim->add_option("--out", out_path, "output trace/summary path");
    sim->add_flag("--summary-only", summary_only, "write per-group summary instead of pulses");

    auto* ana = app.add_subcommand("analyze", "gate a trace and write the report");
    ana->add_option("--trace", trace_path, "pulse trace or group summary CSV")->required();
    ana->add_option("--config", config_path, "run config (schedule + thresholds)");
    ana->add_option("--out", out_path, "report path (default report.json)");
    ana->add_option("--figures-dir", figures_dir, "emit plot-ready figure CSVs here");

    LinkParams link;
    double xi_override = 0.0;
    auto* kr = app.add_subcommand("keyrate", "conservative collective key rate");
    kr->add_option("--report", report_path, "gate report JSON (must be accepted)");
    kr->add_option("--length-km", link.length_km, "fiber length");
    kr->add_option("--eta", link.eta, "detection efficiency");
    kr->add_option("--vel", link.v_el, "electronic noise, SNU");
    kr->add_option("--beta", link.beta, "reconciliation efficiency");
    kr->add_option("--snr", link.snr_target, "target SNR on Bob's side");
    kr->add_option("--slope-margin", link.slope_margin, "wavelength-attack slope margin");
    auto* xi_opt = kr->add_option("--xi-alice", xi_override, "excess noise at Alice, SNU");

    std::string sweep_param = "delta";
    double sweep_lo = 0.0, sweep_hi = 4.0;
    int sweep_steps = 9;
    std::uint64_t sweep_seed = 1;
    std::int64_t sweep_n = 100000;
    std::string sweep_out = "sweep.csv";
    auto* sw = app.add_subcommand("attack-sweep", "R^2 vs saturation parameter table");
    sw->add_option("--param", sweep_param, "'delta' or 'vb'");
    sw->add_option("--min", sweep_lo, "sweep start");
    sw->add_option("--max", sweep_hi, "sweep end");
    sw->add_option("--steps", sweep_steps, "number of sweep points");
    sw->add_option("--seed", sweep_seed, "simulation seed");
    sw->add_option("--n-per-group", sweep_n, "pulses per group");
    sw->add_option("--out", sweep_out, "output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, seed, seed_opt->count() > 0, out_path, summary_only);
        if (ana->parsed()) return cmd_analyze(trace_path, config_path, out_path, figures_dir);
        if (kr->parsed())
            return cmd_keyrate(report_path, link, xi_override, xi_opt->count() > 0);
        if (sw->parsed())
            return cmd_attack_sweep(sweep_param, sweep_lo, sweep_hi, sweep_steps, sweep_seed,
                                    sweep_n, sweep_out);
    } catch (const cvshot::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
