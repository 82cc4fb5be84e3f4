#include "cvshot/trace_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cvshot {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

double require_number(const json& obj, const std::string& scope, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number())
        throw Error(ErrorCode::Validation, "config field '" + scope + "." + key +
                                               "' missing or not a number");
    return it->get<double>();
}

double optional_number(const json& obj, const std::string& scope, const char* key,
                       double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number())
        throw Error(ErrorCode::Validation, "config field '" + scope + "." + key +
                                               "' must be a number");
    return it->get<double>();
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, origin + ": " + e.what());
    }
    if (!root.is_object()) throw Error(ErrorCode::Parse, origin + ": top level must be an object");

    RunConfig config;
    const json& sys = root.contains("system") ? root.at("system") : json::object();
    if (!sys.is_object())
        throw Error(ErrorCode::Validation, "config field 'system' must be an object");
    config.system.v_a = require_number(sys, "system", "v_a_snu");
    config.system.t_channel = require_number(sys, "system", "t_channel");
    config.system.eta = require_number(sys, "system", "eta");
    config.system.eps_mod = require_number(sys, "system", "eps_mod_snu");
    config.system.v_el = require_number(sys, "system", "v_el_snu");
    config.system.gain_v2 = require_number(sys, "system", "gain_mv2") * 1e-6;
    config.system.n_per_group =
        static_cast<std::int64_t>(require_number(sys, "system", "n_per_group"));
    if (auto it = sys.find("seed"); it != sys.end()) {
        if (!it->is_number_integer() && !it->is_number_unsigned())
            throw Error(ErrorCode::Validation, "config field 'system.seed' must be an integer");
        config.system.seed = it->get<std::uint64_t>();
    } else {
        config.system.seed = 1;
    }
    try {
        config.system.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::Validation, std::string("config field 'system': ") + e.what());
    }

    if (!root.contains("schedule"))
        throw Error(ErrorCode::Validation, "config field 'schedule' missing");
    const json& sched = root.at("schedule");
    try {
        if (sched.contains("ratios")) {
            config.schedule =
                make_schedule_from_ratios(sched.at("ratios").get<std::vector<double>>());
        } else {
            const int k = static_cast<int>(require_number(sched, "schedule", "k"));
            const double step = require_number(sched, "schedule", "step");
            const double top = optional_number(sched, "schedule", "top", 1.0);
            config.schedule = build_geometric_schedule(k, step, top);
        }
        if (sched.contains("level_bias")) {
            config.schedule.level_bias = sched.at("level_bias").get<std::vector<double>>();
            config.schedule.validate();
        }
    } catch (const Error& e) {
        throw Error(ErrorCode::Validation, std::string("config field 'schedule': ") + e.what());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Validation, std::string("config field 'schedule': ") + e.what());
    }

    if (root.contains("attack") && !root.at("attack").is_null()) {
        const json& atk = root.at("attack");
        if (!atk.is_object())
            throw Error(ErrorCode::Validation, "config field 'attack' must be an object or null");
        if (atk.contains("intercept_resend")) {
            InterceptResend ir;
            ir.mu = require_number(atk.at("intercept_resend"), "attack.intercept_resend", "mu");
            config.attack.attacks.push_back(ir);
        }
        if (atk.contains("wavelength")) {
            const json& w = atk.at("wavelength");
            WavelengthInjection wl;
            wl.c0 = require_number(w, "attack.wavelength", "c0_snu");
            wl.c1 = require_number(w, "attack.wavelength", "c1_snu");
            wl.c2 = require_number(w, "attack.wavelength", "c2_snu");
            config.attack.attacks.push_back(wl);
        }
        if (atk.contains("saturation")) {
            const json& s = atk.at("saturation");
            Saturation sat;
            sat.alpha = require_number(s, "attack.saturation", "alpha_snu_std");
            sat.delta = require_number(s, "attack.saturation", "delta_snu_std");
            sat.offset_atten_exponent =
                optional_number(s, "attack.saturation", "offset_atten_exponent", 1.25);
            config.attack.attacks.push_back(sat);
        }
        try {
            config.attack.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::Validation, std::string("config field 'attack': ") + e.what());
        }
    }

    if (root.contains("thresholds")) {
        const json& thr = root.at("thresholds");
        config.thresholds.r2_min = optional_number(thr, "thresholds", "r2_min", 0.99);
        config.thresholds.residual_max_snu =
            optional_number(thr, "thresholds", "residual_max_snu", 2e-4);
    }
    if (root.contains("output")) {
        const json& out = root.at("output");
        if (!out.is_object())
            throw Error(ErrorCode::Validation, "config field 'output' must be an object");
        if (out.contains("trace")) config.trace_path = out.at("trace").get<std::string>();
        if (out.contains("report")) config.report_path = out.at("report").get<std::string>();
    }
    return config;
}

RunConfig parse_run_config(const std::string& path) {
    return parse_run_config_text(read_file(path), path);
}

std::string run_config_to_json(const RunConfig& config) {
    json root;
    root["system"] = {{"v_a_snu", config.system.v_a},
                      {"t_channel", config.system.t_channel},
                      {"eta", config.system.eta},
                      {"eps_mod_snu", config.system.eps_mod},
                      {"v_el_snu", config.system.v_el},
                      {"gain_mv2", config.system.gain_v2 * 1e6},
                      {"n_per_group", config.system.n_per_group},
                      {"seed", config.system.seed}};
    json sched;
    sched["ratios"] = config.schedule.ratios;
    if (!config.schedule.level_bias.empty()) sched["level_bias"] = config.schedule.level_bias;
    root["schedule"] = sched;
    json atk;
    for (const auto& a : config.attack.attacks) {
        if (const auto* ir = std::get_if<InterceptResend>(&a)) {
            atk["intercept_resend"] = {{"mu", ir->mu}};
        } else if (const auto* wl = std::get_if<WavelengthInjection>(&a)) {
            atk["wavelength"] = {{"c0_snu", wl->c0}, {"c1_snu", wl->c1}, {"c2_snu", wl->c2}};
        } else if (const auto* sat = std::get_if<Saturation>(&a)) {
            atk["saturation"] = {{"alpha_snu_std", sat->alpha},
                                 {"delta_snu_std", sat->delta},
                                 {"offset_atten_exponent", sat->offset_atten_exponent}};
        }
    }
    root["attack"] = atk.is_null() ? json() : atk;
    root["thresholds"] = {{"r2_min", config.thresholds.r2_min},
                          {"residual_max_snu", config.thresholds.residual_max_snu}};
    if (!config.trace_path.empty() || !config.report_path.empty()) {
        json out;
        if (!config.trace_path.empty()) out["trace"] = config.trace_path;
        if (!config.report_path.empty()) out["report"] = config.report_path;
        root["output"] = out;
    }
    return root.dump(2) + "\n";
}

void write_trace_csv(const std::string& path, const std::vector<PulseRecord>& records) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    std::fputs("index,quadrature,atten_index,alice_value,bob_value_volts\n", f);
    for (const PulseRecord& r : records) {
        std::fprintf(f, "%" PRIu64 ",%c,%u,%.17g,%.17g\n", r.index,
                     quadrature_label(r.quadrature), r.atten_index, r.alice_value,
                     r.bob_value_volts);
    }
    if (std::fclose(f) != 0) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& text, const std::string& path, std::size_t row) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw Error(ErrorCode::Parse,
                    path + ": row " + std::to_string(row) + ": bad number '" + text + "'");
    return v;
}

}  // namespace

std::vector<PulseRecord> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) ||
        line != "index,quadrature,atten_index,alice_value,bob_value_volts")
        throw Error(ErrorCode::Parse, path + ": row 1: bad trace header");
    std::vector<PulseRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw Error(ErrorCode::Parse,
                        path + ": row " + std::to_string(row) + ": expected 5 fields");
        PulseRecord r;
        r.index = static_cast<std::uint64_t>(parse_double(fields[0], path, row));
        if (fields[1] == "X")
            r.quadrature = Quadrature::X;
        else if (fields[1] == "P")
            r.quadrature = Quadrature::P;
        else
            throw Error(ErrorCode::Parse,
                        path + ": row " + std::to_string(row) + ": bad quadrature label");
        r.atten_index = static_cast<std::uint32_t>(parse_double(fields[2], path, row));
        r.alice_value = parse_double(fields[3], path, row);
        r.bob_value_volts = parse_double(fields[4], path, row);
        records.push_back(r);
    }
    return records;
}

namespace {
constexpr const char* kSummaryHeader =
    "quadrature,atten_index,ratio,count,signal_var_v2,noise_var_v2";
}

void write_group_summary_csv(const std::string& path, const std::vector<GroupStats>& stats,
                             const AttenuationSchedule& schedule) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    std::fprintf(f, "%s\n", kSummaryHeader);
    for (const GroupStats& g : stats) {
        std::fprintf(f, "%c,%u,%.17g,%" PRId64 ",%.17g,%.17g\n", quadrature_label(g.quadrature),
                     g.atten_index, schedule.ratios[g.atten_index], g.n, g.signal_var,
                     g.noise_var);
    }
    if (std::fclose(f) != 0) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

bool is_group_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::string line;
    std::getline(in, line);
    return line == kSummaryHeader;
}

std::vector<GroupStats> read_group_summary_csv(const std::string& path,
                                               std::vector<double>* ratios_out) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != kSummaryHeader)
        throw Error(ErrorCode::Parse, path + ": row 1: bad group summary header");
    std::vector<GroupStats> stats;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 6)
            throw Error(ErrorCode::Parse,
                        path + ": row " + std::to_string(row) + ": expected 6 fields");
        GroupStats g;
        if (fields[0] == "X")
            g.quadrature = Quadrature::X;
        else if (fields[0] == "P")
            g.quadrature = Quadrature::P;
        else
            throw Error(ErrorCode::Parse,
                        path + ": row " + std::to_string(row) + ": bad quadrature label");
        g.atten_index = static_cast<std::uint32_t>(parse_double(fields[1], path, row));
        const double ratio = parse_double(fields[2], path, row);
        g.n = static_cast<std::int64_t>(parse_double(fields[3], path, row));
        g.signal_var = parse_double(fields[4], path, row);
        g.noise_var = parse_double(fields[5], path, row);
        g.unit = VarianceUnit::Volts2;
        stats.push_back(g);
        if (ratios_out != nullptr && g.quadrature == Quadrature::X) ratios_out->push_back(ratio);
    }
    return stats;
}

namespace {

json verdict_to_json(const GateVerdict& v) {
    return json{{"accepted", v.accepted},
                {"r2_noise_signal", v.r2_noise_signal},
                {"r2_signal_atten", v.r2_signal_atten},
                {"max_residual_snu", v.max_residual_snu},
                {"shot_noise_estimate", v.shot_noise_estimate},
                {"excess_noise_slope", v.excess_noise_slope},
                {"key_group_signal_snu", v.key_group_signal_snu},
                {"reject_reasons", v.reject_reasons}};
}

GateVerdict verdict_from_json(const json& j) {
    GateVerdict v;
    v.accepted = j.at("accepted").get<bool>();
    v.r2_noise_signal = j.at("r2_noise_signal").get<double>();
    v.r2_signal_atten = j.at("r2_signal_atten").get<double>();
    v.max_residual_snu = j.at("max_residual_snu").get<double>();
    v.shot_noise_estimate = j.at("shot_noise_estimate").get<double>();
    v.excess_noise_slope = j.at("excess_noise_slope").get<double>();
    v.key_group_signal_snu = j.at("key_group_signal_snu").get<double>();
    v.reject_reasons = j.at("reject_reasons").get<std::vector<std::string>>();
    return v;
}

}  // namespace

void write_report_json(const std::string& path, const BlockVerdict& verdict,
                       const GateThresholds& thresholds) {
    json root;
    root["accepted"] = verdict.accepted;
    root["thresholds"] = {{"r2_min", thresholds.r2_min},
                          {"residual_max_snu", thresholds.residual_max_snu}};
    root["x"] = verdict_to_json(verdict.x);
    root["p"] = verdict_to_json(verdict.p);
    write_file(path, root.dump(2) + "\n");
}

BlockVerdict read_report_json(const std::string& path) {
    json root;
    try {
        root = json::parse(read_file(path));
        BlockVerdict v;
        v.accepted = root.at("accepted").get<bool>();
        v.x = verdict_from_json(root.at("x"));
        v.p = verdict_from_json(root.at("p"));
        return v;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, path + ": " + e.what());
    }
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_manifest_json(const std::string& path, const RunConfig& config,
                         const std::string& trace_path) {
    char hash_hex[19];
    std::snprintf(hash_hex, sizeof hash_hex, "0x%016" PRIx64,
                  fnv1a64(run_config_to_json(config)));
    json root;
    root["config_hash"] = hash_hex;
    root["seed"] = config.system.seed;
    root["trace"] = trace_path;
    write_file(path, root.dump(2) + "\n");
}

}  // namespace cvshot
