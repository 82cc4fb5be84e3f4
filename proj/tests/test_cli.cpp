// End-to-end checks of the cvshot binary: byte-identical reruns, exit code
// classes, the analyze/keyrate pipeline. The binary path comes from the
// CVSHOT_BIN compile definition set by CMake.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("cvshot_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(CVSHOT_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_config(const std::string& path, int n_per_group, const char* attack = "null") {
    std::ofstream out(path);
    out << R"({
  "system": {
    "v_a_snu": 40.0, "t_channel": 1.0, "eta": 0.9, "eps_mod_snu": 0.0828,
    "v_el_snu": 0.01, "gain_mv2": 783.16, "n_per_group": )"
        << n_per_group << R"(, "seed": 5
  },
  "schedule": { "k": 16, "step": 0.7, "top": 1.0 },
  "attack": )" << attack
        << R"(,
  "thresholds": { "r2_min": 0.99, "residual_max_snu": 0.02 }
})";
}

}  // namespace

TEST_CASE("simulate twice with the same config gives byte-identical traces") {
    TempDir dir;
    const std::string config = dir.file("run.json");
    write_config(config, 2000);
    REQUIRE(run("simulate --config " + config + " --out " + dir.file("a.csv")) == 0);
    REQUIRE(run("simulate --config " + config + " --out " + dir.file("b.csv")) == 0);
    const std::string a = slurp(dir.file("a.csv"));
    REQUIRE(!a.empty());
    CHECK(a == slurp(dir.file("b.csv")));

    // a different seed changes the trace
    REQUIRE(run("simulate --config " + config + " --seed 6 --out " + dir.file("c.csv")) == 0);
    CHECK(a != slurp(dir.file("c.csv")));

    // manifest exists and names the trace
    CHECK(slurp(dir.file("a.csv") + ".manifest.json").find("config_hash") != std::string::npos);
}

TEST_CASE("exit codes: validation 2, io 3, parse 4, gate rejection 5") {
    TempDir dir;
    const std::string bad_cfg = dir.file("bad.json");
    {
        std::ofstream out(bad_cfg);
        out << R"({"system": {"v_a_snu": -4}, "schedule": {"k":16,"step":0.7}})";
    }
    CHECK(run("simulate --config " + bad_cfg) == 2);

    const std::string step1 = dir.file("step1.json");
    {
        std::ofstream out(step1);
        out << R"({
  "system": {"v_a_snu": 40.0, "t_channel": 1.0, "eta": 0.9, "eps_mod_snu": 0.08,
             "v_el_snu": 0.01, "gain_mv2": 783.16, "n_per_group": 100, "seed": 1},
  "schedule": {"k": 16, "step": 1.0}
})";
    }
    CHECK(run("simulate --config " + step1) == 2);

    CHECK(run("simulate --config " + dir.file("missing.json")) == 3);

    const std::string garbled = dir.file("garbled.json");
    {
        std::ofstream out(garbled);
        out << "{ definitely not json";
    }
    CHECK(run("simulate --config " + garbled) == 4);

    const std::string bad_trace = dir.file("bad_trace.csv");
    {
        std::ofstream out(bad_trace);
        out << "index,quadrature,atten_index,alice_value,bob_value_volts\n0,Z,0,1,1\n";
    }
    const std::string cfg = dir.file("cfg.json");
    write_config(cfg, 2000);
    CHECK(run("analyze --trace " + bad_trace + " --config " + cfg) == 4);
}

TEST_CASE("simulate -> analyze -> keyrate pipeline") {
    TempDir dir;
    const std::string config = dir.file("run.json");
    // small n: the honest gate rejects on R^2 (statistics too thin), which
    // keyrate must refuse with the gate-rejection exit code
    write_config(config, 3000);
    REQUIRE(run("simulate --config " + config + " --summary-only --out " + dir.file("s.csv")) ==
            0);
    REQUIRE(run("analyze --trace " + dir.file("s.csv") + " --config " + config + " --out " +
                dir.file("r.json") + " --figures-dir " + dir.file("figs")) == 0);
    CHECK(slurp(dir.file("r.json")).find("r2_noise_signal") != std::string::npos);
    CHECK(fs::exists(dir.file("figs") + "/noise_vs_signal_X.csv"));
    CHECK(fs::exists(dir.file("figs") + "/signal_vs_atten_P.csv"));
    CHECK(run("keyrate --report " + dir.file("r.json")) == 5);

    // explicit parameters bypass the report and succeed
    CHECK(run("keyrate --xi-alice 0.03") == 0);

    // full-trace path agrees with the summary path
    REQUIRE(run("simulate --config " + config + " --out " + dir.file("t.csv")) == 0);
    REQUIRE(run("analyze --trace " + dir.file("t.csv") + " --config " + config + " --out " +
                dir.file("r2.json")) == 0);
    const std::string r1 = slurp(dir.file("r.json"));
    const std::string r2 = slurp(dir.file("r2.json"));
    CHECK(!r1.empty());
    CHECK(r1 == r2);
}

TEST_CASE("attack-sweep emits a table") {
    TempDir dir;
    const std::string out = dir.file("sweep.csv");
    REQUIRE(run("attack-sweep --param delta --min 0 --max 4 --steps 3 --n-per-group 4000 --out " +
                out) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("delta,r2_noise_signal_X") != std::string::npos);
    // header + 3 sweep rows
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
