#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "infc/cli.hpp"
#include "infc/config.hpp"
#include "infc/errors.hpp"

using namespace infc;
namespace fs = std::filesystem;

namespace {

const std::string kConfigDir = INFC_CONFIG_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("infc_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("shipped configs parse and validate") {
    for (const char* name : {"mm1.json", "twonode.json", "threshold.json",
                             "mincost_k.json", "mincost_gamma.json"}) {
        const Scenario sc = load_scenario(kConfigDir + "/" + name);
        CHECK(validate_network(sc.spec).empty());
        CHECK(run_validate(sc) == kExitOk);
    }
}

TEST_CASE("syntax errors carry file and line context") {
    try {
        parse_scenario("{\n  \"network\": {\n  broken\n}\n", "bad.json");
        FAIL("expected a parse error");
    } catch (const InvalidArgument& e) {
        const std::string what = e.what();
        CHECK(what.find("bad.json:3") != std::string::npos);
    }
}

TEST_CASE("missing fields are reported with their key path") {
    const std::string text = R"({
      "network": {"node_count": 1, "routing": {"c0": [[0.0]]},
                  "arrival_split": {"c0": [1.0]},
                  "external_rate": {"c0": 1.0}},
      "classes": [{"id": "c0", "complexity": "mapreduce", "surjectivity": 0.5}]
    })";
    try {
        parse_scenario(text, "x.json");
        FAIL("expected a config error");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("network.service_rate") !=
              std::string::npos);
    }
}

TEST_CASE("sweep grids must be strictly increasing and nonempty") {
    const std::string base = R"({
      "network": {"node_count": 1, "routing": {"c0": [[0.0]]},
                  "arrival_split": {"c0": [1.0]}, "external_rate": {"c0": 1.0},
                  "service_rate": {"c0": [2.0]}},
      "classes": [{"id": "c0", "complexity": "mapreduce", "surjectivity": 0.5}],
      "experiment": {"sweep": "threshold_vs_M", "m_grid": GRID}
    })";
    std::string bad = base;
    bad.replace(bad.find("GRID"), 4, "[1.0, 1.0, 2.0]");
    CHECK_THROWS_AS(parse_scenario(bad, "x.json"), InvalidArgument);
    std::string empty = base;
    empty.replace(empty.find("GRID"), 4, "[]");
    CHECK_THROWS_AS(parse_scenario(empty, "x.json"), InvalidArgument);
    std::string ok = base;
    ok.replace(ok.find("GRID"), 4, "[0.5, 1.0, 2.0]");
    CHECK(parse_scenario(ok, "x.json").m_grid.size() == 3);
}

TEST_CASE("auto surjectivity resolves from the function table") {
    const Scenario sc = load_scenario(kConfigDir + "/entropy_auto.json");
    REQUIRE(sc.auto_entropy.size() == 2);
    // xor on a uniform bit pair: H_G = H = 1 bit, Gamma = 1
    CHECK(sc.spec.classes[0].surjectivity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sc.h_func[0] == doctest::Approx(1.0).epsilon(1e-9));
    // ternary threshold: H_G = H(2/3, 1/3), H = log2 3
    const double h23 = -std::log2(2.0 / 3.0) * 2.0 / 3.0 - std::log2(1.0 / 3.0) / 3.0;
    CHECK(sc.spec.classes[1].surjectivity ==
          doctest::Approx(h23 / std::log2(3.0)).epsilon(1e-6));
}

TEST_CASE("threshold command writes a deterministic monotone table") {
    Scenario sc = load_scenario(kConfigDir + "/threshold.json");
    const fs::path out = temp_dir("threshold");
    CliOverrides ov;
    ov.out_dir = out.string();
    REQUIRE(run_threshold(sc, ov) == kExitOk);

    const std::string first = slurp(out / "threshold.tsv");
    REQUIRE(run_threshold(sc, ov) == kExitOk);
    CHECK(first == slurp(out / "threshold.tsv"));  // byte-identical re-run

    std::istringstream is(first);
    std::string line;
    double prev[3] = {-1.0, -1.0, -1.0};
    bool saw_zero_row = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'M') continue;
        std::istringstream row(line);
        double m, ts, tm, tc;
        row >> m >> ts >> tm >> tc;
        if (m == 0.0) {
            saw_zero_row = true;
            CHECK(ts == 0.0);
            CHECK(tm == 0.0);
            CHECK(tc == 0.0);
        }
        CHECK(ts <= tm + 1e-15);  // family ordering per row
        CHECK(tm <= tc + 1e-15);
        CHECK(ts >= prev[0]);  // monotone columns
        CHECK(tm >= prev[1]);
        CHECK(tc >= prev[2]);
        prev[0] = ts;
        prev[1] = tm;
        prev[2] = tc;
    }
    CHECK(saw_zero_row);
}

TEST_CASE("mincost command writes solution and sweep tables") {
    Scenario sc = load_scenario(kConfigDir + "/mincost_k.json");
    const fs::path out = temp_dir("mincost");
    CliOverrides ov;
    ov.out_dir = out.string();
    REQUIRE(run_mincost(sc, ov) == kExitOk);
    CHECK(fs::exists(out / "solution.tsv"));
    CHECK(fs::exists(out / "mincost_vs_k.tsv"));

    // objective column nondecreasing in k
    std::istringstream is(slurp(out / "mincost_vs_k.tsv"));
    std::string line;
    double prev = -1.0;
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'k') continue;
        std::istringstream row(line);
        double k, objective;
        row >> k >> objective;
        CHECK(objective >= prev - 1e-9);
        prev = objective;
        ++rows;
    }
    CHECK(rows == 10);

    const std::string again = slurp(out / "mincost_vs_k.tsv");
    REQUIRE(run_mincost(sc, ov) == kExitOk);
    CHECK(again == slurp(out / "mincost_vs_k.tsv"));
}

TEST_CASE("simulate command runs the baseline and audits pass") {
    Scenario sc = load_scenario(kConfigDir + "/mm1.json");
    sc.sim.horizon = 2e4;  // keep the unit test quick
    sc.sim.replications = 4;
    const fs::path out = temp_dir("simulate");
    CliOverrides ov;
    ov.out_dir = out.string();
    REQUIRE(run_simulate(sc, ov) == kExitOk);
    const std::string report = slurp(out / "sim_report.tsv");
    CHECK(report.find("audit_pass") != std::string::npos);
    CHECK(report.find("all_pass=1") != std::string::npos);
}

TEST_CASE("simulate propagates instability as the simulation exit code") {
    Scenario sc = load_scenario(kConfigDir + "/mm1.json");
    sc.spec.external_rate[0] = 3.0;  // rho = 1.5
    sc.sim.horizon = 1e5;
    sc.sim.queue_cap = 500;
    sc.sim.replications = 1;
    const fs::path out = temp_dir("simulate_bad");
    CliOverrides ov;
    ov.out_dir = out.string();
    CHECK(run_simulate(sc, ov) == kExitSimulation);
    CHECK(fs::exists(out / "sim_report.tsv"));  // partial report still written
}

TEST_CASE("entropy command writes records for auto classes") {
    Scenario sc = load_scenario(kConfigDir + "/entropy_auto.json");
    const fs::path out = temp_dir("entropy");
    CliOverrides ov;
    ov.out_dir = out.string();
    REQUIRE(run_entropy(sc, ov) == kExitOk);
    const std::string rec = slurp(out / "entropy_cxor.txt");
    CHECK(rec.find("value_bits=1") != std::string::npos);
    CHECK(rec.find("surjectivity=1") != std::string::npos);
    CHECK(fs::exists(out / "entropy_cthr.txt"));
}

TEST_CASE("cli binary end-to-end: exit codes partition failure classes") {
    const std::string cli = INFC_CLI_PATH;
    if (!fs::exists(cli)) return;  // tool not built in this configuration
    const fs::path out = temp_dir("cli_e2e");
    const std::string devnull = " > /dev/null 2>&1";

    auto exit_code = [](int status) { return WEXITSTATUS(status); };
    CHECK(exit_code(std::system(
              (cli + " validate --config " + kConfigDir + "/twonode.json" + devnull)
                  .c_str())) == 0);
    CHECK(exit_code(std::system(
              (cli + " validate --config /nonexistent.json" + devnull).c_str())) ==
          2);
    CHECK(exit_code(std::system((cli + " threshold --config " + kConfigDir +
                                 "/threshold.json --out " + out.string() + devnull)
                                    .c_str())) == 0);
    CHECK(fs::exists(out / "threshold.tsv"));

    // config without a grid: threshold refuses with the config exit code
    CHECK(exit_code(std::system((cli + " threshold --config " + kConfigDir +
                                 "/mm1.json --out " + out.string() + devnull)
                                    .c_str())) == 2);
    // direct entropy run on a table file
    CHECK(exit_code(std::system((cli + " entropy " + kConfigDir +
                                 "/tables/xor.tsv --out " + out.string() + devnull)
                                    .c_str())) == 0);
    CHECK(fs::exists(out / "entropy_xor.txt"));
}
