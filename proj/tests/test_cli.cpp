// End-to-end checks of the command-line tool: output formats, config
// round-trips, exit codes. The binary path comes from the QMEMDIM_CLI
// environment variable (set by CTest).

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

std::string cli_path() {
    const char* path = std::getenv("QMEMDIM_CLI");
    REQUIRE_MESSAGE(path != nullptr, "QMEMDIM_CLI must point at the CLI binary");
    return path;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Runs the CLI with stderr folded into stdout when capture_stderr is set.
RunResult run_cli(const std::string& args, bool capture_stderr = false) {
    const std::string cmd =
        cli_path() + " " + args + (capture_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    std::array<char, 4096> buffer;
    size_t got = 0;
    while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        result.output.append(buffer.data(), got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/qmemdim_cli_test_") + name;
    std::ofstream file(path);
    REQUIRE(file.good());
    file << content;
    return path;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("ladder CSV is exact and byte-stable") {
    const std::string expected =
        "level,a,b,c,d,success_prob\n"
        "0,0.9,0.0333333333333,0.0333333333333,0.0333333333333,0.875555555556\n"
        "1,0.926395939086,0.00253807106599,0.00253807106599,0.0685279187817,"
        "0.867968770131\n"
        "2,0.988763544604,0.00040077185691,0.00541784176933,0.00541784176933,\n";
    const RunResult first = run_cli("ladder --f0 0.9 --d 2");
    CHECK(first.exit_code == 0);
    CHECK(first.output == expected);
    const RunResult second = run_cli("ladder --f0 0.9 --d 2");
    CHECK(second.output == first.output); // byte-identical reruns
}

TEST_CASE("ladder from explicit coefficients") {
    const RunResult result =
        run_cli("ladder --a 0.25 --b 0.25 --c 0.25 --d-coef 0.25 --d 1 --format json");
    CHECK(result.exit_code == 0);
    const json doc = json::parse(result.output);
    CHECK(doc.at("levels").at(0).at("success_prob").get<double>() ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("perfect ladder warns on stderr") {
    const RunResult result = run_cli("ladder --f0 1 --d 3", /*capture_stderr=*/true);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("warning:") != std::string::npos);
    const RunResult quiet = run_cli("ladder --f0 1 --d 3");
    CHECK(quiet.output.find("warning:") == std::string::npos);
}

TEST_CASE("outage command reports the stationary outage") {
    const RunResult result =
        run_cli("outage --m 13 --d 2 --c 1 --w 0 --f0 0.9 --format json");
    CHECK(result.exit_code == 0);
    const json doc = json::parse(result.output);
    CHECK(doc.at("outage").get<double>() ==
          doctest::Approx(0.000184887793431933).epsilon(1e-6));
    CHECK(doc.at("config").at("m").get<int>() == 13);
}

TEST_CASE("stationary emits the full table plus marginal") {
    const RunResult result =
        run_cli("stationary --m 4 --d 1 --c 1 --f0 0.9 --format csv");
    CHECK(result.exit_code == 0);
    CHECK(result.output.rfind("n0,n1,probability\n", 0) == 0);
    CHECK(result.output.find("\n\nnd,probability\n") != std::string::npos);
    // 5 states + marginal block.
    const RunResult json_out =
        run_cli("stationary --m 4 --d 1 --c 1 --f0 0.9 --format json");
    const json doc = json::parse(json_out.output);
    CHECK(doc.at("states").size() == 5);
    CHECK(doc.at("marginal_nd").size() == 5);
}

TEST_CASE("direct solver cross-check flag") {
    const RunResult power =
        run_cli("stationary --m 6 --d 1 --c 1 --f0 0.9 --format json");
    const RunResult direct =
        run_cli("stationary --m 6 --d 1 --c 1 --f0 0.9 --solver direct --format json");
    CHECK(direct.exit_code == 0);
    const json a = json::parse(power.output);
    const json b = json::parse(direct.output);
    for (size_t k = 0; k < a.at("states").size(); ++k) {
        const double pa = a.at("states").at(k).at("probability").get<double>();
        const double pb = b.at("states").at(k).at("probability").get<double>();
        CHECK(pa == doctest::Approx(pb).epsilon(1e-9));
    }
}

TEST_CASE("config files round-trip and flags override them") {
    const std::string config_path = write_temp(
        "config.json",
        R"({"m": 13, "d": 2, "c": 1, "w": 0, "f0": 0.9, "format": "json"})");
    const RunResult first = run_cli("outage --config " + config_path);
    CHECK(first.exit_code == 0);
    const json parsed = json::parse(first.output);

    // Re-feed the emitted config verbatim: the result must be identical.
    const std::string roundtrip_path =
        write_temp("config_roundtrip.json", parsed.at("config").dump());
    const RunResult second = run_cli("outage --config " + roundtrip_path);
    CHECK(second.exit_code == 0);
    CHECK(json::parse(second.output).at("config") == parsed.at("config"));
    CHECK(second.output == first.output);

    // A flag overrides the file value.
    const RunResult overridden = run_cli("outage --config " + config_path + " --m 12");
    const json over = json::parse(overridden.output);
    CHECK(over.at("config").at("m").get<int>() == 12);
    CHECK(over.at("outage").get<double>() > 1e-3);
}

TEST_CASE("simulate compares against the analytical solution") {
    const RunResult result = run_cli(
        "simulate --m 16 --d 2 --c 1 --f0 0.9 --rounds 100000 --burn-in 1000 "
        "--seed 3 --format json");
    CHECK(result.exit_code == 0);
    const json doc = json::parse(result.output);
    CHECK(doc.at("tv_distance").get<double>() < 0.05);
    CHECK(doc.at("rounds_counted").get<long>() == 99000);
    const RunResult again = run_cli(
        "simulate --m 16 --d 2 --c 1 --f0 0.9 --rounds 100000 --burn-in 1000 "
        "--seed 3 --format json");
    CHECK(again.output == result.output); // seeded rerun is bit-identical
}

TEST_CASE("sweep consumes the spec file and emits both blocks") {
    const std::string spec_path = write_temp(
        "sweep.json",
        R"({"f0": [0.9, 0.99], "c": 1, "d": 2, "w": [0], "m_min": 9, "m_max": 14,
            "target": 1e-3})");
    const RunResult result = run_cli("sweep --spec " + spec_path);
    CHECK(result.exit_code == 0);
    CHECK(result.output.rfind("f0,w,m,outage,iterations,converged\n", 0) == 0);
    CHECK(result.output.find("\n\nf0,w,min_memory\n") != std::string::npos);
    CHECK(result.output.find("0.9,0,13") != std::string::npos);
    CHECK(result.output.find("0.99,0,10") != std::string::npos);

    const RunResult json_result =
        run_cli("sweep --spec " + spec_path + " --format json");
    const json doc = json::parse(json_result.output);
    CHECK(doc.at("rows").size() == 12);
    CHECK(doc.at("min_memory").at(0).at("min_memory").get<int>() == 13);
    CHECK(doc.at("min_memory").at(1).at("min_memory").get<int>() == 10);
}

TEST_CASE("exit codes distinguish failure classes") {
    CHECK(run_cli("outage --m 13 --d 2 --c 1 --f0 1.5").exit_code == 2);
    CHECK(run_cli("outage --m 13 --d 2 --c 1").exit_code == 2); // no state given
    CHECK(run_cli("outage --m 13 --d 2 --c 1 --f0 0.9 --f0 0.9 --a 1 --b 0 "
                  "--c-coef 0 --d-coef 0")
              .exit_code == 2);
    CHECK(run_cli("outage --no-such-flag").exit_code == 2);
    CHECK(run_cli("outage --m 13 --d 2 --c 1 --f0 0.9 --max-iters 1").exit_code == 3);
    CHECK(run_cli("outage --m 200000 --d 3 --c 1 --f0 0.9").exit_code == 4);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("bootstrap parameters flow through to the chain") {
    const RunResult result =
        run_cli("outage --m 32 --d 2 --c 13 --w 12 --f0 0.9 --format json");
    CHECK(result.exit_code == 0);
    const json doc = json::parse(result.output);
    CHECK(doc.at("outage").get<double>() ==
          doctest::Approx(0.000136778187709508).epsilon(1e-9));
    // The alternative measurement point is a different, far smaller number.
    const RunResult pre = run_cli(
        "outage --m 32 --d 2 --c 13 --w 12 --f0 0.9 --measure pre-consumption "
        "--format json");
    CHECK(json::parse(pre.output).at("outage").get<double>() < 1e-8);
}

TEST_CASE("thread count from the environment leaves results unchanged") {
    const std::string spec_path = write_temp(
        "sweep_threads.json",
        R"({"f0": [0.9], "c": 1, "d": 2, "w": [0], "m_min": 10, "m_max": 13,
            "target": 1e-3})");
    const RunResult serial =
        run_cli("sweep --spec " + spec_path + " --threads 1");
    const std::string env_cmd =
        "QMEMDIM_THREADS=3 " + cli_path() + " sweep --spec " + spec_path +
        " 2>/dev/null";
    FILE* pipe = popen(env_cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string env_output;
    std::array<char, 4096> buffer;
    size_t got = 0;
    while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        env_output.append(buffer.data(), got);
    }
    CHECK(pclose(pipe) == 0);
    CHECK(env_output == serial.output);
}

TEST_CASE("output lands in the requested file") {
    const std::string out_path = "/tmp/qmemdim_cli_test_out.csv";
    std::remove(out_path.c_str());
    const RunResult result =
        run_cli("ladder --f0 0.9 --d 1 --out " + out_path);
    CHECK(result.exit_code == 0);
    CHECK(result.output.empty());
    std::ifstream file(out_path);
    REQUIRE(file.good());
    std::string header;
    std::getline(file, header);
    CHECK(header == "level,a,b,c,d,success_prob");
}

} // TEST_SUITE
