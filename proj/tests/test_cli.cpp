#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("EXMAX_CLI");
    REQUIRE_MESSAGE(p != nullptr, "EXMAX_CLI must point at the CLI binary");
    return p;
}

std::string workdir() {
    const char* p = std::getenv("EXMAX_WORKDIR");
    return p ? p : ".";
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    RunResult r;
    FILE* pipe = popen((cli_path() + " " + args + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string write_file(const std::string& name, const std::string& content) {
    std::string path = workdir() + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("solve reports the extremal value with an oracle check") {
    std::string path = write_file("cli_square.json", R"({
        "grid": [0, 1, 2],
        "p_bar": 1.0,
        "n_bar": 1.0,
        "objective": {"builtin": {"name": "power", "exponent": 2}},
        "direction": "max"
    })");
    RunResult r = run("solve " + path);
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["result"]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(doc["result"]["branch"] == "endpoint_two_point");
    CHECK(doc["oracle"]["agreement"].get<bool>());
}

TEST_CASE("solve reads grids given as ranges and table objectives") {
    std::string path = write_file("cli_range.json", R"({
        "grid": {"start": 0, "stop": 4, "step": 1},
        "p_bar": 1.0,
        "n_bar": 2.0,
        "objective": {"table": {"x": [0, 1, 2, 3, 4], "f": [0, 1, 1.5, 1.8, 2.0]}},
        "direction": "min"
    })");
    RunResult r = run("solve " + path);
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["oracle"]["agreement"].get<bool>());
}

TEST_CASE("infeasible problems exit 3") {
    std::string path = write_file("cli_infeasible.json", R"({
        "grid": [0, 1, 2],
        "p_bar": 1.0,
        "n_bar": 2.5,
        "objective": {"builtin": {"name": "power", "exponent": 2}}
    })");
    CHECK(run("solve " + path).exit_code == 3);
}

TEST_CASE("schema violations exit 2 and name the field") {
    std::string path = write_file("cli_unknown.json", R"({
        "grid": [0, 1, 2],
        "p_bar": 1.0,
        "n_bar": 1.0,
        "objective": {"builtin": {"name": "power", "exponent": 2}},
        "surprise": true
    })");
    CHECK(run("solve " + path).exit_code == 2);
    std::string bad = write_file("cli_badexpr.json", R"({
        "grid": [0, 1, 2],
        "p_bar": 1.0,
        "n_bar": 1.0,
        "objective": {"expression": "2 +* x"}
    })");
    CHECK(run("solve " + bad).exit_code == 2);
    CHECK(run("solve " + workdir() + "/does_not_exist.json").exit_code == 2);
}

TEST_CASE("mixed-slope expression objectives fall through to segmentation") {
    std::string path = write_file("cli_mixed.json", R"({
        "grid": {"start": 0, "stop": 10, "step": 1},
        "p_bar": 1.0,
        "n_bar": 5.0,
        "objective": {"expression": "sin(x/2) + x/10"},
        "direction": "max"
    })");
    RunResult r = run("solve " + path);
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc.contains("notice"));
    CHECK(doc["result"]["branch"] == "segmented");
    CHECK(doc["oracle"]["agreement"].get<bool>());
}

TEST_CASE("verify checks both directions") {
    std::string path = write_file("cli_verify.json", R"({
        "grid": [0, 1, 2, 3, 4, 5],
        "p_bar": 0.7,
        "n_bar": 2.1,
        "objective": {"builtin": {"name": "power", "exponent": 2}}
    })");
    RunResult r = run("verify " + path);
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["agreement"].get<bool>());
    REQUIRE(doc["checks"].size() == 2);
}

TEST_CASE("reports are byte-identical across runs") {
    std::string path = write_file("cli_det.json", R"({
        "grid": [0, 1, 2, 3],
        "p_bar": 0.8,
        "n_bar": 1.0,
        "objective": {"builtin": {"name": "power", "exponent": 2}},
        "direction": "max"
    })");
    RunResult a = run("solve " + path);
    RunResult b = run("solve " + path);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("distribution CSV output") {
    std::string path = write_file("cli_csv.json", R"({
        "grid": [0, 1, 2],
        "p_bar": 1.0,
        "n_bar": 1.0,
        "objective": {"builtin": {"name": "power", "exponent": 2}},
        "direction": "max"
    })");
    std::string csv = workdir() + "/cli_out.csv";
    REQUIRE(run("solve " + path + " --csv " + csv).exit_code == 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "support,weight");
    double wsum = 0.0;
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        wsum += std::stod(line.substr(comma + 1));
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("battery subcommand") {
    RunResult r = run("battery --nbar 2.4");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    const auto& dist = doc["result"]["distribution"];
    REQUIRE(dist.size() == 2);
    CHECK(dist[0]["x"].get<double>() == 2.0);
    CHECK(dist[0]["w"].get<double>() == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("interferometer subcommand and sweep CSV") {
    RunResult r = run("mzi --nbar 4 --cap 100");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["oi_state"]["fisher_information"].get<double>() ==
          doctest::Approx(400.0).epsilon(1e-9));
    CHECK(doc["noon"]["fisher_information"].get<double>() == doctest::Approx(16.0).epsilon(1e-12));

    std::string csv = workdir() + "/cli_mzi.csv";
    REQUIRE(run("mzi --nbar 1 --cap 100 --sweep 1:20:1 --csv " + csv).exit_code == 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n_bar_total,crb_noon,crb_oi");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 20);
}

TEST_CASE("cavity optimization subcommand agrees with its oracle") {
    RunResult r = run("lzjc --delta 0.3 --v 1 --nbar 20");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["result"]["f_max"].get<double>() == doctest::Approx(25.83).epsilon(1e-2));
    CHECK(doc["oracle"]["agreement"].get<bool>());
    CHECK(doc["result"]["beats_sql"].get<bool>());
    CHECK_FALSE(doc["result"]["beats_heisenberg"].get<bool>());
}

TEST_CASE("unknown flags and missing subcommands exit 2") {
    CHECK(run("solve").exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
}
