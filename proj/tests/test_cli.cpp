// End-to-end tests of the command-line binary: exit codes, output formats,
// error reporting, and determinism. The binary path comes from the build
// system via INTERLACE_CLI_PATH.

#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "interlace_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Run the binary with the given arguments, capturing stdout, stderr, and the
// exit code. Arguments are caller-controlled literals, so shell quoting is
// limited to wrapping each one.
CliResult run_cli(const std::string& args) {
    static int invocation = 0;
    fs::path err_file = work_dir() / ("stderr_" + std::to_string(invocation++) + ".txt");
    std::string command =
        std::string(INTERLACE_CLI_PATH) + " " + args + " 2>" + err_file.string();
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.out.append(buffer, got);
    }
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream err(err_file);
    result.err.assign(std::istreambuf_iterator<char>(err), std::istreambuf_iterator<char>());
    return result;
}

std::string write_file(const std::string& name, const std::string& content) {
    fs::path p = work_dir() / name;
    std::ofstream out(p);
    out << content;
    return p.string();
}

std::string quadrilateral_path() {
    static const std::string p = write_file("cycle4.txt", "0 1\n1 2\n2 3\n3 0\n");
    return p;
}

std::string complete4_path() {
    static const std::string p = write_file("complete4.txt", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    return p;
}

} // namespace

TEST_CASE("compare reports a null result for identical networks") {
    CliResult r = run_cli("compare --a " + quadrilateral_path() + " --b " + quadrilateral_path());
    CHECK(r.exit_code == 0);
    CHECK(r.err.empty());
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["n"] == 4);
    CHECK(j["directed"] == false);
    CHECK(j["order"] == 2);
    CHECK(j["q_star"] == 0);
    CHECK(j["q_a"] == 8);
    CHECK(j["q_b"] == 8);
    CHECK(j["statistic"] == 0.0);
    CHECK(j["p_value"] == 0.5);
}

TEST_CASE("compare keys appear in the documented order") {
    CliResult r = run_cli("compare --a " + quadrilateral_path() + " --b " + complete4_path());
    const char* keys[] = {"\"n\"",         "\"directed\"", "\"order\"",   "\"q_star\"",
                          "\"q_a\"",       "\"q_b\"",      "\"statistic\"", "\"z_score\"",
                          "\"p_value\""};
    std::size_t pos = 0;
    for (const char* key : keys) {
        std::size_t found = r.out.find(key, pos);
        CHECK(found != std::string::npos);
        pos = found;
    }
}

TEST_CASE("compare text format prints key: value lines") {
    CliResult r = run_cli("compare --a " + quadrilateral_path() + " --b " +
                          quadrilateral_path() + " --format text");
    CHECK(r.exit_code == 0);
    CHECK(r.out.substr(0, 5) == "n: 4\n");
    CHECK(r.out.find("p_value: 0.5") != std::string::npos);
}

TEST_CASE("compare is symmetric in its arguments up to the shared statistic") {
    std::string sparse = write_file("sparse.txt", "0 1\n1 2\n2 3\n3 4\n4 0\n0 2\n");
    CliResult ab = run_cli("compare --a " + quadrilateral_path() + " --b " + sparse);
    CliResult ba = run_cli("compare --a " + sparse + " --b " + quadrilateral_path());
    REQUIRE(ab.exit_code == 0);
    REQUIRE(ba.exit_code == 0);
    nlohmann::json jab = nlohmann::json::parse(ab.out);
    nlohmann::json jba = nlohmann::json::parse(ba.out);
    CHECK(jab["statistic"] == jba["statistic"]);
    CHECK(jab["p_value"] == jba["p_value"]);
    // The two files disagree on node count; both runs settle on the larger.
    CHECK(jab["n"] == 5);
    CHECK(jba["n"] == 5);
}

TEST_CASE("compare flags directed networks in the report") {
    std::string arcs = write_file("arcs.txt", "0 2\n0 3\n1 2\n1 3\n");
    CliResult r = run_cli("compare --a " + arcs + " --b " + arcs + " --directed");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["directed"] == true);
}

TEST_CASE("compare exits 3 on a degenerate denominator") {
    std::string single = write_file("single_edge.txt", "0 1\n");
    CliResult r = run_cli("compare --a " + single + " --b " + single);
    CHECK(r.exit_code == 3);
    CHECK(r.out.empty());
    CHECK(r.err.substr(0, 8) == "ERROR 3:");
}

TEST_CASE("compare exits 2 on a missing input file") {
    CliResult r = run_cli("compare --a " + (work_dir() / "no_such.txt").string() + " --b " +
                          quadrilateral_path());
    CHECK(r.exit_code == 2);
    CHECK(r.err.substr(0, 8) == "ERROR 2:");
}

TEST_CASE("compare rejects order 3 with --directed before touching files") {
    CliResult r = run_cli("compare --a missing_a.txt --b missing_b.txt --order 3 --directed");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("undirected") != std::string::npos);
}

TEST_CASE("argument errors exit 2") {
    CHECK(run_cli("compare --a only_one.txt").exit_code == 2);
    CHECK(run_cli("compare --a a.txt --b b.txt --bogus").exit_code == 2);
    CHECK(run_cli("compare --a a.txt --b b.txt --order 4").exit_code == 2);
    CHECK(run_cli("nonsense-subcommand").exit_code == 2);
    CliResult r = run_cli("compare --a a.txt --b b.txt --format yaml");
    CHECK(r.exit_code == 2);
    CHECK(r.err.substr(0, 8) == "ERROR 2:");
}

TEST_CASE("help exits 0") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("compare --help").exit_code == 0);
    CHECK(run_cli("simulate --help").exit_code == 0);
}

TEST_CASE("scan resolves manifest paths and emits the full triangle as CSV") {
    write_file("tri_a.txt", "0 1\n1 2\n2 3\n3 0\n");
    write_file("tri_b.txt", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    write_file("tri_c.txt", "0 1\n1 2\n0 2\n");
    std::string manifest = write_file("manifest.txt",
                                      "# relative to this file\ntri_a.txt\n  tri_b.txt\ntri_c.txt\n");
    CliResult r = run_cli("scan --manifest " + manifest);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.substr(0, 26) == "i,j,statistic,p_value\n0,0,");
    int rows = 0;
    for (char c : r.out) {
        rows += c == '\n' ? 1 : 0;
    }
    CHECK(rows == 7); // header plus t(t+1)/2 = 6 pair rows
    CHECK(r.out.find("0,0,0,0.5\n") != std::string::npos);
}

TEST_CASE("scan JSON output parses and matches the list length") {
    write_file("tri_a.txt", "0 1\n1 2\n2 3\n3 0\n");
    write_file("tri_b.txt", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    std::string manifest = write_file("manifest2.txt", "tri_a.txt\ntri_b.txt\n");
    CliResult r = run_cli("scan --manifest " + manifest + " --format json");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["t"] == 2);
    CHECK(j["stats"].size() == 2);
    CHECK(j["stats"][0].size() == 2);
    CHECK(j["pvalues"][1][0].is_null()); // below the diagonal
}

TEST_CASE("scan exits 2 on a missing manifest") {
    CliResult r = run_cli("scan --manifest " + (work_dir() / "ghost.txt").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("manifest") != std::string::npos);
}

TEST_CASE("simulate output is byte-identical across worker counts") {
    std::string args = "simulate --case 1 --n 60 --k 2 --beta 2 --b 0.3 --reps 6 --seed 9";
    CliResult one = run_cli(args + " --workers 1");
    CliResult three = run_cli(args + " --workers 3");
    REQUIRE(one.exit_code == 0);
    REQUIRE(three.exit_code == 0);
    CHECK(one.out == three.out);
    nlohmann::json j = nlohmann::json::parse(one.out);
    CHECK(j["replicates"] == 6);
    CHECK(j["b_used"] == 0.3);
}

TEST_CASE("simulate rejects both or neither of --b and --target-snr") {
    std::string head = "simulate --case 1 --n 60 --k 2 --beta 2 --reps 4";
    CHECK(run_cli(head + " --b 0.3 --target-snr 1").exit_code == 2);
    CHECK(run_cli(head).exit_code == 2);
}

TEST_CASE("calibrate hits a reachable target and reports the achieved ratio") {
    CliResult probe = run_cli("simulate --case 1 --n 60 --k 2 --beta 2 --b 0.4 --reps 1 --seed 5");
    REQUIRE(probe.exit_code == 0);
    double target = nlohmann::json::parse(probe.out)["snr_theoretical"].get<double>();
    CliResult r = run_cli("calibrate --case 1 --n 60 --k 2 --beta 2 --seed 5 --target-snr " +
                          std::to_string(target));
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    double b = j["b"].get<double>();
    double snr = j["snr"].get<double>();
    CHECK(b > 0.0);
    CHECK(b < 1.0);
    CHECK(std::abs(snr - target) <= 1e-3 * target);
}

TEST_CASE("calibrate exits 2 when the target is unreachable") {
    CliResult r = run_cli("calibrate --case 1 --n 60 --k 2 --beta 2 --target-snr 1e9");
    CHECK(r.exit_code == 2);
    CHECK(r.err.substr(0, 8) == "ERROR 2:");
}

TEST_CASE("oracle-check reports exact matches and exits 0") {
    CliResult r = run_cli("oracle-check --n-max 7 --trials 40 --seed 1");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "40/40 exact matches\n");
}

TEST_CASE("oracle-check bounds its instance size") {
    CHECK(run_cli("oracle-check --n-max 13 --trials 5").exit_code == 2);
    CHECK(run_cli("oracle-check --n-max 1 --trials 5").exit_code == 2);
    CHECK(run_cli("oracle-check --n-max 5 --trials 0").exit_code == 2);
}

TEST_CASE("identical invocations produce identical bytes") {
    std::string args = "simulate --case 4 --n 40 --k 2 --beta 1.5 --b 0.5 --reps 5 --seed 11";
    CliResult first = run_cli(args);
    CliResult second = run_cli(args);
    REQUIRE(first.exit_code == 0);
    CHECK(first.out == second.out);
}
