#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr interleaved
};

std::string binary_path() {
    const char* env = std::getenv("CRYSTALWALK_BIN");
    REQUIRE_MESSAGE(env != nullptr, "CRYSTALWALK_BIN must point at the CLI binary");
    return env;
}

RunResult run(const std::string& args, const std::string& env_prefix = {}) {
    const std::string cmd = env_prefix + "\"" + binary_path() + "\" " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof(buf), pipe)) result.output.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string write_temp(const std::string& name, const std::string& body) {
    std::ofstream out(name);
    out << body;
    return name;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("version flag reports the project version") {
    const RunResult r = run("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("1.0.0") != std::string::npos);
}

TEST_CASE("selftest passes") {
    const RunResult r = run("selftest");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("verification passed") != std::string::npos);
}

TEST_CASE("verify oracles exits zero on the builtin models") {
    for (const char* cfg : {"builtin:ice-symmetric", "builtin:graphite-symmetric"}) {
        const RunResult r = run(std::string("verify oracles --config ") + cfg);
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("[FAIL]") == std::string::npos);
    }
}

TEST_CASE("trajectory CSV has the documented shape") {
    const RunResult r =
        run("simulate --steps 6 --seed 3 --trajectory cli_traj_ice.csv");
    REQUIRE(r.exit_code == 0);
    std::ifstream in("cli_traj_ice.csv");
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto lines = lines_of(buffer.str());
    REQUIRE(lines.size() == 8);  // header + 7 states
    CHECK(lines[0] == "step,x,y,z,i,j,k_sign");
    CHECK(lines[1] == "0,0,0,0,1,,");  // ice rows leave j and k_sign empty
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const std::string& line = lines[k];
        CHECK(std::count(line.begin(), line.end(), ',') == 6);
    }
    std::remove("cli_traj_ice.csv");

    const RunResult g = run(
        "simulate --config builtin:graphite-symmetric --steps 4 --seed 3 "
        "--trajectory cli_traj_g.csv");
    REQUIRE(g.exit_code == 0);
    std::ifstream gin("cli_traj_g.csv");
    std::stringstream gbuffer;
    gbuffer << gin.rdbuf();
    const auto glines = lines_of(gbuffer.str());
    REQUIRE(glines.size() == 6);
    CHECK(glines[1] == "0,0,0,0,1,1,1");  // graphite start: all sign bits +1
    std::remove("cli_traj_g.csv");
}

TEST_CASE("simulate writes a summary document") {
    const RunResult r = run("simulate --steps 100 --seed 12 --summary cli_summary.json");
    REQUIRE(r.exit_code == 0);
    std::ifstream in("cli_summary.json");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string body = buffer.str();
    CHECK(body.find("\"steps\": 100") != std::string::npos);
    CHECK(body.find("\"ledger\"") != std::string::npos);
    CHECK(body.find("\"class_visits\"") != std::string::npos);
    std::remove("cli_summary.json");
}

TEST_CASE("asymptotics prints the covariance to stdout") {
    const RunResult r = run("asymptotics --config builtin:graphite-symmetric");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"Gamma\"") != std::string::npos);
    CHECK(r.output.find("\"Lambda\"") != std::string::npos);
    CHECK(r.output.find("0.1111111111111111") != std::string::npos);
}

TEST_CASE("unknown config keys exit with code 2 and name the key") {
    write_temp("cli_bad_key.json", R"({"lattice": "ice", "wishful": true})");
    const RunResult r = run("simulate --config cli_bad_key.json --steps 1");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("wishful") != std::string::npos);
    std::remove("cli_bad_key.json");
}

TEST_CASE("row normalization violations exit with code 2 naming the row") {
    write_temp("cli_bad_row.json",
               R"({"lattice": "ice", "p": 0.2, "horizontal": [[0.4,0.4,0.4],[0.3,0.3,0.2]]})");
    const RunResult r = run("verify oracles --config cli_bad_row.json");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("i=0") != std::string::npos);
    std::remove("cli_bad_row.json");
}

TEST_CASE("unknown flags and subcommands exit with code 2") {
    CHECK(run("explode").exit_code == 2);
    CHECK(run("simulate --frobnicate 3").exit_code == 2);
    CHECK(run("verify nonsense").exit_code == 2);
}

TEST_CASE("seed precedence: flag, then config, then environment") {
    const RunResult flagged = run("simulate --steps 64 --seed 5551");
    const RunResult env_only =
        run("simulate --steps 64", "CRYSTALWALK_SEED=5551 ");
    CHECK(flagged.exit_code == 0);
    CHECK(env_only.exit_code == 0);
    CHECK(flagged.output == env_only.output);

    write_temp("cli_seeded.json", R"({"lattice": "ice", "seed": 5551})");
    const RunResult from_config =
        run("simulate --steps 64 --config cli_seeded.json", "CRYSTALWALK_SEED=1234 ");
    CHECK(from_config.output == flagged.output);

    const RunResult flag_wins =
        run("simulate --steps 64 --config cli_seeded.json --seed 42", "CRYSTALWALK_SEED=9 ");
    CHECK(flag_wins.output != flagged.output);
    CHECK(run("simulate --steps 64 --seed 42").output == flag_wins.output);

    const RunResult bad_env = run("simulate --steps 4", "CRYSTALWALK_SEED=elephant ");
    CHECK(bad_env.exit_code == 2);
}

TEST_CASE("verification failures exit with code 1") {
    // Absurdly tight exact tolerance on an asymmetric model: the brute
    // sums and closed forms differ by harmless rounding, which the zero
    // tolerance then rejects.
    write_temp("cli_asym.json",
               R"({"lattice": "ice", "p": 0.37, "alpha": 0.61,
                   "horizontal": [[0.13, 0.29, 0.21], [0.4, 0.13, 0.1]]})");
    const RunResult r = run("verify oracles --config cli_asym.json --exact-eps 0");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("verification FAILED") != std::string::npos);
    std::remove("cli_asym.json");
}

TEST_CASE("verify reports identical bytes across thread counts") {
    const std::string args =
        "verify clt --config builtin:graphite-symmetric --seed 31 --replicates 4000 "
        "--clt-steps 100 ";
    const RunResult one = run(args + "--threads 1 --out cli_rep1.json");
    const RunResult two = run(args + "--threads 2 --out cli_rep2.json");
    CHECK(one.exit_code == two.exit_code);
    CHECK(one.output == two.output);
    std::ifstream in1("cli_rep1.json"), in2("cli_rep2.json");
    std::stringstream b1, b2;
    b1 << in1.rdbuf();
    b2 << in2.rdbuf();
    const auto l1 = lines_of(b1.str()), l2 = lines_of(b2.str());
    REQUIRE(l1.size() == l2.size());
    for (std::size_t k = 0; k < l1.size(); ++k) {
        if (l1[k].find("timestamp") != std::string::npos) continue;
        CHECK(l1[k] == l2[k]);
    }
    std::remove("cli_rep1.json");
    std::remove("cli_rep2.json");
}
