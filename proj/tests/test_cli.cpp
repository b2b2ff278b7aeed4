#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "chanfront/channel.hpp"
#include "chanfront/cli.hpp"

using namespace chanfront;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {
int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"chanfront"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}
} // namespace

TEST_CASE("generate writes a valid, reproducible channel file") {
    CHECK(run({"generate", "--seed", "7", "--cells", "12", "--out", "cli_shape_a.json"}) == 0);
    CHECK(run({"generate", "--seed", "7", "--cells", "12", "--out", "cli_shape_b.json"}) == 0);
    auto a = slurp("cli_shape_a.json");
    CHECK(a == slurp("cli_shape_b.json"));
    auto shape = load_channel("cli_shape_a.json");
    CHECK(validate(shape).empty());
    CHECK(shape.n_cells() == 12);
    std::remove("cli_shape_a.json");
    std::remove("cli_shape_b.json");
}

TEST_CASE("speed on a flat channel pins the Brownian value") {
    CHECK(run({"generate", "--flat", "--cells", "700", "--out", "cli_flat.json"}) == 0);
    CHECK(run({"speed", "--shape", "cli_flat.json", "--cells", "280", "--fprime", "1.0", "--out",
               "cli_speeds.csv"}) == 0);
    std::string csv = slurp("cli_speeds.csv");
    auto pos = csv.find('\n');
    double cplus = 0, cminus = 0;
    std::sscanf(csv.c_str() + pos + 1, "%lf,%lf", &cplus, &cminus);
    CHECK(std::abs(cplus - std::sqrt(2.0)) < 1e-3);
    CHECK(std::abs(cminus + std::sqrt(2.0)) < 1e-3);
    std::remove("cli_flat.json");
    std::remove("cli_speeds.csv");
}

TEST_CASE("graph and mu subcommands write their artifacts") {
    CHECK(run({"generate", "--seed", "9", "--cells", "90", "--out", "cli_g.json"}) == 0);
    CHECK(run({"graph", "--shape", "cli_g.json", "--out-dir", "cli_graph_out"}) == 0);
    CHECK(fs::exists("cli_graph_out/edges.csv"));
    CHECK(fs::exists("cli_graph_out/manifest.json"));
    CHECK(run({"mu", "--shape", "cli_g.json", "--cells", "30", "--grid-points", "6",
               "--lambda-min", "-2", "--lambda-max", "-0.1", "--out", "cli_mu.csv"}) == 0);
    std::string mu = slurp("cli_mu.csv");
    CHECK(mu.find("lambda,mu,se") == 0);
    fs::remove_all("cli_graph_out");
    std::remove("cli_g.json");
    std::remove("cli_mu.csv");
}

TEST_CASE("usage errors exit with code 2, runtime errors with 1") {
    CHECK(run({"--no-such-flag"}) == 2);
    CHECK(run({"mu"}) == 2); // missing required --shape
    CHECK(run({"mu", "--shape", "does_not_exist.json", "--out", "x.csv"}) == 1);
}

TEST_CASE("print-config") { CHECK(run({"--print-config"}) == 0); }

TEST_SUITE_END();
