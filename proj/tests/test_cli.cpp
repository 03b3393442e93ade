#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "vofc_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + VOFC_CLI_PATH + "\" " + args + " > \"" +
                            (scratch() / "stdout.txt").string() + "\" 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string out_dir(const std::string& name) { return (scratch() / name).string(); }

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solve writes a trajectory and echoes the configuration") {
    const auto out = out_dir("solve");
    REQUIRE(run("solve --preset relaxation --a1 0.6 --a2 0.8 --c 2 --h 0.125 --T 4 --svg --out " + out) == 0);
    const auto csv = slurp(fs::path(out) / "trajectory.csv");
    CHECK(csv.rfind("t,y1\n0,1\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 34);
    CHECK(fs::exists(fs::path(out) / "trajectory.svg"));
    const auto cfg = nlohmann::json::parse(slurp(fs::path(out) / "effective_config.json"));
    CHECK(cfg.dump().find("0.125") != std::string::npos);
}

TEST_CASE("flags override the config file") {
    const auto out = out_dir("precedence");
    const auto cfg_path = scratch() / "solve.json";
    std::ofstream(cfg_path) << R"({"solve": {"h": 0.25, "T": 1.0, "name": "fromfile"}})";
    REQUIRE(run("solve --config " + cfg_path.string() + " --T 2 --out " + out) == 0);
    const auto csv = slurp(fs::path(out) / "fromfile.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("invalid parameters exit with 2") {
    CHECK(run("solve --a1 1.5 --out " + out_dir("bad")) == 2);
    CHECK(run("solve --no-such-flag") == 2);
    CHECK(run("table table9 --out " + out_dir("bad")) == 2);
    const auto cfg_path = scratch() / "unknown.json";
    std::ofstream(cfg_path) << R"({"bogus": 1})";
    CHECK(run("solve --config " + cfg_path.string() + " --out " + out_dir("bad")) == 2);
}

TEST_CASE("numerical failure exits with 3") {
    CHECK(run("weights --h 0.25 --N 100000000 --out " + out_dir("infeasible")) == 3);
}

TEST_CASE("weights cache is reused") {
    const auto out = out_dir("weights");
    const std::string args = "weights --a1 0.5 --a2 0.5 --c 1 --h 0.0625 --N 256 --cache-dir " +
                             out_dir("cache") + " --out " + out;
    REQUIRE(run(args) == 0);
    CHECK(slurp(scratch() / "stdout.txt").find("cache miss") != std::string::npos);
    REQUIRE(run(args) == 0);
    CHECK(slurp(scratch() / "stdout.txt").find("cache hit") != std::string::npos);
    CHECK(fs::exists(fs::path(out) / "weights.csv"));
}

TEST_CASE("singularities at one lambda") {
    const auto out = out_dir("sing");
    REQUIRE(run("singularities --a1 0.9 --a2 0.6 --c 1 --lambda 1 --out " + out) == 0);
    CHECK(slurp(fs::path(out) / "singularities.csv").rfind("lambda,re,im,residual\n", 0) == 0);
}

}
