#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "yardsale/cli.hpp"

using namespace yardsale;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli_main(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("yardsale_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const auto path = dir / "config.json";
    std::ofstream(path) << body;
    return path;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config(const fs::path& dir, const std::string& extra) {
    return R"({"n_agents": 2, "initial": [0.3, 0.7], "fraction": {"kind": "constant", "beta": 0.2}, "seed": 11, "out": ")" +
           (dir / "run").string() + "\"" + extra + "}";
}

}  // namespace

TEST_CASE("simulate writes the trajectory files and nothing to stdout") {
    const auto dir = fresh_dir("simulate");
    const auto cfg = write_config(dir, config(dir, R"(, "p": 0.5, "record_every": 10)"));
    const auto r = run({"simulate", "--config", cfg.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(fs::exists(dir / "run.trajectory.csv"));
    CHECK(fs::exists(dir / "run.record.json"));
    CHECK(slurp(dir / "run.trajectory.csv").rfind("step,max_wealth,norm_sq,ipr,gini,total,last_stake\n", 0) == 0);

    const auto piped = run({"simulate", "--config", cfg.string(), "--stdout"});
    CHECK(piped.code == 0);
    CHECK(piped.out == slurp(dir / "run.trajectory.csv"));
}

TEST_CASE("win-prob on the unbiased two-agent chain") {
    const auto dir = fresh_dir("winprob");
    const auto cfg = write_config(dir, config(dir, R"(, "p": 0.5)"));
    const auto r = run({"win-prob", "--config", cfg.string(), "--trajectories", "2000", "--threads", "2"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "run.win_prob.json"));
    CHECK(doc["passed"] == true);
    const double p0 = doc["win_probabilities"][0]["estimate"].get<double>();
    CHECK(std::abs(p0 - 0.3) <= 3 * std::sqrt(0.3 * 0.7 / 2000));
}

TEST_CASE("config and usage errors exit with 2") {
    const auto dir = fresh_dir("errors");
    auto cfg = write_config(dir, config(dir, R"(, "p": 0.6)"));
    auto r = run({"win-prob", "--config", cfg.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("p = 0.5") != std::string::npos);

    cfg = write_config(dir, config(dir, R"(, "p": 1.0)"));
    r = run({"simulate", "--config", cfg.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 1") != std::string::npos);

    cfg = write_config(dir, config(dir, R"(, "p": 0.5, "lambda": [0.5, 0.5])"));
    CHECK(run({"verify-increment", "--config", cfg.string()}).code == 2);

    CHECK(run({"simulate", "--config", (dir / "missing.json").string()}).code == 2);
    CHECK(run({"simulate"}).code == 2);
    CHECK(run({"teleport", "--config", cfg.string()}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("unwritable output exits with 1") {
    const auto dir = fresh_dir("unwritable");
    fs::create_directories(dir / "run.trajectory.csv");
    const auto cfg = write_config(dir, config(dir, R"(, "p": 0.5, "max_steps": 10)"));
    const auto r = run({"simulate", "--config", cfg.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("run.trajectory.csv") != std::string::npos);
}

TEST_CASE("ensemble output does not depend on the thread count") {
    const auto dir = fresh_dir("threads");
    const auto cfg = write_config(
        dir, R"({"n_agents": 5, "initial": "uniform", "p": 0.6, "seed": 3, "max_steps": 2000, "record_every": 100,
                 "fraction": {"kind": "beta", "a": 2, "b": 5}, "out": ")" + (dir / "one").string() + "\"}");
    REQUIRE(run({"ensemble", "--config", cfg.string(), "--trajectories", "100", "--threads", "1"}).code == 0);
    const std::string one = slurp(dir / "one.summary.json");
    const auto four = run({"ensemble", "--config", cfg.string(), "--trajectories", "100", "--threads", "4", "--stdout"});
    REQUIRE(four.code == 0);
    CHECK(four.out == one);
    const auto reseeded = run({"ensemble", "--config", cfg.string(), "--trajectories", "100", "--seed", "4", "--stdout"});
    CHECK(reseeded.out != one);
    CHECK(nlohmann::json::parse(reseeded.out)["master_seed"] == 4);
}

TEST_CASE("verification subcommands and the condensation grid") {
    const auto dir = fresh_dir("verify");
    const auto cfg = write_config(
        dir, R"({"n_agents": 4, "initial": "uniform", "p": 0.5, "seed": 8, "max_steps": 200000, "out": ")" +
                 (dir / "v").string() + "\"}");
    CHECK(run({"verify-increment", "--config", cfg.string(), "--steps", "50", "--trajectories", "400"}).code == 0);
    CHECK(fs::exists(dir / "v.increment.json"));
    CHECK(run({"verify-summability", "--config", cfg.string(), "--horizon", "2000", "--trajectories", "200"}).code == 0);
    CHECK(fs::exists(dir / "v.summability.json"));
    const auto r = run({"condense-times", "--config", cfg.string(), "--trajectories", "30", "--grid-n", "2,3",
                        "--grid-p", "0.5,0.7", "--grid-epsilon", "1e-3"});
    CHECK(r.code == 0);
    const std::string csv = slurp(dir / "v.condense_times.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(run({"condense-times", "--config", cfg.string(), "--grid-p", "1.2"}).code == 2);
}
