#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "doctest.h"
#include "kpart/instance.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("kpart_cli_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = kpart::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

json read_json(const fs::path& p)
{
    std::ifstream f(p);
    return json::parse(f);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::ifstream f(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("git blob hash")
{
    CHECK(kpart::cli::git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(kpart::cli::git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("solve matches the enumeration optimum")
{
    const auto dir = fresh_dir("solve");
    fs::create_directories(dir);
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        const auto inst = oracle::random_instance(rng, 7, 2 + trial % 4, -20, 30);
        const auto file = dir / ("inst" + std::to_string(trial) + ".json");
        kpart::write_instance(inst, file);
        const auto r = run({"--out", (dir / "run").string(), "solve", "--instance", file.string()});
        REQUIRE(r.code == 0);
        const auto sol = read_json(dir / "run" / "solution.json");
        CHECK(sol["cost"].get<double>() == doctest::Approx(oracle::optimum(inst)));
        CHECK(sol["clusters"].size() == static_cast<std::size_t>(inst.k()));
        const auto man = read_json(dir / "run" / "manifest.json");
        CHECK(man["status"] == "ok");
        CHECK(man["outputs"].size() == 1);
    }
    fs::remove_all(dir);
}

TEST_CASE("relax: reduced model beats node-cluster on D1 n=10 K=3")
{
    const auto dir = fresh_dir("relax");
    const auto r = run({"--out", dir.string(), "relax", "--n", "10", "--k", "3", "--count", "10", "--seed", "4"});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "relax.csv");
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][3]) > std::stod(rows[1][4]));
    CHECK(fs::exists(dir / "relax.md"));
    fs::remove_all(dir);
}

TEST_CASE("gen, cut and certify outputs and manifest")
{
    const auto dir = fresh_dir("pipeline");
    auto r = run({"--out", (dir / "gen").string(), "gen", "--n", "6:7", "--k", "3", "--count", "3"});
    REQUIRE(r.code == 0);
    auto man = read_json(dir / "gen" / "manifest.json");
    CHECK(man["outputs"].size() == 6);
    for (const auto& p : man["outputs"]) CHECK(fs::exists(p.get<std::string>()));
    CHECK(man["input_hash"].get<std::string>().size() == 40);

    r = run({"--out", (dir / "cut").string(), "cut", "--n", "8", "--k", "2:3", "--count", "4", "--families",
             "general-clique,paw", "--max-rounds", "5"});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "cut" / "cuts.csv");
    CHECK(rows.size() == 5);
    man = read_json(dir / "cut" / "manifest.json");
    CHECK(man["config"]["max_rounds"] == 5);
    CHECK(man["outputs"].size() == 3);

    // same flags, same tables
    const auto again = run({"--out", (dir / "cut2").string(), "cut", "--n", "8", "--k", "2:3", "--count", "4",
                            "--families", "general-clique,paw", "--max-rounds", "5"});
    CHECK(read_csv(dir / "cut2" / "cuts.csv") == rows);

    r = run({"--out", (dir / "cert").string(), "certify", "--n", "6", "--k", "3", "--theorems",
             "edge-bound,two-partition"});
    CHECK(r.code == 0);
    CHECK(r.out.find("total mismatches: 0") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("usage errors exit with 2 and still leave a manifest")
{
    const auto dir = fresh_dir("usage");
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--out", dir.string(), "cut", "--families", "triangle"}).code == 2);
    CHECK(read_json(dir / "manifest.json")["status"] == "usage-error");
    CHECK(run({"--out", dir.string(), "gen", "--n", "9:x"}).code == 2);
    CHECK(run({"--out", dir.string(), "gen", "--regime", "d4"}).code == 2);
    CHECK(run({"--out", dir.string(), "certify", "--n", "6"}).code == 2);
    CHECK(run({"--out", dir.string(), "certify", "--n", "12", "--k", "4"}).code == 2);
    CHECK(run({"--out", dir.string(), "solve", "--instance", (dir / "missing.json").string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("node limit reports a partial run")
{
    const auto dir = fresh_dir("limit");
    const auto r = run({"--out", dir.string(), "solve", "--n", "9", "--k", "4", "--regime", "d2", "--node-limit", "1"});
    CHECK(r.code == 1);
    const auto man = read_json(dir / "manifest.json");
    CHECK(man["status"] == "partial");
    CHECK(fs::exists(dir / "solution.json"));
    fs::remove_all(dir);
}
