#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli/commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = tsmote::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(TSMOTE_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

json error_of(const Result& r) { return json::parse(r.err); }

} // namespace

TEST_CASE("slice on a toy CSV") {
    const auto dir = scratch("slice");
    write(dir / "toy.csv", "sample_id,time,x\na,0,1\na,1,2\na,2,3\nb,3,1\nb,4,2\nb,5,3\n");
    const auto r = run({"slice", "--input", (dir / "toy.csv").string(), "--slices", "3", "--grid-time", "midpoint",
                        "--out-dir", (dir / "out").string()});
    CHECK(r.code == 0);
    const auto grid = json::parse(slurp(dir / "out" / "grid.json"));
    CHECK(grid["boundaries"] == json({0.0, 1.5, 3.5, 5.0}));
    CHECK(fs::exists(dir / "out" / "assignment.csv"));
}

TEST_CASE("usage and validation failures exit 2 with an error document") {
    const auto dir = scratch("errors");
    write(dir / "toy.csv", "sample_id,time,x\na,0,1\na,1,2\n");
    write(dir / "headless.csv", "a,0,1\na,1,2\n");

    auto r = run({"slice", "--input", (dir / "toy.csv").string(), "--slices", "0", "--out-dir", dir.string()});
    CHECK(r.code == 2);
    CHECK(error_of(r)["error"]["kind"] == "config");

    r = run({"slice", "--input", (dir / "headless.csv").string(), "--out-dir", dir.string()});
    CHECK(r.code == 2);
    CHECK(error_of(r)["error"]["kind"] == "parse");
    CHECK(error_of(r)["error"]["message"].get<std::string>().find("missing header") != std::string::npos);

    r = run({"impute", "--input", (dir / "toy.csv").string(), "--out-dir", dir.string()});
    CHECK(r.code == 2); // --seed is required
    CHECK(error_of(r)["error"]["kind"] == "usage");

    r = run({"bogus"});
    CHECK(r.code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("demo writes 450 train and 50 test samples") {
    const auto dir = scratch("demo");
    const auto r = run({"demo-oscillator", "--seed", "3", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    std::ifstream train(dir / "train.csv");
    std::set<std::string> ids;
    std::string line;
    std::getline(train, line);
    while (std::getline(train, line)) ids.insert(line.substr(0, line.find(',')));
    CHECK(ids.size() == 450);
    std::ifstream test(dir / "test.csv");
    std::getline(test, line);
    std::size_t rows = 0;
    while (std::getline(test, line)) ++rows;
    CHECK(rows == 50 * 50);
}

TEST_CASE("impute is byte-for-byte repeatable and the config file loses to flags") {
    const auto dir = scratch("impute");
    REQUIRE(run({"demo-oscillator", "--seed", "1", "--out-dir", dir.string()}).code == 0);
    const std::string input = (dir / "train.csv").string();
    REQUIRE(run({"impute", "--input", input, "--seed", "4", "--slices", "10", "--out-dir", (dir / "a").string()}).code == 0);
    REQUIRE(run({"impute", "--input", input, "--seed", "4", "--slices", "10", "--threads", "3", "--out-dir",
                 (dir / "b").string()}).code == 0);
    CHECK(slurp(dir / "a" / "imputed.csv") == slurp(dir / "b" / "imputed.csv"));
    CHECK(slurp(dir / "a" / "pool.csv") == slurp(dir / "b" / "pool.csv"));

    write(dir / "config.json", R"({"slices": 20, "seed": 9, "method": "slice_mean"})");
    REQUIRE(run({"impute", "--config", (dir / "config.json").string(), "--input", input, "--slices", "12",
                 "--out-dir", (dir / "c").string()}).code == 0);
    const auto grid = json::parse(slurp(dir / "c" / "grid.json"));
    CHECK(grid["n_slices"] == 12);
    CHECK_FALSE(fs::exists(dir / "c" / "pool.csv")); // method came from the file
}

TEST_CASE("impute can reuse a grid from slice") {
    const auto dir = scratch("reuse");
    REQUIRE(run({"demo-oscillator", "--seed", "2", "--out-dir", dir.string()}).code == 0);
    const std::string input = (dir / "train.csv").string();
    REQUIRE(run({"slice", "--input", input, "--slices", "7", "--out-dir", (dir / "s").string()}).code == 0);
    REQUIRE(run({"impute", "--input", input, "--grid", (dir / "s" / "grid.json").string(), "--seed", "1",
                 "--out-dir", (dir / "i").string()}).code == 0);
    CHECK(slurp(dir / "s" / "grid.json") == slurp(dir / "i" / "grid.json"));
}

TEST_CASE("compare-imputers gives a three-row table") {
    const auto dir = scratch("compare");
    const auto r = run({"compare-imputers", "--seed", "1", "--repetitions", "1", "--slices", "20", "--window", "7",
                        "--order", "3", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "comparison.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("method,accuracy,auc", 0) == 0);
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}
