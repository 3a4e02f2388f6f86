#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nmlab/cli.hpp"
#include "nmlab/suite.hpp"

using namespace nmlab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "nmlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("nmlab-cli-" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string write(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("the installed binary maps outcomes to exit codes") {
    const char* bin = std::getenv("NMLAB_BIN");
    if (!bin) {
        MESSAGE("NMLAB_BIN unset; binary checks skipped");
        return;
    }
    auto code = [&](const std::string& args) {
        const int s = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    CHECK(code("verify suite --module sext --trials 20") == kExitOk);
    CHECK(code("verify suite --module nothing") == kExitUsage);
    CHECK(code("no-such-command") == kExitUsage);
    CHECK(code("pa simulate --params " + write("bad.json", "{\n  \"k\": 48,\n  oops\n}") + " --trials 2") == kExitUsage);
}

TEST_CASE("malformed parameter files report their position") {
    const std::string path = write("broken.json", "{\n  \"k\": 48,\n  oops\n}");
    const Run r = run({"pa", "simulate", "--params", path, "--trials", "2"});
    CHECK(r.status == kExitUsage);
    CHECK(r.err.find(path + ":3:") != std::string::npos);
}

TEST_CASE("unknown fields are rejected with the constraint name") {
    const Run preset = run({"params", "preset", "--name", "multisource"});
    REQUIRE(preset.status == kExitOk);
    nlohmann::json j = nlohmann::json::parse(preset.out);
    j["typo"] = 1;
    const Run r = run({"multisource", "run", "--params", write("typo.json", j.dump()), "--trials", "2"});
    CHECK(r.status == kExitUsage);
    CHECK(r.err.find("error: constraint unknown field") != std::string::npos);
}

TEST_CASE("one seed gives byte-identical reports") {
    // The report records its own path, so both runs write the same file.
    const std::string a = (scratch() / "a.json").string();
    REQUIRE(run({"verify", "suite", "--module", "nipm", "--trials", "2", "--seed", "0x2a", "--report", a}).status == kExitOk);
    const std::string first = slurp(a);
    REQUIRE(run({"verify", "suite", "--module", "nipm", "--trials", "2", "--seed", "0x2a", "--report", a}).status == kExitOk);
    CHECK(slurp(a) == first);
    const nlohmann::json rep = nlohmann::json::parse(slurp(a));
    CHECK(rep["schema"] == "nmlab.report/1");
    CHECK(rep["seed"] == 42);
    CHECK(rep["pass"] == true);
    CHECK(rep.contains("config"));
    CHECK(rep.contains("constants"));
    run({"verify", "suite", "--module", "nipm", "--trials", "2", "--seed", "43", "--report", a});
    CHECK(slurp(a) != first);
}

TEST_CASE("a preset evaluates end to end") {
    const std::string params = (scratch() / "micro.json").string();
    REQUIRE(run({"params", "preset", "--name", "nmext-micro", "--out", params}).status == kExitOk);
    const nlohmann::json p = nlohmann::json::parse(slurp(params));
    const std::size_t n = p["n"], d = p["d"];
    const Run r = run({"nmext", "eval", "--params", params, "--x-file", write("x.txt", std::string(n, '1')), "--y-file",
                       write("y.txt", std::string(d, '0'))});
    CHECK(r.status == kExitOk);
    CHECK(r.out.find_first_of("01") != std::string::npos);
    const Run again = run({"nmext", "eval", "--params", params, "--x-file", (scratch() / "x.txt").string(), "--y-file",
                           (scratch() / "y.txt").string()});
    CHECK(again.out == r.out);
    const Run shortx = run({"nmext", "eval", "--params", params, "--x-file", write("s.txt", "1"), "--y-file",
                            (scratch() / "y.txt").string()});
    CHECK(shortx.status == kExitUsage);
}

TEST_CASE("planner commands reject infeasible requests") {
    const Run ok = run({"params", "plan-nipm", "--L", "8", "--ell", "2", "--m", "4000"});
    CHECK(ok.status == kExitOk);
    CHECK(ok.out.find("level") != std::string::npos);
    const Run bad = run({"params", "plan-nipm", "--L", "8", "--ell", "2", "--m", "40"});
    CHECK(bad.status == kExitUsage);
    CHECK(bad.err.find("error: constraint m_1>=8: level 1") != std::string::npos);
    CHECK(run({"params", "plan-nipm", "--L", "8"}).status == kExitUsage);
    CHECK(run({"verify", "suite", "--module", "sext", "--seed", "12x"}).status == kExitUsage);
}

TEST_CASE("csv reports carry the row table") {
    const std::string path = (scratch() / "rows.csv").string();
    REQUIRE(run({"verify", "suite", "--module", "sext", "--trials", "10", "--format", "csv", "--report", path}).status == kExitOk);
    const std::string csv = slurp(path);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header.find("lhl_bound,") != std::string::npos);
    CHECK(csv.front() != '{');
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("csv reports with a row table write one line per row") {
    const std::string path = (scratch() / "nipm.csv").string();
    REQUIRE(run({"verify", "suite", "--module", "nipm", "--trials", "3", "--format", "csv", "--report", path}).status ==
            kExitOk);
    const std::string csv = slurp(path);
    CHECK(csv.rfind("L,bound,case,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("nested csv cells are quoted json") {
    const std::string csv = rows_to_csv(nlohmann::json::array({{{"a", 1}, {"b", {1, 2}}}}));
    CHECK(csv == "a,b\n1,\"[1,2]\"\n");
}
