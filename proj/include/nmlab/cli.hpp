#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

namespace nmlab {

// Exit statuses: 0 every asserted bound held, 1 a bound failed, 2 bad input.
enum ExitStatus : int { kExitOk = 0, kExitFail = 1, kExitUsage = 2 };

struct RunConfig {
    std::string command;      // "verify suite", "pa simulate", ...
    std::string params_path;
    std::uint64_t seed = 1;
    std::size_t trials = 0;   // 0: the command's default
    std::string output_path;  // report destination; empty writes nothing
    std::string format = "json";
    // Command-specific flags, by long name.
    std::map<std::string, std::string> options;

    nlohmann::json to_json() const;
};

struct RunResult {
    int status = kExitOk;
    nlohmann::json report;   // null for commands that only print
    std::string stdout_text;
    std::string stderr_text;
};

// Runs one command. Throws on invalid input; cli_main maps that to exit 2.
RunResult execute(const RunConfig& config);

// Parses argv, runs, writes the report and returns the exit status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nmlab
