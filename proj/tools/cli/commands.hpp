#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lindyn/serialize.hpp"

namespace lindyn::cli {

using io::json;

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"universality", "luh-build",   "orbit-probe", "dense-approx",
                                                "cosine-check", "cosine-demo", "example-5-7"};
    return names;
}

enum ExitCode : int { kOk = 0, kFail = 1, kInputError = 2 };

struct Artifacts {
    json report;                                              // schema-versioned envelope
    std::vector<std::pair<std::string, std::string>> files;   // file name -> contents
    std::string summary;
    int exit_code{kOk};
};

// Runs one command on its parameter block.  Input problems throw io::ConfigError; anything
// else thrown is a module failure.  Relative file paths resolve against base_dir.
Artifacts execute(const std::string& command, const json& block, std::uint64_t seed, const std::string& base_dir = ".");

struct Options {
    std::string command;      // may be empty when the config names it
    std::string config_path;
    std::string out_dir{"."};
    std::optional<std::uint64_t> seed;
    bool quiet{false};
};

// Reads the config, dispatches, writes artifacts; returns the process exit code.
int run(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace lindyn::cli
