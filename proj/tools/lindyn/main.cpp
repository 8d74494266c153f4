#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace lindyn::cli;
    CLI::App app{"Numerical experiments on universal functions and cosine operator functions"};
    Options opts;
    std::string commands;
    for (const auto& c : command_names()) commands += (commands.empty() ? "" : ", ") + c;
    app.add_option("command", opts.command, "One of: " + commands + " (default: the config's \"command\")");
    app.add_option("--config", opts.config_path, "JSON experiment config");
    app.add_option("--out", opts.out_dir, "Output directory for the JSON report and CSV files")->capture_default_str();
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized inputs (overrides the config)");
    app.add_flag("--quiet", opts.quiet, "Suppress the summary");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }
    if (seed_opt->count()) opts.seed = seed;
    return run(opts, std::cout, std::cerr);
}
