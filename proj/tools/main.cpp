// Command-line front end: loads a JSON scenario suite, runs the requested
// verification scenarios, and writes report.json plus one CSV per scenario.
//
// Exit codes: 0 all scenarios matched their expectation, 1 any mismatch or
// runtime failure, 2 configuration problems (unreadable file, syntax error,
// bad field, malformed override).

#include <cstdint>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "orv/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Liouville scaling-limit verification tool"};

    orv::RunOptions opts;
    std::uint64_t seed = 0;

    app.add_option("-c,--config", opts.config_path, "scenario suite configuration (JSON)")
        ->required();
    app.add_option("-o,--out", opts.out_dir,
                   "output directory for report.json and curve CSVs");
    auto* seed_opt =
        app.add_option("-s,--seed", seed, "override the seed of every scenario");
    app.add_option("-j,--parallel", opts.parallel,
                   "number of scenarios to run concurrently");
    app.add_option("--set", opts.overrides,
                   "path=value override applied to the configuration (repeatable)");
    app.add_flag("-l,--list", opts.list_only, "list scenarios without running them");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (seed_opt->count() > 0) opts.seed = seed;

    try {
        return orv::run_suite(opts, std::cout);
    } catch (const orv::config_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
