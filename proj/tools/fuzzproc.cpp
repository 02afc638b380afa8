// fuzzproc — experiment driver: JSON configs in, CSV/JSON artifacts out.

#include "fuzzproc/config.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

long long choiDimFromEnv(long long fallback) {
    const char* env = std::getenv("FUZZPROC_MAX_CHOI_DIM");
    if (!env || !*env) return fallback;
    try {
        const long long v = std::stoll(env);
        if (v < 1) throw std::invalid_argument("non-positive");
        return v;
    } catch (const std::exception&) {
        std::cerr << "fuzzproc: ignoring invalid FUZZPROC_MAX_CHOI_DIM='" << env
                  << "'\n";
        return fallback;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibration laboratory for multi-time quantum processes "
                 "under finite temporal resolution"};
    app.require_subcommand(1);

    std::string configPath;
    fuzzproc::RunOptions options;
    long long seedFlag = -1;

    auto* run = app.add_subcommand("run", "Execute an experiment config");
    run->add_option("config", configPath, "JSON config file")->required();
    std::string outDir = ".";
    run->add_option("--out", outDir, "Output directory (default: current)");
    run->add_option("--seed", seedFlag, "Override the config seed");
    run->add_option("--jobs", options.jobs, "Parallel workers for sweeps")
        ->check(CLI::Range(1, 256));
    run->add_flag("--verbose", options.verbose, "Print progress details");

    auto* validate = app.add_subcommand("validate", "Check a config against the schema");
    validate->add_option("config", configPath, "JSON config file")->required();

    auto* schema = app.add_subcommand("schema", "Print the config schema");

    CLI11_PARSE(app, argc, argv);

    if (schema->parsed()) {
        std::cout << fuzzproc::configSchemaText();
        return 0;
    }

    fuzzproc::ExperimentConfig config;
    try {
        config = fuzzproc::loadExperimentConfig(configPath);
    } catch (const fuzzproc::ConfigError& e) {
        std::cerr << "fuzzproc: config error " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fuzzproc: " << e.what() << "\n";
        return 2;
    }

    if (validate->parsed()) {
        std::cout << "ok: " << configPath << " (kind "
                  << fuzzproc::kindName(config.kind) << ")\n";
        return 0;
    }

    options.outDir = outDir;
    if (seedFlag >= 0) options.seed = static_cast<std::uint64_t>(seedFlag);
    options.maxChoiDim = choiDimFromEnv(options.maxChoiDim);

    fuzzproc::RunResult result;
    try {
        result = fuzzproc::runExperiment(config, options);
    } catch (const fuzzproc::ConfigError& e) {
        std::cerr << "fuzzproc: config error " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fuzzproc: " << e.what() << "\n";
        return 1;
    }

    if (options.verbose || result.status != 0) {
        for (const auto& f : result.files) std::cerr << "wrote " << f.string() << "\n";
    }
    if (!result.message.empty())
        (result.status == 0 ? std::cout : std::cerr) << result.message << "\n";
    return result.status;
}
