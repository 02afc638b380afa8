// config.hpp — experiment configuration: strict JSON parsing with
// path-anchored errors, process-spec (de)serialization, and the experiment
// runner shared by the CLI and the tests.

#pragma once

#include "fuzzproc/equilibration_bounds.hpp"
#include "fuzzproc/montecarlo.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fuzzproc {

// Schema violation; `where` is a JSON-pointer-style location like
// "$.spec.steps[0].distribution".
struct ConfigError : std::runtime_error {
    std::string where;
    ConfigError(std::string loc, const std::string& what)
        : std::runtime_error("at " + loc + ": " + what), where(std::move(loc)) {}
};

enum class ExperimentKind { SingleTime, MultiTime, Sweep, MonteCarlo, ChoiCheck };

std::string kindName(ExperimentKind k);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::MultiTime;
    std::uint64_t seed = 0;
    std::string output;   // artifact basename (default derived from kind)
    nlohmann::json raw;   // full validated document
};

// Strict parse: every field checked, unknown fields rejected. Throws
// ConfigError. Deep-validates spec sections by resolving them with seed 0.
ExperimentConfig parseExperimentConfig(const nlohmann::json& doc);
ExperimentConfig loadExperimentConfig(const std::filesystem::path& path);

// Resolves a "spec" JSON object (preset or explicit) into a concrete process
// spec. Random ingredients are deterministic in `seed` mixed with any local
// seed fields.
ProcessSpec processSpecFromJson(const nlohmann::json& j, const std::string& where,
                                std::uint64_t seed);

// Explicit-form serialization (Kraus operators as nested re/im arrays);
// processSpecFromJson on the result reproduces the spec exactly.
nlohmann::json processSpecToJson(const ProcessSpec& spec);

nlohmann::json boundReportToJson(const BoundReport& report);
nlohmann::json mcEstimateToJson(const McEstimate& est, const std::string& quantity);

// Human-readable schema document for `fuzzproc schema`.
std::string configSchemaText();

struct RunOptions {
    std::filesystem::path outDir = ".";
    std::optional<std::uint64_t> seed;  // overrides config seed
    int jobs = 1;
    bool verbose = false;
    long long maxChoiDim = 65536;
};

struct RunResult {
    int status = 0;  // 0 ok, 3 inequality violation (2 is reserved for schema errors)
    std::vector<std::filesystem::path> files;
    std::string message;
};

RunResult runExperiment(const ExperimentConfig& config, const RunOptions& options);

}  // namespace fuzzproc
