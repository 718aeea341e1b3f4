#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gra/experiment.hpp"

namespace gra::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kNumericalError = 2 };

/// Bad configuration or unusable input files (exit 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that could not produce a meaningful result (exit 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ExperimentConfig experiment;
    std::optional<Method> method;  ///< design defaults to GRA, benchmark to all six
    std::string target = "double-peak";
    std::optional<std::filesystem::path> out;
    double noise_sigma = 0.0;

    std::filesystem::path out_dir() const { return out.value_or("."); }
};

/// Values given on the command line; each one overrides the config file.
struct Overrides {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<std::string> method;
    std::optional<std::string> target;
};

/// Reads the optional JSON config and applies the overrides. Unknown keys are rejected.
RunConfig resolve_config(const Overrides& overrides);

/// Applies JSON keys onto `config`; throws ConfigError on unknown keys or bad types.
void apply_json(RunConfig& config, const std::string& json_text, const std::string& source = "<config>");

/// A named target or the path of a distribution CSV on the configured grid.
ProbabilityDistribution load_target(const RunConfig& config);

/// FNV-1a over the basis entries, as 16 hex digits.
std::string basis_hash(const BasisSet& basis);

struct MeasureInputs {
    std::filesystem::path controls;
    std::optional<std::filesystem::path> distribution;  ///< falls back to the configured target
};

struct ReconstructInputs {
    std::filesystem::path controls;
    std::filesystem::path measurements;
    std::optional<std::filesystem::path> truth;
};

struct SpectrumInputs {
    std::optional<std::filesystem::path> controls;
    std::optional<std::filesystem::path> matrix;
};

int cmd_design(const RunConfig& config, std::ostream& log);
int cmd_measure(const RunConfig& config, const MeasureInputs& inputs, std::ostream& log);
int cmd_reconstruct(const RunConfig& config, const ReconstructInputs& inputs, std::ostream& log);
int cmd_spectrum(const RunConfig& config, const SpectrumInputs& inputs, std::ostream& log);
int cmd_benchmark(const RunConfig& config, std::ostream& log);
int cmd_validate(const RunConfig& config, std::ostream& log);

/// Aligned plain-text table of a benchmark report.
std::string benchmark_table(const BenchmarkReport& report);
std::string benchmark_json(const BenchmarkReport& report);

/// Runs `body`, printing a one-line diagnostic to `err` and mapping exceptions to exit codes.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace gra::cli
