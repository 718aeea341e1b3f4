#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gra/bloch.hpp"
#include "gra/distributions.hpp"
#include "gra/greedy.hpp"
#include "gra/ogra.hpp"
#include "gra/reconstruction.hpp"

namespace gra {

/// One ensemble-averaged transverse reading per control.
struct MeasurementSet {
    std::vector<TransverseReading> readings;
    ControlSet controls;
};

/// Reading k = sum_l p_star(l) Y_{u_k, alpha_l}(t_f). Noiseless.
MeasurementSet synthesize_measurements(const ControlSet& controls, const ProbabilityDistribution& p_star,
                                       const AlphaGrid& grid);

/// Adds i.i.d. N(0, sigma^2) to every coordinate. sigma = 0 returns the input unchanged.
MeasurementSet add_measurement_noise(const MeasurementSet& ms, double sigma, std::uint64_t seed);

/// Uniform amplitudes in the admissible box, duration config.t_f.
ControlSet rcc_controls(std::size_t count, const GreedyConfig& config, std::uint64_t seed);
/// Uniform amplitudes and uniform durations in [0, config.t_f].
ControlSet rcct_controls(std::size_t count, const GreedyConfig& config, std::uint64_t seed);

/// Every numeric knob of a design / identification run.
struct ExperimentConfig {
    std::size_t K = 30;
    double alpha_min = -0.2;
    double alpha_max = 0.2;
    double delta = 0.31415926535897931;  // pi / 10
    GreedyConfig greedy;                 // greedy.seed is overwritten from the master seed
    double tol = 1e-14;
    std::size_t K_plus = 60;
    std::size_t n_multistart = 100;
    double radius_factor = 100.0;
    SolverTolerances solver;
    std::uint64_t master_seed = 42;
    std::size_t n_spins = 100000;  ///< metadata only

    AlphaGrid grid() const { return alpha_grid(K, alpha_min, alpha_max, delta); }
    void validate() const;
};

/// Random streams derived from the master seed by fixed offsets.
struct SeedBundle {
    std::uint64_t basis;
    std::uint64_t candidates;
    std::uint64_t optimizer;
    std::uint64_t rcc;
    std::uint64_t rcct;
    std::uint64_t multistart;
    std::uint64_t noise;

    static SeedBundle from_master(std::uint64_t master);
};

struct DesignOutcome {
    ControlSet controls;
    BasisSet basis;  ///< the orthonormal GRA basis (also the head of the OGRA pool)
    std::optional<GreedyTrace> greedy_trace;
    std::optional<OgraResult> ogra;
    double seconds = 0.0;
};

/// Designs the control set for one method under the given configuration.
DesignOutcome design_controls(Method method, const ExperimentConfig& config);

struct BenchmarkRow {
    Method method = Method::gra;
    std::size_t n_controls = 0;
    double min_error = 0.0;
    double condition = 0.0;
    Eigen::VectorXd spectrum;
    Eigen::VectorXd p_f;
    double design_seconds = 0.0;
    double reconstruct_seconds = 0.0;
    std::optional<std::string> failure;
};

struct BenchmarkReport {
    std::string target_name;
    Eigen::VectorXd p_star;
    AlphaGrid grid;
    ExperimentConfig config;
    SeedBundle seeds{};
    std::vector<BenchmarkRow> rows;

    const BenchmarkRow* find(Method m) const;
};

struct Scenario {
    std::string target_name;
    ProbabilityDistribution target;
    std::vector<Method> methods;
    ExperimentConfig config;
};

/// Designs are target-independent; passing a cache lets several scenarios share them.
using DesignCache = std::map<Method, DesignOutcome>;

/// Design, synthesize, reconstruct (multistart) and condition-number analysis per method.
/// A failing method is recorded in its row; the others still run.
BenchmarkReport run_benchmark(const Scenario& scenario, DesignCache* cache = nullptr);

/// Target lookup by name: "double-peak" or "step".
ProbabilityDistribution named_target(const std::string& name, const AlphaGrid& grid);

}  // namespace gra
