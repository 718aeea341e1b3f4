#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gra/bloch.hpp"

namespace gra {

/// Outcome of one self-check.
struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      ///< measured worst case
    double threshold = 0.0;  ///< pass when value <= threshold (or the check's own rule)
    std::string detail;
};

using GeneratorFn = std::function<Eigen::Matrix3d(const ControlPulse&, double, double)>;

struct ValidationOptions {
    std::uint64_t seed = 42;
    std::size_t samples = 20;
    /// Generator under test for the structural dynamics checks; defaults to gra::generator.
    GeneratorFn generator;
};

/// Oracle and identity checks on the numerical core (propagator, W, greedy steps,
/// simplex projection, reconstruction). Cheap enough to run from the CLI.
std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace gra
