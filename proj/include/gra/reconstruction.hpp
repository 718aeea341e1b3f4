#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gra/bloch.hpp"
#include "gra/distributions.hpp"

namespace gra {

struct ControlSet;
struct MeasurementSet;

/// Stacked linear model: rows 2k and 2k+1 hold the x and y responses of control k,
/// column l the spin group alpha_l.
struct IdentificationProblem {
    Eigen::MatrixXd design;
    Eigen::VectorXd targets;

    std::size_t n_controls() const { return static_cast<std::size_t>(design.rows() / 2); }
    std::size_t dim() const { return static_cast<std::size_t>(design.cols()); }
};

struct SolverTolerances {
    double relative_decrease = 1e-12;
    std::size_t max_iterations = 50000;
};

struct ReconstructionResult {
    ProbabilityDistribution p_f;
    double objective = 0.0;
    std::size_t n_iterations = 0;
    bool converged = false;
};

struct MultistartResult {
    ReconstructionResult best;
    double min_relative_error = 0.0;
    std::vector<ReconstructionResult> runs;  ///< in start order
    std::vector<double> errors;
};

/// Throws std::invalid_argument when the reading count differs from the control count.
IdentificationProblem build_problem(const ControlSet& controls, const AlphaGrid& grid,
                                    const MeasurementSet& measurements);

/// sum_k ||Y_exp_k - sum_l p_l Y_{k,l}||^2
double identification_objective(const IdentificationProblem& problem, const Eigen::VectorXd& p);

/// Accelerated projected gradient on the simplex with function-value restart.
/// The accepted objective sequence is non-increasing.
ReconstructionResult solve_identification(const IdentificationProblem& problem, const Eigen::VectorXd& init,
                                          const SolverTolerances& tolerances = {});

/// Starts drawn uniformly from the cube centred at p_star_ref with half-width
/// radius_factor * ||p_star_ref||, projected onto the simplex. Keeps the run with the
/// smallest relative error to p_star_ref.
MultistartResult multistart_identify(const IdentificationProblem& problem, const ProbabilityDistribution& p_star_ref,
                                     std::size_t n_starts, double radius_factor, std::uint64_t seed,
                                     const SolverTolerances& tolerances = {});

/// ||p_star - p_f|| / ||p_star||; throws std::domain_error for a zero reference.
double relative_error(const Eigen::VectorXd& p_star, const Eigen::VectorXd& p_f);

}  // namespace gra
