#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gra/greedy.hpp"

namespace gra {

struct OgraConfig {
    GreedyConfig greedy;
    double tol = 1e-14;
    std::size_t K_plus = 60;

    void validate(std::size_t K) const;
};

/// A function from the candidate pool, tagged with its position in the original pool.
struct Candidate {
    std::size_t index = 0;
    Eigen::VectorXd phi;
};

enum class StopReason { none, tolerance, exhausted, iteration_cap };
std::string to_string(StopReason r);

struct OgraStep {
    std::size_t iteration = 0;                 ///< 0 is the initialization
    std::optional<std::size_t> chosen_index;   ///< pool index of the maximizing candidate
    double objective = 0.0;
    StopReason stop_reason = StopReason::none;
    double block_min_eigenvalue = 0.0;         ///< of S^T G S after this step (selections only)
};

struct OgraResult {
    ControlSet controls;
    Eigen::MatrixXd selected_basis;            ///< K x card(S), orthonormal columns
    std::vector<std::size_t> selected_indices; ///< pool indices in selection order
    std::vector<OgraStep> trace;
    StopReason stop = StopReason::none;
};

struct CandidateMaximum {
    ControlPulse pulse;
    std::size_t position = 0;  ///< position within the current candidate list
    double value = 0.0;
};

/// h_S(beta, u) = sum_l sum_j beta_j s_j(l) Y_{u,alpha_l}; beta.size() must equal card(S).
Eigen::Vector2d h_S(const Eigen::MatrixXd& selected, const CoefficientVector& beta, const ControlPulse& pulse,
                    const AlphaGrid& grid);

/// Drops candidates whose residual against span(selected) is at most 1e-10 of their norm.
std::vector<Candidate> prune_dependent(const std::vector<Candidate>& pool, const Eigen::MatrixXd& selected);

/// Unconstrained least-squares coefficients of every candidate against S, measured through the
/// responses of the given controls (minimum-norm on singular normal matrices).
std::vector<CoefficientVector> ogra_fitting_sweep(const std::vector<Candidate>& pool, const Eigen::MatrixXd& selected,
                                                  const std::vector<ControlPulse>& controls, const AlphaGrid& grid);

/// Discrepancy r = phi - S beta; the objective for a candidate is ||sum_l r_l Y_l(u)||^2.
Eigen::VectorXd ogra_residual(const Candidate& candidate, const Eigen::MatrixXd& selected,
                              const CoefficientVector& beta);

/// Joint maximum over candidates and controls. Empty pool gives std::nullopt.
std::optional<CandidateMaximum> ogra_discriminatory_step(const std::vector<Candidate>& pool,
                                                         const Eigen::MatrixXd& selected,
                                                         const std::vector<CoefficientVector>& betas,
                                                         const AlphaGrid& grid, const GreedyConfig& config,
                                                         std::uint64_t stream = 0);

/// Appends the normalized Gram-Schmidt residual of phi. Throws std::domain_error if that
/// residual has norm below 1e-12.
Eigen::MatrixXd orthogonalize_into(const Eigen::MatrixXd& selected, const Eigen::VectorXd& phi);

/// OGRA over the candidate pool (columns of `pool`). Time mode follows config.greedy.optimize_time.
OgraResult run_ogra(const Eigen::MatrixXd& pool, const AlphaGrid& grid, const OgraConfig& config);

/// The GRA basis followed by random probability distributions: K + extra columns.
Eigen::MatrixXd ogra_candidate_pool(const BasisSet& basis, std::size_t extra, std::uint64_t seed);

}  // namespace gra
