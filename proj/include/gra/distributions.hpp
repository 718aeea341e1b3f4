#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gra/bloch.hpp"

namespace gra {

using CoefficientVector = Eigen::VectorXd;

/// Weights over the alpha grid: nonnegative, summing to one.
class ProbabilityDistribution {
public:
    static constexpr double kSumTolerance = 1e-12;

    /// Validates the weights; throws std::invalid_argument if they are not a distribution.
    explicit ProbabilityDistribution(Eigen::VectorXd p);

    /// Rescales nonnegative weights with positive total mass.
    static ProbabilityDistribution normalized(const Eigen::VectorXd& weights);

    const Eigen::VectorXd& values() const { return p_; }
    std::size_t size() const { return static_cast<std::size_t>(p_.size()); }
    double operator[](std::size_t l) const { return p_(static_cast<Eigen::Index>(l)); }

private:
    Eigen::VectorXd p_;
};

/// Functions on {1..K} stored as columns of a K x n matrix.
struct BasisSet {
    Eigen::MatrixXd functions;
    std::vector<std::size_t> active_set;
    std::vector<std::size_t> candidate_set;

    std::size_t dim() const { return static_cast<std::size_t>(functions.rows()); }
    std::size_t size() const { return static_cast<std::size_t>(functions.cols()); }
};

/// K regularly spaced values spanning [a_min, a_max]. Requires K >= 2 and a_min < a_max.
AlphaGrid alpha_grid(std::size_t K, double a_min, double a_max, double delta);

/// Orthonormal basis obtained from the QR factorization of a seeded Gaussian matrix.
BasisSet random_orthonormal_basis(std::size_t K, std::uint64_t seed);

/// n distributions with i.i.d. uniform(0,1) weights, normalized.
std::vector<ProbabilityDistribution> random_probability_distributions(std::size_t K, std::size_t n,
                                                                      std::uint64_t seed);

/// Euclidean projection onto the probability simplex (sort-based).
ProbabilityDistribution simplex_project(const Eigen::VectorXd& v);

/// sum_j beta_j phi_j over the first beta.size() functions.
Eigen::VectorXd expand(const BasisSet& basis, const CoefficientVector& beta);

/// Inner products <phi_j, v>; the inverse of expand() for orthonormal bases.
CoefficientVector coefficients_of(const BasisSet& basis, const Eigen::VectorXd& v);

/// Equal mixture of two Gaussians centred at -0.1 and +0.1 with width 0.03, sampled on the grid.
ProbabilityDistribution double_peak_distribution(const AlphaGrid& grid);

/// Uniform weight on the strictly positive alphas.
ProbabilityDistribution step_distribution(const AlphaGrid& grid);

/// Point mass at index l.
ProbabilityDistribution point_mass(std::size_t K, std::size_t l);

ProbabilityDistribution uniform_distribution(std::size_t K);

}  // namespace gra
