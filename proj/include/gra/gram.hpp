#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "gra/bloch.hpp"
#include "gra/distributions.hpp"

namespace gra {

/// Eigenvalues below this fraction of the largest one are treated as zero.
inline constexpr double kSpectralFloor = 1e-14;

/// Symmetric positive semi-definite matrix W accumulated over a number of controls.
struct GramMatrix {
    Eigen::MatrixXd w;
    std::size_t n_controls = 0;

    std::size_t size() const { return static_cast<std::size_t>(w.rows()); }
};

struct EigenDecomposition {
    Eigen::VectorXd values;   ///< descending
    Eigen::MatrixXd vectors;  ///< column i pairs with values(i)
};

/// gamma_j = sum_l phi_j(l) Y_l, one 2-vector per basis function.
std::vector<Eigen::Vector2d> gamma_vectors(const BasisSet& basis, const std::vector<TransverseReading>& readings);

/// One-control summand W(u) = Gamma^T Gamma in the given basis.
GramMatrix w_single(const BasisSet& basis, const ControlPulse& pulse, const AlphaGrid& grid);

/// Entrywise sum; throws std::invalid_argument on an empty list or mismatched sizes.
GramMatrix w_accumulate(const std::vector<GramMatrix>& terms);

/// W in the canonical (indicator) basis: sum_k Y_k Y_k^T with Y_k the K x 2 response of control k.
GramMatrix canonical_gram(const std::vector<ControlPulse>& pulses, const AlphaGrid& grid);

/// Eigenvalues in descending order.
Eigen::VectorXd spectrum(const GramMatrix& w);
EigenDecomposition eigen_decomposition(const GramMatrix& w);

/// lambda_max / lambda_min, or +inf when lambda_min <= kSpectralFloor * lambda_max.
double condition_number(const GramMatrix& w);

/// Number of eigenvalues above kSpectralFloor * lambda_max.
std::size_t numerical_rank(const GramMatrix& w);

double quadratic_form(const GramMatrix& w, const Eigen::VectorXd& v);

/// Leading k x k block (1 <= k <= K).
GramMatrix upper_left_block(const GramMatrix& w, std::size_t k);

/// First k entries of column k+1 (1-based), i.e. W[0:k, k]. Requires 1 <= k < K.
Eigen::VectorXd column_slice(const GramMatrix& w, std::size_t k);

/// Number of sign changes along a vector; a rough oscillation count for eigenmodes.
std::size_t sign_changes(const Eigen::VectorXd& v, double zero_tol = 1e-12);

}  // namespace gra
