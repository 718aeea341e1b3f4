#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gra/bloch.hpp"
#include "gra/distributions.hpp"
#include "gra/gram.hpp"
#include "gra/optimize.hpp"

namespace gra {

enum class Method { gra, grat, ogra, ograt, rcc, rcct };

std::string to_string(Method m);
/// Accepts lower- or upper-case names; throws std::invalid_argument otherwise.
Method parse_method(std::string_view name);
bool optimizes_time(Method m);

struct ControlSet {
    std::vector<ControlPulse> pulses;
    Method method = Method::gra;

    std::size_t size() const { return pulses.size(); }
};

/// Raised when the fitting block is identically zero, i.e. a previous discriminatory step
/// produced no information at all.
class DegenerateBlockError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// h^(k)(beta, u) = sum_l sum_{j<=k} beta_j phi_j(l) Y_{u,alpha_l}, with k = beta.size().
Eigen::Vector2d h_k(const BasisSet& basis, const CoefficientVector& beta, const ControlPulse& pulse,
                    const AlphaGrid& grid);

/// Solves W_{[1:k,1:k]} beta = W_{[1:k,k+1]}; minimum-norm least squares when the block is
/// singular within the spectral floor.
CoefficientVector fitting_step(std::size_t k, const GramMatrix& w_k);

/// ||h^(K)(e_{k+1}, u) - h^(k)(beta, u)||^2 with k = beta.size().
double discriminatory_objective(const BasisSet& basis, const CoefficientVector& beta, const ControlPulse& pulse,
                                const AlphaGrid& grid);

/// Maximizes discriminatory_objective over the admissible controls.
ControlMaximum discriminatory_step(std::size_t k, const CoefficientVector& beta_k, const BasisSet& basis,
                                   const AlphaGrid& grid, const GreedyConfig& config);

/// Per-iteration diagnostics of a greedy run.
struct GreedyIteration {
    std::size_t k = 0;
    CoefficientVector beta;
    double block_min_eigenvalue = 0.0;  ///< of W^k_{[1:k+1,1:k+1]} before the new control
    bool block_singular = false;
    double kernel_residual = 0.0;        ///< ||W^k_{[1:k+1,1:k+1]} v|| / ||W^k||
    double discriminatory_value = 0.0;   ///< <v|W(u_{k+1})_{[1:k+1,1:k+1]}|v>
    double leading_min_eigenvalue = 0.0; ///< of W^{k+1}_{[1:k+1,1:k+1]} after the new control
};

struct GreedyTrace {
    double initial_value = 0.0;
    std::vector<GreedyIteration> iterations;
};

/// GRA: fixed duration config.t_f. Ignores config.optimize_time.
ControlSet run_gra(const BasisSet& basis, const AlphaGrid& grid, const GreedyConfig& config,
                   GreedyTrace* trace = nullptr);

/// GRAt: same loop, optimizing each duration over [0, config.t_f] when config.optimize_time is set.
ControlSet run_grat(const BasisSet& basis, const AlphaGrid& grid, const GreedyConfig& config,
                    GreedyTrace* trace = nullptr);

}  // namespace gra
