#include "gra/ogra.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gra/parallel.hpp"

namespace gra {

namespace {

constexpr double kDependenceThreshold = 1e-10;
constexpr double kOrthogonalizationFloor = 1e-12;
constexpr std::uint64_t kStreamStride = 1u << 20;

Eigen::VectorXd solve_min_norm(const Eigen::MatrixXd& normal, const Eigen::VectorXd& rhs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
    const Eigen::VectorXd& values = eig.eigenvalues();
    const double top = values.size() > 0 ? values.maxCoeff() : 0.0;
    if (!(top > 0.0)) {
        return Eigen::VectorXd::Zero(rhs.size());
    }
    const double floor = kSpectralFloor * top;
    Eigen::VectorXd inverse = Eigen::VectorXd::Zero(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) > floor) {
            inverse(i) = 1.0 / values(i);
        }
    }
    const Eigen::MatrixXd& q = eig.eigenvectors();
    return q * (inverse.asDiagonal() * (q.transpose() * rhs));
}

Eigen::VectorXd residual_against(const Eigen::MatrixXd& selected, const Eigen::VectorXd& phi) {
    Eigen::VectorXd r = phi;
    if (selected.cols() == 0) {
        return r;
    }
    // Two passes keep the residual orthogonal to working precision.
    for (int pass = 0; pass < 2; ++pass) {
        r -= selected * (selected.transpose() * r);
    }
    return r;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

}  // namespace

void OgraConfig::validate(std::size_t K) const {
    greedy.validate();
    if (!(tol >= 0.0)) {
        throw std::invalid_argument("ogra: tol must be nonnegative");
    }
    if (K_plus < K) {
        throw std::invalid_argument("ogra: K_plus must be at least K");
    }
}

std::string to_string(StopReason r) {
    switch (r) {
    case StopReason::none: return "none";
    case StopReason::tolerance: return "tolerance";
    case StopReason::exhausted: return "exhausted";
    case StopReason::iteration_cap: return "iteration_cap";
    }
    return "?";
}

Eigen::Vector2d h_S(const Eigen::MatrixXd& selected, const CoefficientVector& beta, const ControlPulse& pulse,
                    const AlphaGrid& grid) {
    if (beta.size() != selected.cols() || static_cast<std::size_t>(selected.rows()) != grid.size()) {
        throw std::invalid_argument("h_S: coefficient/selection/grid size mismatch");
    }
    return response_matrix(pulse, grid).transpose() * (selected * beta);
}

std::vector<Candidate> prune_dependent(const std::vector<Candidate>& pool, const Eigen::MatrixXd& selected) {
    std::vector<Candidate> kept;
    kept.reserve(pool.size());
    for (const Candidate& c : pool) {
        const double norm = c.phi.norm();
        if (norm == 0.0) {
            continue;
        }
        if (residual_against(selected, c.phi).norm() > kDependenceThreshold * norm) {
            kept.push_back(c);
        }
    }
    return kept;
}

std::vector<CoefficientVector> ogra_fitting_sweep(const std::vector<Candidate>& pool, const Eigen::MatrixXd& selected,
                                                  const std::vector<ControlPulse>& controls, const AlphaGrid& grid) {
    if (controls.empty()) {
        throw std::invalid_argument("ogra_fitting_sweep: no controls");
    }
    const Eigen::MatrixXd gram = canonical_gram(controls, grid).w;
    const Eigen::MatrixXd gs = gram * selected;
    const Eigen::MatrixXd normal = selected.transpose() * gs;
    std::vector<CoefficientVector> betas;
    betas.reserve(pool.size());
    for (const Candidate& c : pool) {
        betas.push_back(solve_min_norm(normal, gs.transpose() * c.phi));
    }
    return betas;
}

Eigen::VectorXd ogra_residual(const Candidate& candidate, const Eigen::MatrixXd& selected,
                              const CoefficientVector& beta) {
    return candidate.phi - selected * beta;
}

std::optional<CandidateMaximum> ogra_discriminatory_step(const std::vector<Candidate>& pool,
                                                         const Eigen::MatrixXd& selected,
                                                         const std::vector<CoefficientVector>& betas,
                                                         const AlphaGrid& grid, const GreedyConfig& config,
                                                         std::uint64_t stream) {
    if (pool.empty()) {
        return std::nullopt;
    }
    if (betas.size() != pool.size()) {
        throw std::invalid_argument("ogra_discriminatory_step: one coefficient vector per candidate required");
    }
    std::vector<ControlMaximum> per_candidate(pool.size());
    parallel_for(pool.size(), [&](std::size_t i) {
        const Eigen::VectorXd direction = ogra_residual(pool[i], selected, betas[i]);
        per_candidate[i] = maximize_over_controls(
            [&](const ControlPulse& u) { return response_energy(direction, u, grid); }, config,
            stream * kStreamStride + pool[i].index);
    });
    CandidateMaximum best{per_candidate[0].pulse, 0, per_candidate[0].value};
    for (std::size_t i = 1; i < per_candidate.size(); ++i) {
        if (per_candidate[i].value > best.value) {
            best = {per_candidate[i].pulse, i, per_candidate[i].value};
        }
    }
    return best;
}

Eigen::MatrixXd orthogonalize_into(const Eigen::MatrixXd& selected, const Eigen::VectorXd& phi) {
    const Eigen::VectorXd r = residual_against(selected, phi);
    const double norm = r.norm();
    if (norm < kOrthogonalizationFloor) {
        throw std::domain_error("orthogonalize_into: function lies in the span of the selected set");
    }
    Eigen::MatrixXd out(phi.size(), selected.cols() + 1);
    out.leftCols(selected.cols()) = selected;
    out.col(selected.cols()) = r / norm;
    return out;
}

Eigen::MatrixXd ogra_candidate_pool(const BasisSet& basis, std::size_t extra, std::uint64_t seed) {
    Eigen::MatrixXd pool(basis.functions.rows(), basis.functions.cols() + static_cast<Eigen::Index>(extra));
    pool.leftCols(basis.functions.cols()) = basis.functions;
    if (extra > 0) {
        const auto dists = random_probability_distributions(basis.dim(), extra, seed);
        for (std::size_t i = 0; i < extra; ++i) {
            pool.col(basis.functions.cols() + static_cast<Eigen::Index>(i)) = dists[i].values();
        }
    }
    return pool;
}

OgraResult run_ogra(const Eigen::MatrixXd& pool_matrix, const AlphaGrid& grid, const OgraConfig& config) {
    const std::size_t K = grid.size();
    if (static_cast<std::size_t>(pool_matrix.rows()) != K || pool_matrix.cols() == 0) {
        throw std::invalid_argument("run_ogra: pool must have one row per grid point");
    }
    config.validate(K);
    const GreedyConfig& greedy = config.greedy;

    OgraResult result;
    result.controls.method = greedy.optimize_time ? Method::ograt : Method::ogra;

    std::vector<Candidate> pool;
    pool.reserve(static_cast<std::size_t>(pool_matrix.cols()));
    for (Eigen::Index n = 0; n < pool_matrix.cols(); ++n) {
        pool.push_back({static_cast<std::size_t>(n), pool_matrix.col(n)});
    }

    // Initialization: best single candidate and control, with S empty.
    const Eigen::MatrixXd empty(static_cast<Eigen::Index>(K), 0);
    const std::vector<CoefficientVector> zero_betas(pool.size(), CoefficientVector(0));
    const auto init = ogra_discriminatory_step(pool, empty, zero_betas, grid, greedy, 0);
    const Candidate first = pool[init->position];
    result.controls.pulses.push_back(init->pulse);
    result.selected_basis = orthogonalize_into(empty, first.phi);
    result.selected_indices.push_back(first.index);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(init->position));

    auto block_min = [&] {
        const Eigen::MatrixXd g = canonical_gram(result.controls.pulses, grid).w;
        return min_eigenvalue(result.selected_basis.transpose() * g * result.selected_basis);
    };

    result.trace.push_back({0, first.index, init->value, StopReason::none, block_min()});
    if (init->value < config.tol) {
        result.trace.back().stop_reason = StopReason::tolerance;
        result.stop = StopReason::tolerance;
        return result;
    }

    std::size_t k = 1;
    while (k <= K - 1) {
        pool = prune_dependent(pool, result.selected_basis);
        const auto betas = ogra_fitting_sweep(pool, result.selected_basis, result.controls.pulses, grid);
        const auto best = ogra_discriminatory_step(pool, result.selected_basis, betas, grid, greedy, k);
        if (!best) {
            result.trace.push_back({k, std::nullopt, 0.0, StopReason::exhausted, 0.0});
            result.stop = StopReason::exhausted;
            return result;
        }
        const Candidate chosen = pool[best->position];
        if (best->value < config.tol) {
            result.trace.push_back({k, chosen.index, best->value, StopReason::tolerance, 0.0});
            result.stop = StopReason::tolerance;
            return result;
        }
        result.controls.pulses.push_back(best->pulse);
        result.selected_basis = orthogonalize_into(result.selected_basis, chosen.phi);
        result.selected_indices.push_back(chosen.index);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best->position));
        result.trace.push_back({k, chosen.index, best->value, StopReason::none, block_min()});
        ++k;
    }
    result.trace.push_back(
        {k, std::nullopt, std::numeric_limits<double>::quiet_NaN(), StopReason::iteration_cap, 0.0});
    result.stop = StopReason::iteration_cap;
    return result;
}

}  // namespace gra
