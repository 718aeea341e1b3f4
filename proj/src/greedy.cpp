#include "gra/greedy.hpp"

#include <algorithm>
#include <cctype>

#include <Eigen/Eigenvalues>

namespace gra {

std::string to_string(Method m) {
    switch (m) {
    case Method::gra: return "GRA";
    case Method::grat: return "GRAt";
    case Method::ogra: return "OGRA";
    case Method::ograt: return "OGRAt";
    case Method::rcc: return "RCC";
    case Method::rcct: return "RCCt";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "gra") return Method::gra;
    if (lower == "grat") return Method::grat;
    if (lower == "ogra") return Method::ogra;
    if (lower == "ograt") return Method::ograt;
    if (lower == "rcc") return Method::rcc;
    if (lower == "rcct") return Method::rcct;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

bool optimizes_time(Method m) {
    return m == Method::grat || m == Method::ograt || m == Method::rcct;
}

Eigen::Vector2d h_k(const BasisSet& basis, const CoefficientVector& beta, const ControlPulse& pulse,
                    const AlphaGrid& grid) {
    if (static_cast<std::size_t>(beta.size()) > basis.size() || basis.dim() != grid.size()) {
        throw std::invalid_argument("h_k: coefficient/basis/grid size mismatch");
    }
    const Eigen::VectorXd direction = expand(basis, beta);
    return response_matrix(pulse, grid).transpose() * direction;
}

CoefficientVector fitting_step(std::size_t k, const GramMatrix& w_k) {
    if (k == 0 || k >= w_k.size()) {
        throw std::out_of_range("fitting_step: k outside [1, K-1]");
    }
    const GramMatrix block = upper_left_block(w_k, k);
    const Eigen::VectorXd rhs = column_slice(w_k, k);
    if (block.w.cwiseAbs().maxCoeff() == 0.0) {
        throw DegenerateBlockError("fitting_step: leading block is identically zero");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block.w);
    const Eigen::VectorXd& values = eig.eigenvalues();
    const double floor = kSpectralFloor * values.maxCoeff();
    if (values.minCoeff() > floor) {
        return block.w.llt().solve(rhs);
    }
    // Pseudo-inverse restricted to the numerically nonzero spectrum.
    Eigen::VectorXd inverse = Eigen::VectorXd::Zero(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) > floor) {
            inverse(i) = 1.0 / values(i);
        }
    }
    const Eigen::MatrixXd& q = eig.eigenvectors();
    return q * (inverse.asDiagonal() * (q.transpose() * rhs));
}

namespace {

// Canonical-basis direction phi_{k+1} - sum_{j<=k} beta_j phi_j.
Eigen::VectorXd discrepancy_direction(const BasisSet& basis, const CoefficientVector& beta) {
    const auto k = beta.size();
    if (static_cast<std::size_t>(k) >= basis.size()) {
        throw std::invalid_argument("discriminatory step: need k < basis size");
    }
    return basis.functions.col(k) - basis.functions.leftCols(k) * beta;
}

ControlSet run_greedy(const BasisSet& basis, const AlphaGrid& grid, const GreedyConfig& config, Method method,
                      GreedyTrace* trace) {
    config.validate();
    const std::size_t K = basis.size();
    if (K == 0 || basis.dim() != grid.size()) {
        throw std::invalid_argument("greedy: basis must have one row per grid point");
    }
    const Eigen::MatrixXd& phi = basis.functions;

    ControlSet out;
    out.method = method;

    const Eigen::VectorXd first = phi.col(0);
    const ControlMaximum init = maximize_over_controls(
        [&](const ControlPulse& u) { return response_energy(first, u, grid); }, config, 0);
    out.pulses.push_back(init.pulse);
    if (trace != nullptr) {
        trace->initial_value = init.value;
        trace->iterations.clear();
    }

    // Accumulated canonical Gram matrix; W^k in the basis is phi^T G phi.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(phi.rows(), phi.rows());
    auto add_control = [&](const ControlPulse& pulse) {
        const Eigen::MatrixX2d y = response_matrix(pulse, grid);
        gram.noalias() += y * y.transpose();
    };
    add_control(init.pulse);

    for (std::size_t k = 1; k <= K - 1; ++k) {
        GramMatrix w_k{phi.transpose() * gram * phi, k};
        const CoefficientVector beta = fitting_step(k, w_k);
        const ControlMaximum disc = discriminatory_step(k, beta, basis, grid, config);
        out.pulses.push_back(disc.pulse);
        add_control(disc.pulse);

        if (trace != nullptr) {
            GreedyIteration it;
            it.k = k;
            it.beta = beta;
            const GramMatrix block = upper_left_block(w_k, k + 1);
            const Eigen::VectorXd values = spectrum(block);
            it.block_min_eigenvalue = values(values.size() - 1);
            it.block_singular = it.block_min_eigenvalue <= kSpectralFloor * values(0);
            Eigen::VectorXd v(static_cast<Eigen::Index>(k + 1));
            v.head(static_cast<Eigen::Index>(k)) = beta;
            v(static_cast<Eigen::Index>(k)) = -1.0;
            const double scale = w_k.w.norm();
            it.kernel_residual = scale > 0.0 ? (block.w * v).norm() / scale : 0.0;
            const GramMatrix single = upper_left_block(w_single(basis, disc.pulse, grid), k + 1);
            it.discriminatory_value = quadratic_form(single, v);
            const GramMatrix next{phi.transpose() * gram * phi, k + 1};
            const Eigen::VectorXd after = spectrum(upper_left_block(next, k + 1));
            it.leading_min_eigenvalue = after(after.size() - 1);
            trace->iterations.push_back(std::move(it));
        }
    }
    return out;
}

}  // namespace

double discriminatory_objective(const BasisSet& basis, const CoefficientVector& beta, const ControlPulse& pulse,
                                const AlphaGrid& grid) {
    return response_energy(discrepancy_direction(basis, beta), pulse, grid);
}

ControlMaximum discriminatory_step(std::size_t k, const CoefficientVector& beta_k, const BasisSet& basis,
                                   const AlphaGrid& grid, const GreedyConfig& config) {
    if (static_cast<std::size_t>(beta_k.size()) != k) {
        throw std::invalid_argument("discriminatory_step: beta length must equal k");
    }
    const Eigen::VectorXd direction = discrepancy_direction(basis, beta_k);
    return maximize_over_controls([&](const ControlPulse& u) { return response_energy(direction, u, grid); },
                                  config, k);
}

ControlSet run_gra(const BasisSet& basis, const AlphaGrid& grid, const GreedyConfig& config, GreedyTrace* trace) {
    GreedyConfig fixed = config;
    fixed.optimize_time = false;
    return run_greedy(basis, grid, fixed, Method::gra, trace);
}

ControlSet run_grat(const BasisSet& basis, const AlphaGrid& grid, const GreedyConfig& config, GreedyTrace* trace) {
    return run_greedy(basis, grid, config, config.optimize_time ? Method::grat : Method::gra, trace);
}

}  // namespace gra
