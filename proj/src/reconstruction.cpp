#include "gra/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "gra/experiment.hpp"
#include "gra/parallel.hpp"

namespace gra {

IdentificationProblem build_problem(const ControlSet& controls, const AlphaGrid& grid,
                                    const MeasurementSet& measurements) {
    if (measurements.readings.size() != controls.size()) {
        throw std::invalid_argument("build_problem: " + std::to_string(measurements.readings.size()) +
                                    " readings for " + std::to_string(controls.size()) + " controls");
    }
    const auto rows = static_cast<Eigen::Index>(2 * controls.size());
    IdentificationProblem problem;
    problem.design.resize(rows, static_cast<Eigen::Index>(grid.size()));
    problem.targets.resize(rows);
    for (std::size_t k = 0; k < controls.size(); ++k) {
        const Eigen::MatrixX2d y = response_matrix(controls.pulses[k], grid);
        const auto r = static_cast<Eigen::Index>(2 * k);
        problem.design.row(r) = y.col(0).transpose();
        problem.design.row(r + 1) = y.col(1).transpose();
        problem.targets(r) = measurements.readings[k].x();
        problem.targets(r + 1) = measurements.readings[k].y();
    }
    return problem;
}

double identification_objective(const IdentificationProblem& problem, const Eigen::VectorXd& p) {
    return (problem.design * p - problem.targets).squaredNorm();
}

ReconstructionResult solve_identification(const IdentificationProblem& problem, const Eigen::VectorXd& init,
                                          const SolverTolerances& tolerances) {
    if (init.size() != problem.design.cols()) {
        throw std::invalid_argument("solve_identification: initial vector has wrong length");
    }
    const Eigen::MatrixXd& a = problem.design;
    const Eigen::VectorXd& b = problem.targets;

    Eigen::VectorXd x = simplex_project(init).values();
    double fx = identification_objective(problem, x);
    // Residuals below a few ulps of the data cannot be reduced further.
    const double roundoff = std::pow(64.0 * std::numeric_limits<double>::epsilon() * b.norm(), 2);
    if (fx <= roundoff) {
        return {ProbabilityDistribution(x), fx, 0, true};
    }
    // Decreases are measured against the starting objective.
    const double reference = fx;

    const Eigen::MatrixXd hessian = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian, Eigen::EigenvaluesOnly);
    const double lipschitz = 2.0 * eig.eigenvalues().maxCoeff();
    if (!(lipschitz > 0.0)) {
        return {ProbabilityDistribution(x), fx, 0, true};
    }
    const double step = 1.0 / lipschitz;

    Eigen::VectorXd y = x;
    double momentum = 1.0;
    std::size_t iter = 0;
    bool converged = false;
    while (iter < tolerances.max_iterations) {
        ++iter;
        const Eigen::VectorXd grad = 2.0 * (a.transpose() * (a * y - b));
        Eigen::VectorXd x_new = simplex_project(y - step * grad).values();
        double f_new = identification_objective(problem, x_new);
        bool restarted = false;
        if (f_new > fx) {
            // Momentum overshot: restart from a plain projected-gradient step at x.
            momentum = 1.0;
            const Eigen::VectorXd g_x = 2.0 * (a.transpose() * (a * x - b));
            x_new = simplex_project(x - step * g_x).values();
            f_new = identification_objective(problem, x_new);
            restarted = true;
            if (f_new > fx) {
                // Round-off floor reached.
                converged = true;
                break;
            }
        }
        const double decrease = fx - f_new;
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        y = x_new + ((momentum - 1.0) / next_momentum) * (x_new - x);
        if (restarted) {
            y = x_new;
        }
        momentum = next_momentum;
        x = std::move(x_new);
        fx = f_new;
        if (decrease <= tolerances.relative_decrease * reference) {
            converged = true;
            break;
        }
    }
    return {ProbabilityDistribution(x), fx, iter, converged};
}

double relative_error(const Eigen::VectorXd& p_star, const Eigen::VectorXd& p_f) {
    const double ref = p_star.norm();
    if (!(ref > 0.0)) {
        throw std::domain_error("relative_error: reference has zero norm");
    }
    if (p_star.size() != p_f.size()) {
        throw std::invalid_argument("relative_error: length mismatch");
    }
    return (p_star - p_f).norm() / ref;
}

MultistartResult multistart_identify(const IdentificationProblem& problem, const ProbabilityDistribution& p_star_ref,
                                     std::size_t n_starts, double radius_factor, std::uint64_t seed,
                                     const SolverTolerances& tolerances) {
    if (n_starts == 0) {
        throw std::invalid_argument("multistart_identify: n_starts must be at least 1");
    }
    const Eigen::VectorXd& center = p_star_ref.values();
    const double half_width = radius_factor * center.norm();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Eigen::VectorXd> inits;
    inits.reserve(n_starts);
    for (std::size_t s = 0; s < n_starts; ++s) {
        Eigen::VectorXd v(center.size());
        for (Eigen::Index l = 0; l < v.size(); ++l) {
            v(l) = center(l) + half_width * unit(rng);
        }
        inits.push_back(std::move(v));
    }

    std::vector<std::optional<ReconstructionResult>> slots(n_starts);
    parallel_for(n_starts, [&](std::size_t s) { slots[s] = solve_identification(problem, inits[s], tolerances); });

    MultistartResult out{*slots[0], 0.0, {}, {}};
    out.runs.reserve(n_starts);
    out.errors.reserve(n_starts);
    std::size_t best = 0;
    for (std::size_t s = 0; s < n_starts; ++s) {
        out.errors.push_back(relative_error(center, slots[s]->p_f.values()));
        out.runs.push_back(std::move(*slots[s]));
        if (out.errors[s] < out.errors[best]) {
            best = s;
        }
    }
    out.best = out.runs[best];
    out.min_relative_error = out.errors[best];
    return out;
}

}  // namespace gra
