#include "gra/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gra/experiment.hpp"
#include "gra/gram.hpp"
#include "gra/greedy.hpp"
#include "gra/reconstruction.hpp"

namespace gra {

namespace {

CheckResult at_most(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
    const GeneratorFn gen = options.generator ? options.generator : GeneratorFn(&generator);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> amp(-10.0, 10.0);
    std::uniform_real_distribution<double> alpha_dist(-0.2, 0.2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double delta = std::numbers::pi / 10.0;
    const AlphaGrid grid = alpha_grid(30, -0.2, 0.2, delta);
    const std::size_t n = std::max<std::size_t>(1, options.samples);

    std::vector<ControlPulse> pulses;
    std::vector<double> alphas;
    for (std::size_t i = 0; i < n; ++i) {
        pulses.push_back({amp(rng), amp(rng), 16.0});
        alphas.push_back(alpha_dist(rng));
    }

    std::vector<CheckResult> out;

    {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::Matrix3d omega = gen(pulses[i], alphas[i], delta);
            worst = std::max(worst, (omega + omega.transpose()).cwiseAbs().maxCoeff());
        }
        out.push_back(at_most("generator_antisymmetry", worst, 0.0));
    }
    {
        // Integrate the generator under test; a non-skew generator drifts off the sphere.
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const BlochState x = rk4_integrate(gen(pulses[i], alphas[i], delta), 1.0, north_pole(), 1e-3);
            worst = std::max(worst, std::abs(x.norm() - 1.0));
        }
        out.push_back(at_most("generator_norm_conservation", worst, 1e-8, "RK4, t=1, step 1e-3"));
    }
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(propagate(pulses[i], alphas[i], delta, north_pole()).norm() - 1.0));
        }
        out.push_back(at_most("propagator_norm_conservation", worst, 1e-12));
    }
    {
        // RK4 against the closed form, scaled by the leading truncation term t w^5 h^4 / 120.
        double worst_ratio = 0.0;
        const double h = 1e-3;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = pulses[i];
            const double rate = std::hypot((1.0 + alphas[i]) * p.u_x, (1.0 + alphas[i]) * p.u_y, delta);
            const double bound = p.t_f * std::pow(rate, 5) * std::pow(h, 4) / 120.0 + 1e-12;
            const double dev = (propagate(p, alphas[i], delta, north_pole()) -
                                rk4_propagate(p, alphas[i], delta, north_pole(), h))
                                   .norm();
            worst_ratio = std::max(worst_ratio, dev / bound);
        }
        out.push_back(at_most("rk4_oracle_within_truncation_bound", worst_ratio, 1.5,
                              "deviation / (t w^5 h^4 / 120)"));
    }
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double split = unit(rng) * pulses[i].t_f;
            ControlPulse a = pulses[i];
            ControlPulse b = pulses[i];
            a.t_f = split;
            b.t_f = pulses[i].t_f - split;
            const BlochState two_step = propagate(b, alphas[i], delta, propagate(a, alphas[i], delta, north_pole()));
            worst = std::max(worst, (two_step - propagate(pulses[i], alphas[i], delta, north_pole())).norm());
        }
        out.push_back(at_most("propagator_composition", worst, 1e-12));
    }

    const BasisSet basis = random_orthonormal_basis(grid.size(), options.seed + 1);
    {
        double asym = 0.0;
        double min_eig = 0.0;
        std::size_t max_rank = 0;
        for (const auto& p : pulses) {
            const GramMatrix w = w_single(basis, p, grid);
            asym = std::max(asym, (w.w - w.w.transpose()).cwiseAbs().maxCoeff());
            const Eigen::VectorXd s = spectrum(w);
            min_eig = std::min(min_eig, s(s.size() - 1));
            max_rank = std::max(max_rank, numerical_rank(w));
        }
        out.push_back(at_most("w_symmetry", asym, 1e-12));
        out.push_back(at_most("w_psd", -min_eig, 1e-10, "negated smallest eigenvalue"));
        out.push_back(at_most("w_rank_at_most_2", static_cast<double>(max_rank), 2.0));
    }
    {
        double worst_init = 0.0;
        double worst_disc = 0.0;
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = pulses[i];
            const GramMatrix w = w_single(basis, p, grid);
            const double h1 = h_k(basis, CoefficientVector::Ones(1), p, grid).squaredNorm();
            worst_init = std::max(worst_init, std::abs(h1 - w.w(0, 0)) / std::max(1.0, std::abs(w.w(0, 0))));

            const std::size_t k = 1 + i % (grid.size() - 1);
            CoefficientVector beta(static_cast<Eigen::Index>(k));
            for (Eigen::Index j = 0; j < beta.size(); ++j) {
                beta(j) = normal(rng);
            }
            Eigen::VectorXd v(beta.size() + 1);
            v << beta, -1.0;
            const double q = quadratic_form(upper_left_block(w, k + 1), v);
            const double d = discriminatory_objective(basis, beta, p, grid);
            worst_disc = std::max(worst_disc, std::abs(q - d) / std::max(1.0, std::abs(q)));
        }
        out.push_back(at_most("initialization_equals_w11", worst_init, 1e-9));
        out.push_back(at_most("discriminatory_equals_quadratic_form", worst_disc, 1e-9));
    }
    {
        const GramMatrix w = w_single(basis, pulses.front(), grid);
        const CoefficientVector beta = fitting_step(1, w);
        const double direct = w.w(0, 1) / w.w(0, 0);
        out.push_back(at_most("fitting_k1_closed_form", std::abs(beta(0) - direct), 1e-12 * std::max(1.0, std::abs(direct))));

        // One control: the 2x2 block is generically PD, the 3x3 block singular (rank <= 2).
        const CoefficientVector beta2 = fitting_step(2, w);
        Eigen::VectorXd v(3);
        v << beta2, -1.0;
        const double residual = (upper_left_block(w, 3).w * v).norm() / w.w.norm();
        out.push_back(at_most("fitting_vector_in_kernel", residual, 1e-8));
    }
    {
        double worst_idem = 0.0;
        double worst_expansion = 0.0;
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::VectorXd a(static_cast<Eigen::Index>(grid.size()));
            Eigen::VectorXd b(a.size());
            for (Eigen::Index l = 0; l < a.size(); ++l) {
                a(l) = normal(rng);
                b(l) = normal(rng);
            }
            const Eigen::VectorXd pa = simplex_project(a).values();
            const Eigen::VectorXd pb = simplex_project(b).values();
            worst_idem = std::max(worst_idem, (simplex_project(pa).values() - pa).norm());
            worst_expansion = std::max(worst_expansion, (pa - pb).norm() - (a - b).norm());
        }
        out.push_back(at_most("simplex_projection_idempotent", worst_idem, 1e-12));
        out.push_back(at_most("simplex_projection_nonexpansive", worst_expansion, 1e-12));
    }
    {
        GreedyConfig rc;
        const ControlSet controls = rcc_controls(grid.size(), rc, options.seed + 2);
        const auto p1 = random_probability_distributions(grid.size(), 2, options.seed + 3);
        const double lambda = 0.3;
        const auto mix = ProbabilityDistribution::normalized(lambda * p1[0].values() + (1 - lambda) * p1[1].values());
        const auto m0 = synthesize_measurements(controls, p1[0], grid);
        const auto m1 = synthesize_measurements(controls, p1[1], grid);
        const auto mm = synthesize_measurements(controls, mix, grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < controls.size(); ++k) {
            worst = std::max(worst, (mm.readings[k] - (lambda * m0.readings[k] + (1 - lambda) * m1.readings[k])).norm());
        }
        out.push_back(at_most("measurement_linearity", worst, 1e-12));

        // Point mass recovery from noiseless data.
        const auto target = point_mass(grid.size(), grid.size() / 3);
        const auto ms = synthesize_measurements(controls, target, grid);
        const auto problem = build_problem(controls, grid, ms);
        out.push_back(at_most("identification_residual_at_truth", identification_objective(problem, target.values()),
                              1e-24));
    }
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace gra
