#include "gra/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace gra {

void GreedyConfig::validate() const {
    if (!(u_m > 0.0)) {
        throw std::invalid_argument("config: u_m must be positive");
    }
    if (!(t_f > 0.0)) {
        throw std::invalid_argument("config: t_f must be positive");
    }
    if (n_starts == 0) {
        throw std::invalid_argument("config: n_starts must be at least 1");
    }
    if (optimize_time && time_slices == 0) {
        throw std::invalid_argument("config: time_slices must be at least 1");
    }
    if (max_iterations == 0 || scout_iterations == 0 || !(fd_step > 0.0)) {
        throw std::invalid_argument("config: invalid optimizer tolerances");
    }
}

double response_energy(const Eigen::VectorXd& direction, const ControlPulse& pulse, const AlphaGrid& grid) {
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t l = 0; l < grid.size(); ++l) {
        const double r = direction(static_cast<Eigen::Index>(l));
        if (r == 0.0) {
            continue;
        }
        const TransverseReading y = propagate_transverse(pulse, grid.alphas[l], grid.delta);
        sx += r * y.x();
        sy += r * y.y();
    }
    return sx * sx + sy * sy;
}

namespace {

using Vec = Eigen::VectorXd;

class BoxProblem {
public:
    BoxProblem(const ControlObjective& objective, const GreedyConfig& config)
        : objective_(objective), config_(config), dim_(config.optimize_time ? 3 : 2),
          lower_(dim_), upper_(dim_) {
        lower_.head(2).setConstant(-config.u_m);
        upper_.head(2).setConstant(config.u_m);
        if (dim_ == 3) {
            lower_(2) = 0.0;
            upper_(2) = config.t_f;
        }
    }

    Eigen::Index dim() const { return dim_; }
    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }

    ControlPulse pulse(const Vec& x) const {
        return {x(0), x(1), dim_ == 3 ? x(2) : config_.t_f};
    }

    // Minimization form of the objective.
    double cost(const Vec& x) const { return -objective_(pulse(x)); }

    Vec gradient(const Vec& x) const {
        Vec g(dim_);
        Vec probe = x;
        for (Eigen::Index i = 0; i < dim_; ++i) {
            const double h = config_.fd_step * std::max(1.0, std::abs(x(i)));
            probe(i) = x(i) + h;
            const double up = cost(probe);
            probe(i) = x(i) - h;
            const double down = cost(probe);
            probe(i) = x(i);
            g(i) = (up - down) / (2.0 * h);
        }
        return g;
    }

    Vec project(const Vec& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

private:
    const ControlObjective& objective_;
    const GreedyConfig& config_;
    Eigen::Index dim_;
    Vec lower_;
    Vec upper_;
};

// Objective changes below this, three steps running, end a local search.
constexpr double kStallDecrease = 1e-13;

struct LocalResult {
    Vec x;
    double cost;
};

// Projected BFGS descent: inverse-Hessian steps on the free variables, Armijo
// backtracking along the projected path, active bounds held fixed.
LocalResult local_descent(const BoxProblem& problem, const Vec& start, const GreedyConfig& config,
                          std::size_t iteration_cap) {
    const Eigen::Index n = problem.dim();
    Vec x = problem.project(start);
    double f = problem.cost(x);
    Vec g = problem.gradient(x);

    const double box_scale = (problem.upper() - problem.lower()).minCoeff();
    const double first_step = 0.02 * box_scale;
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    bool fresh = true;
    int stalled = 0;

    for (std::size_t iter = 0; iter < iteration_cap; ++iter) {
        std::vector<bool> active(static_cast<std::size_t>(n));
        Vec pg = g;
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool at_lower = x(i) <= problem.lower()(i) && g(i) > 0.0;
            const bool at_upper = x(i) >= problem.upper()(i) && g(i) < 0.0;
            active[static_cast<std::size_t>(i)] = at_lower || at_upper;
            if (active[static_cast<std::size_t>(i)]) {
                pg(i) = 0.0;
            }
        }
        if (pg.lpNorm<Eigen::Infinity>() <= config.grad_tol * (1.0 + std::abs(f))) {
            break;
        }

        Vec d;
        if (fresh) {
            d = -pg * std::min(1.0, first_step / pg.norm());
        } else {
            d = -(h_inv * pg);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (active[static_cast<std::size_t>(i)]) {
                    d(i) = 0.0;
                }
            }
            if (!(g.dot(d) < 0.0)) {
                h_inv.setIdentity();
                fresh = true;
                d = -pg * std::min(1.0, first_step / pg.norm());
            }
        }

        double t = 1.0;
        Vec x_new;
        double f_new = f;
        bool accepted = false;
        for (int halving = 0; halving < 50; ++halving) {
            x_new = problem.project(x + t * d);
            f_new = problem.cost(x_new);
            if (f_new <= f + 1e-4 * g.dot(x_new - x) && f_new <= f) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (fresh) {
                break;
            }
            h_inv.setIdentity();
            fresh = true;
            continue;
        }

        const Vec s = x_new - x;
        const Vec g_new = problem.gradient(x_new);
        const Vec y = g_new - g;
        const double decrease = f - f_new;
        x = x_new;
        f = f_new;
        g = g_new;
        if (s.norm() <= config.step_tol * (1.0 + x.norm())) {
            break;
        }
        stalled = decrease <= kStallDecrease * (1.0 + std::abs(f)) ? stalled + 1 : 0;
        if (stalled >= 3) {
            break;
        }
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh) {
                h_inv = Eigen::MatrixXd::Identity(n, n) * (sy / y.squaredNorm());
                fresh = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) +
                    rho * s * s.transpose();
        }
    }
    return {x, f};
}

std::vector<Vec> start_points(const BoxProblem& problem, const GreedyConfig& config, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const Eigen::Index dim = problem.dim();
    const double width = 2.0 * config.u_m;
    const auto side = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(config.n_starts))));
    const std::size_t slices = dim == 3 ? config.time_slices : 1;

    std::vector<Vec> amplitudes;
    amplitudes.reserve(config.n_starts);
    const double cell = width / static_cast<double>(side);
    for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
            Vec a(2);
            a(0) = -config.u_m + cell * (static_cast<double>(i) + unit(rng));
            a(1) = -config.u_m + cell * (static_cast<double>(j) + unit(rng));
            amplitudes.push_back(a);
        }
    }
    while (amplitudes.size() < config.n_starts) {
        Vec a(2);
        a(0) = -config.u_m + width * unit(rng);
        a(1) = -config.u_m + width * unit(rng);
        amplitudes.push_back(a);
    }

    std::vector<Vec> starts;
    starts.reserve(amplitudes.size() * slices);
    for (const Vec& a : amplitudes) {
        if (dim == 2) {
            starts.push_back(a);
            continue;
        }
        const double slab = config.t_f / static_cast<double>(slices);
        for (std::size_t s = 0; s < slices; ++s) {
            Vec x(3);
            x.head(2) = a;
            x(2) = slab * (static_cast<double>(s) + unit(rng));
            starts.push_back(x);
        }
    }
    return starts;
}

// Best points of a deterministic cell-centred lattice over the box.
std::vector<Vec> screened_points(const BoxProblem& problem, const GreedyConfig& config) {
    if (config.screen_side == 0 || config.screen_keep == 0) {
        return {};
    }
    const Eigen::Index dim = problem.dim();
    const std::size_t side = config.screen_side;
    const std::size_t levels = dim == 3 ? std::max<std::size_t>(1, config.screen_time_levels) : 1;
    const double cell = 2.0 * config.u_m / static_cast<double>(side);
    const double slab = config.t_f / static_cast<double>(levels);

    std::vector<Vec> points;
    std::vector<double> costs;
    points.reserve(side * side * levels);
    costs.reserve(side * side * levels);
    for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
            for (std::size_t s = 0; s < levels; ++s) {
                Vec x(dim);
                x(0) = -config.u_m + cell * (static_cast<double>(i) + 0.5);
                x(1) = -config.u_m + cell * (static_cast<double>(j) + 0.5);
                if (dim == 3) {
                    x(2) = slab * (static_cast<double>(s) + 0.5);
                }
                costs.push_back(problem.cost(x));
                points.push_back(std::move(x));
            }
        }
    }
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t keep = std::min(config.screen_keep, points.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return costs[a] < costs[b] || (costs[a] == costs[b] && a < b);
                      });
    std::vector<Vec> best;
    best.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
        best.push_back(points[order[k]]);
    }
    return best;
}

}  // namespace

ControlMaximum maximize_over_controls(const ControlObjective& objective, const GreedyConfig& config,
                                      std::uint64_t stream) {
    config.validate();
    const BoxProblem problem(objective, config);
    std::vector<Vec> starts = start_points(problem, config, stream);
    for (Vec& x : screened_points(problem, config)) {
        starts.push_back(std::move(x));
    }

    const std::size_t scout_cap = std::min(config.scout_iterations, config.max_iterations);
    std::vector<LocalResult> scouted;
    scouted.reserve(starts.size());
    for (const Vec& start : starts) {
        scouted.push_back(local_descent(problem, start, config, scout_cap));
    }

    std::vector<std::size_t> order(scouted.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scouted[a].cost < scouted[b].cost; });
    const std::size_t polish = std::min(std::max<std::size_t>(1, config.polish_keep), order.size());
    if (scout_cap < config.max_iterations) {
        for (std::size_t r = 0; r < polish; ++r) {
            LocalResult& entry = scouted[order[r]];
            entry = local_descent(problem, entry.x, config, config.max_iterations);
        }
    }

    // Start order decides ties.
    Vec best_x;
    double best_cost = 0.0;
    bool have_best = false;
    for (const LocalResult& local : scouted) {
        if (!have_best || local.cost < best_cost) {
            best_x = local.x;
            best_cost = local.cost;
            have_best = true;
        }
    }
    return {problem.pulse(best_x), -best_cost};
}

}  // namespace gra
