#include "gra/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

namespace gra {

ProbabilityDistribution::ProbabilityDistribution(Eigen::VectorXd p) : p_(std::move(p)) {
    if (p_.size() == 0) {
        throw std::invalid_argument("distribution: empty weight vector");
    }
    for (Eigen::Index l = 0; l < p_.size(); ++l) {
        if (!(p_(l) >= 0.0)) {
            throw std::invalid_argument("distribution: negative or non-finite weight at index " +
                                        std::to_string(l));
        }
    }
    if (std::abs(p_.sum() - 1.0) > kSumTolerance) {
        throw std::invalid_argument("distribution: weights do not sum to one");
    }
}

ProbabilityDistribution ProbabilityDistribution::normalized(const Eigen::VectorXd& weights) {
    const double total = weights.sum();
    if (!(total > 0.0) || (weights.array() < 0.0).any()) {
        throw std::invalid_argument("distribution: weights must be nonnegative with positive mass");
    }
    return ProbabilityDistribution(weights / total);
}

AlphaGrid alpha_grid(std::size_t K, double a_min, double a_max, double delta) {
    if (K < 2) {
        throw std::invalid_argument("alpha_grid: need at least two points");
    }
    if (!(a_min < a_max)) {
        throw std::invalid_argument("alpha_grid: a_min must be below a_max");
    }
    AlphaGrid grid;
    grid.delta = delta;
    grid.alphas.resize(K);
    const double span = a_max - a_min;
    for (std::size_t l = 0; l < K; ++l) {
        grid.alphas[l] = a_min + span * static_cast<double>(l) / static_cast<double>(K - 1);
    }
    grid.alphas.back() = a_max;
    return grid;
}

BasisSet random_orthonormal_basis(std::size_t K, std::uint64_t seed) {
    if (K == 0) {
        throw std::invalid_argument("random_orthonormal_basis: K must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = static_cast<Eigen::Index>(K);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            g(i, j) = normal(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    // Make the factorization unique: positive diagonal of R.
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) {
            q.col(j) = -q.col(j);
        }
    }
    BasisSet basis;
    basis.functions = std::move(q);
    return basis;
}

std::vector<ProbabilityDistribution> random_probability_distributions(std::size_t K, std::size_t n,
                                                                      std::uint64_t seed) {
    if (K == 0 || n == 0) {
        throw std::invalid_argument("random_probability_distributions: K and n must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<ProbabilityDistribution> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd w(static_cast<Eigen::Index>(K));
        for (Eigen::Index l = 0; l < w.size(); ++l) {
            // uniform() may return exactly 0; keep weights strictly positive.
            double draw = 0.0;
            while (draw == 0.0) {
                draw = uniform(rng);
            }
            w(l) = draw;
        }
        out.push_back(ProbabilityDistribution::normalized(w));
    }
    return out;
}

ProbabilityDistribution simplex_project(const Eigen::VectorXd& v) {
    const Eigen::Index n = v.size();
    if (n == 0) {
        throw std::invalid_argument("simplex_project: empty vector");
    }
    std::vector<double> sorted(v.data(), v.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double threshold = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumulative += sorted[static_cast<std::size_t>(j)];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) {
            threshold = candidate;
        }
    }
    Eigen::VectorXd p = (v.array() - threshold).max(0.0).matrix();
    // Absorb round-off so the sum is one to machine precision.
    const double total = p.sum();
    p /= total;
    return ProbabilityDistribution(std::move(p));
}

Eigen::VectorXd expand(const BasisSet& basis, const CoefficientVector& beta) {
    if (static_cast<std::size_t>(beta.size()) > basis.size()) {
        throw std::invalid_argument("expand: more coefficients than basis functions");
    }
    return basis.functions.leftCols(beta.size()) * beta;
}

CoefficientVector coefficients_of(const BasisSet& basis, const Eigen::VectorXd& v) {
    if (static_cast<std::size_t>(v.size()) != basis.dim()) {
        throw std::invalid_argument("coefficients_of: dimension mismatch");
    }
    return basis.functions.transpose() * v;
}

ProbabilityDistribution double_peak_distribution(const AlphaGrid& grid) {
    constexpr double kCenter = 0.1;
    constexpr double kWidth = 0.03;
    Eigen::VectorXd w(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t l = 0; l < grid.size(); ++l) {
        const double a = grid.alphas[l];
        const double left = (a + kCenter) / kWidth;
        const double right = (a - kCenter) / kWidth;
        w(static_cast<Eigen::Index>(l)) = std::exp(-0.5 * left * left) + std::exp(-0.5 * right * right);
    }
    return ProbabilityDistribution::normalized(w);
}

ProbabilityDistribution step_distribution(const AlphaGrid& grid) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t l = 0; l < grid.size(); ++l) {
        if (grid.alphas[l] > 0.0) {
            w(static_cast<Eigen::Index>(l)) = 1.0;
        }
    }
    return ProbabilityDistribution::normalized(w);
}

ProbabilityDistribution point_mass(std::size_t K, std::size_t l) {
    if (l >= K) {
        throw std::out_of_range("point_mass: index outside grid");
    }
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
    p(static_cast<Eigen::Index>(l)) = 1.0;
    return ProbabilityDistribution(std::move(p));
}

ProbabilityDistribution uniform_distribution(std::size_t K) {
    return ProbabilityDistribution::normalized(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(K)));
}

}  // namespace gra
