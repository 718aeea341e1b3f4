#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gra/distributions.hpp"

using namespace gra;

TEST_CASE("alpha grid") {
    const AlphaGrid g = alpha_grid(30, -0.2, 0.2, std::numbers::pi / 10.0);
    REQUIRE(g.size() == 30);
    CHECK(g.alphas.front() == -0.2);
    CHECK(g.alphas.back() == 0.2);
    for (std::size_t l = 1; l < g.size(); ++l) {
        CHECK(g.alphas[l] - g.alphas[l - 1] == doctest::Approx(0.4 / 29.0).epsilon(1e-12));
    }
    CHECK(alpha_grid(2, 0.0, 1.0, 0.0).alphas == std::vector<double>{0.0, 1.0});
    CHECK(alpha_grid(3, -1.0, 1.0, 0.0).alphas == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK_THROWS_AS(alpha_grid(1, 0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(alpha_grid(5, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("probability distribution validation") {
    CHECK_NOTHROW(ProbabilityDistribution(Eigen::Vector3d(0.2, 0.3, 0.5)));
    CHECK_THROWS_AS(ProbabilityDistribution(Eigen::Vector3d(0.2, 0.3, 0.6)), std::invalid_argument);
    CHECK_THROWS_AS(ProbabilityDistribution(Eigen::Vector3d(-0.1, 0.6, 0.5)), std::invalid_argument);
    const ProbabilityDistribution n = ProbabilityDistribution::normalized(Eigen::Vector2d(1.0, 3.0));
    CHECK(n[0] == doctest::Approx(0.25));
    CHECK_THROWS_AS(ProbabilityDistribution::normalized(Eigen::Vector2d(0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("random orthonormal basis") {
    SUBCASE("single function") {
        const BasisSet b = random_orthonormal_basis(1, 3);
        CHECK(std::abs(b.functions(0, 0)) == doctest::Approx(1.0));
    }
    SUBCASE("orthonormal for several sizes and seeds") {
        for (std::size_t K : {2u, 7u, 30u, 60u}) {
            for (std::uint64_t seed : {1u, 42u, 99u}) {
                const BasisSet b = random_orthonormal_basis(K, seed);
                const Eigen::MatrixXd gram = b.functions.transpose() * b.functions;
                CHECK((gram - Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K)))
                          .cwiseAbs()
                          .maxCoeff() < 1e-12);
            }
        }
    }
    SUBCASE("deterministic per seed, different across seeds") {
        CHECK(random_orthonormal_basis(30, 42).functions == random_orthonormal_basis(30, 42).functions);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const Eigen::MatrixXd d =
                random_orthonormal_basis(30, 2 * s).functions - random_orthonormal_basis(30, 2 * s + 1).functions;
            CHECK(d.cwiseAbs().maxCoeff() > 1e-6);
        }
    }
}

TEST_CASE("random probability distributions") {
    CHECK(random_probability_distributions(1, 3, 7)[0][0] == 1.0);
    const auto ps = random_probability_distributions(30, 100, 17);
    REQUIRE(ps.size() == 100);
    for (const auto& p : ps) {
        CHECK(std::abs(p.values().sum() - 1.0) < 1e-12);
        CHECK(p.values().minCoeff() > 0.0);
    }
}

// Reference projections from a generic constrained QP solver (tests/oracle/freeze.py).
TEST_CASE("simplex projection") {
    SUBCASE("reference points") {
        CHECK((simplex_project(Eigen::Vector3d(2.0, 0.0, 0.0)).values() - Eigen::Vector3d(1.0, 0.0, 0.0)).norm() <
              1e-15);
        CHECK((simplex_project(Eigen::Vector3d(0.5, 0.5, 0.5)).values() - Eigen::Vector3d::Constant(1.0 / 3.0))
                  .norm() < 1e-15);
        CHECK((simplex_project(Eigen::Vector4d(0.3, -0.2, 0.9, 0.4)).values() -
               Eigen::Vector4d(0.1, 0.0, 0.7, 0.2))
                  .norm() < 1e-7);
        CHECK((simplex_project(Eigen::Vector3d(-1.0, -2.0, -3.0)).values() - Eigen::Vector3d(1.0, 0.0, 0.0))
                  .norm() < 1e-7);
    }
    SUBCASE("properties over random vectors") {
        std::mt19937_64 rng(23);
        std::normal_distribution<double> normal(0.0, 3.0);
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::VectorXd v(12);
            for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
            const Eigen::VectorXd p = simplex_project(v).values();
            CHECK(std::abs(p.sum() - 1.0) < 1e-12);
            CHECK(p.minCoeff() >= 0.0);
            // Idempotent.
            CHECK((simplex_project(p).values() - p).norm() < 1e-12);
            // Optimality: <v - p, q - p> <= 0 for every vertex q of the simplex.
            for (Eigen::Index j = 0; j < v.size(); ++j) {
                Eigen::VectorXd q = Eigen::VectorXd::Zero(v.size());
                q(j) = 1.0;
                CHECK((v - p).dot(q - p) <= 1e-10);
            }
        }
    }
}

TEST_CASE("expand and coefficients") {
    const BasisSet b = random_orthonormal_basis(8, 5);
    CHECK((expand(b, Eigen::VectorXd::Unit(8, 3)) - b.functions.col(3)).norm() == 0.0);
    CHECK(expand(b, Eigen::VectorXd::Zero(4)).isZero(0.0));
    const Eigen::VectorXd p = random_probability_distributions(8, 1, 9)[0].values();
    CHECK((expand(b, coefficients_of(b, p)) - p).norm() < 1e-12);
    CHECK_THROWS_AS(expand(b, Eigen::VectorXd::Zero(9)), std::invalid_argument);
}

TEST_CASE("targets on the paper grid") {
    const AlphaGrid g = alpha_grid(30, -0.2, 0.2, std::numbers::pi / 10.0);
    SUBCASE("step: fifteen equal weights on positive alphas") {
        const Eigen::VectorXd p = step_distribution(g).values();
        int nonzero = 0;
        for (Eigen::Index l = 0; l < p.size(); ++l) {
            if (p(l) != 0.0) {
                ++nonzero;
                CHECK(p(l) == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
                CHECK(g.alphas[static_cast<std::size_t>(l)] > 0.0);
            }
        }
        CHECK(nonzero == 15);
        CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    }
    SUBCASE("double peak: symmetric, reference values") {
        const Eigen::VectorXd p = double_peak_distribution(g).values();
        CHECK(std::abs(p.sum() - 1.0) < 1e-12);
        for (Eigen::Index l = 0; l < 30; ++l) {
            CHECK(p(l) == doctest::Approx(p(29 - l)).epsilon(1e-12));
        }
        CHECK(p(0) == doctest::Approx(0.0003546045302442971).epsilon(1e-12));
        CHECK(p(7) == doctest::Approx(0.091121843766918051).epsilon(1e-12));
        CHECK(p(14) == doctest::Approx(0.00090362449266109303).epsilon(1e-12));
        CHECK(p.maxCoeff() == doctest::Approx(0.091121843766918051).epsilon(1e-12));
    }
    SUBCASE("point mass and uniform") {
        CHECK(point_mass(5, 2).values() == Eigen::VectorXd::Unit(5, 2));
        CHECK(uniform_distribution(4).values().isApprox(Eigen::Vector4d::Constant(0.25)));
    }
}
