#include "gra/gram.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace gra {

std::vector<Eigen::Vector2d> gamma_vectors(const BasisSet& basis, const std::vector<TransverseReading>& readings) {
    if (readings.size() != basis.dim()) {
        throw std::invalid_argument("gamma_vectors: expected one reading per grid point");
    }
    std::vector<Eigen::Vector2d> gamma(basis.size(), Eigen::Vector2d::Zero());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        for (std::size_t l = 0; l < readings.size(); ++l) {
            gamma[j] += basis.functions(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) * readings[l];
        }
    }
    return gamma;
}

GramMatrix w_single(const BasisSet& basis, const ControlPulse& pulse, const AlphaGrid& grid) {
    if (basis.dim() != grid.size()) {
        throw std::invalid_argument("w_single: basis and grid sizes differ");
    }
    // Gamma is 2 x n; column j holds gamma_j.
    const Eigen::MatrixXd gamma = response_matrix(pulse, grid).transpose() * basis.functions;
    GramMatrix out;
    out.w = gamma.transpose() * gamma;
    out.n_controls = 1;
    return out;
}

GramMatrix w_accumulate(const std::vector<GramMatrix>& terms) {
    if (terms.empty()) {
        throw std::invalid_argument("w_accumulate: no terms");
    }
    GramMatrix sum;
    sum.w = Eigen::MatrixXd::Zero(terms.front().w.rows(), terms.front().w.cols());
    for (const auto& t : terms) {
        if (t.w.rows() != sum.w.rows() || t.w.cols() != sum.w.cols()) {
            throw std::invalid_argument("w_accumulate: dimension mismatch");
        }
        sum.w += t.w;
        sum.n_controls += t.n_controls;
    }
    return sum;
}

GramMatrix canonical_gram(const std::vector<ControlPulse>& pulses, const AlphaGrid& grid) {
    const auto K = static_cast<Eigen::Index>(grid.size());
    GramMatrix out;
    out.w = Eigen::MatrixXd::Zero(K, K);
    for (const auto& pulse : pulses) {
        const Eigen::MatrixX2d y = response_matrix(pulse, grid);
        out.w.noalias() += y * y.transpose();
    }
    out.n_controls = pulses.size();
    return out;
}

EigenDecomposition eigen_decomposition(const GramMatrix& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w.w);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigen_decomposition: solver failed");
    }
    // Eigen returns ascending order.
    EigenDecomposition out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

Eigen::VectorXd spectrum(const GramMatrix& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w.w, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectrum: solver failed");
    }
    return solver.eigenvalues().reverse();
}

double condition_number(const GramMatrix& w) {
    const Eigen::VectorXd values = spectrum(w);
    const double largest = values(0);
    const double smallest = values(values.size() - 1);
    if (!(largest > 0.0) || smallest <= kSpectralFloor * largest) {
        return std::numeric_limits<double>::infinity();
    }
    return largest / smallest;
}

std::size_t numerical_rank(const GramMatrix& w) {
    const Eigen::VectorXd values = spectrum(w);
    if (!(values(0) > 0.0)) {
        return 0;
    }
    const double floor = kSpectralFloor * values(0);
    return static_cast<std::size_t>((values.array() > floor).count());
}

double quadratic_form(const GramMatrix& w, const Eigen::VectorXd& v) {
    if (v.size() != w.w.rows()) {
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    }
    return v.dot(w.w * v);
}

GramMatrix upper_left_block(const GramMatrix& w, std::size_t k) {
    if (k == 0 || k > w.size()) {
        throw std::out_of_range("upper_left_block: k outside [1, K]");
    }
    const auto n = static_cast<Eigen::Index>(k);
    return GramMatrix{w.w.topLeftCorner(n, n), w.n_controls};
}

Eigen::VectorXd column_slice(const GramMatrix& w, std::size_t k) {
    if (k == 0 || k >= w.size()) {
        throw std::out_of_range("column_slice: k outside [1, K-1]");
    }
    const auto n = static_cast<Eigen::Index>(k);
    return w.w.col(n).head(n);
}

std::size_t sign_changes(const Eigen::VectorXd& v, double zero_tol) {
    std::size_t changes = 0;
    int previous = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const int sign = v(i) > zero_tol ? 1 : (v(i) < -zero_tol ? -1 : 0);
        if (sign != 0) {
            if (previous != 0 && sign != previous) {
                ++changes;
            }
            previous = sign;
        }
    }
    return changes;
}

}  // namespace gra
