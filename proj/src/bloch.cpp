#include "gra/bloch.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>

namespace gra {

namespace {

constexpr double kMinRotationAngle = 1e-14;

Eigen::Vector3d rotation_vector(const ControlPulse& pulse, double alpha, double delta) {
    const double scale = 1.0 + alpha;
    return {scale * pulse.u_x, scale * pulse.u_y, delta};
}

}  // namespace

bool ControlPulse::admissible(double u_m, double t_f_max) const {
    return std::abs(u_x) <= u_m && std::abs(u_y) <= u_m && t_f >= 0.0 && t_f <= t_f_max;
}

Eigen::Matrix3d generator(const ControlPulse& pulse, double alpha, double delta) {
    const Eigen::Vector3d w = rotation_vector(pulse, alpha, delta);
    Eigen::Matrix3d omega;
    // clang-format off
    omega <<   0.0, -w.z(),  w.y(),
             w.z(),    0.0, -w.x(),
            -w.y(),  w.x(),    0.0;
    // clang-format on
    return omega;
}

BlochState propagate(const ControlPulse& pulse, double alpha, double delta, const BlochState& x0) {
    const Eigen::Vector3d w = rotation_vector(pulse, alpha, delta);
    const double rate = w.norm();
    const double angle = rate * pulse.t_f;
    if (std::abs(angle) < kMinRotationAngle) {
        return x0;
    }
    const Eigen::Vector3d n = w / rate;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return x0 * c + n.cross(x0) * s + n * (n.dot(x0) * (1.0 - c));
}

TransverseReading propagate_transverse(const ControlPulse& pulse, double alpha, double delta) {
    const Eigen::Vector3d w = rotation_vector(pulse, alpha, delta);
    const double rate = w.norm();
    const double angle = rate * pulse.t_f;
    if (std::abs(angle) < kMinRotationAngle) {
        return TransverseReading::Zero();
    }
    // Rodrigues formula specialised to x0 = (0, 0, 1).
    const Eigen::Vector3d n = w / rate;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double fold = n.z() * (1.0 - c);
    return {n.y() * s + n.x() * fold, -n.x() * s + n.y() * fold};
}

std::vector<TransverseReading> propagate_grid(const ControlPulse& pulse, const AlphaGrid& grid) {
    std::vector<TransverseReading> out;
    out.reserve(grid.size());
    for (double alpha : grid.alphas) {
        out.push_back(propagate_transverse(pulse, alpha, grid.delta));
    }
    return out;
}

Eigen::MatrixX2d response_matrix(const ControlPulse& pulse, const AlphaGrid& grid) {
    Eigen::MatrixX2d y(static_cast<Eigen::Index>(grid.size()), 2);
    for (std::size_t l = 0; l < grid.size(); ++l) {
        y.row(static_cast<Eigen::Index>(l)) = propagate_transverse(pulse, grid.alphas[l], grid.delta).transpose();
    }
    return y;
}

BlochState rk4_integrate(const Eigen::Matrix3d& omega, double t, const BlochState& x0, double step) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("rk4_integrate: step must be positive");
    }
    if (t == 0.0) {
        return x0;
    }
    const auto n_steps = static_cast<long>(std::ceil(std::abs(t) / step));
    const double h = t / static_cast<double>(n_steps);
    BlochState x = x0;
    for (long i = 0; i < n_steps; ++i) {
        const Eigen::Vector3d k1 = omega * x;
        const Eigen::Vector3d k2 = omega * (x + 0.5 * h * k1);
        const Eigen::Vector3d k3 = omega * (x + 0.5 * h * k2);
        const Eigen::Vector3d k4 = omega * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

BlochState rk4_propagate(const ControlPulse& pulse, double alpha, double delta, const BlochState& x0,
                         double step) {
    return rk4_integrate(generator(pulse, alpha, delta), pulse.t_f, x0, step);
}

}  // namespace gra
