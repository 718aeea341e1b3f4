#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace gra {

/// A constant control: transverse field amplitudes (u_x, u_y) held for a duration t_f.
/// All quantities are in normalized units.
struct ControlPulse {
    double u_x = 0.0;
    double u_y = 0.0;
    double t_f = 0.0;

    /// True when |u_x|, |u_y| <= u_m and 0 <= t_f <= t_f_max.
    bool admissible(double u_m, double t_f_max) const;

    friend bool operator==(const ControlPulse&, const ControlPulse&) = default;
};

/// Bloch vector (x, y, z).
using BlochState = Eigen::Vector3d;
/// Measurable transverse projection (x, y) of a Bloch vector.
using TransverseReading = Eigen::Vector2d;

/// Discretized inhomogeneity values and the common detuning.
struct AlphaGrid {
    std::vector<double> alphas;
    double delta = 0.0;

    std::size_t size() const { return alphas.size(); }
};

/// Thermal equilibrium state (north pole).
inline BlochState north_pole() { return BlochState(0.0, 0.0, 1.0); }

/// Skew-symmetric generator of the Bloch dynamics for one spin:
///   x' = -delta y + (1+alpha) u_y z
///   y' =  delta x - (1+alpha) u_x z
///   z' = (1+alpha) u_x y - (1+alpha) u_y x
Eigen::Matrix3d generator(const ControlPulse& pulse, double alpha, double delta);

/// Exact propagation over pulse.t_f: a rotation about the fixed axis of the generator.
BlochState propagate(const ControlPulse& pulse, double alpha, double delta, const BlochState& x0);

/// Transverse reading at t_f starting from the north pole.
TransverseReading propagate_transverse(const ControlPulse& pulse, double alpha, double delta);

/// One reading per grid point, in grid order.
std::vector<TransverseReading> propagate_grid(const ControlPulse& pulse, const AlphaGrid& grid);

/// Same as propagate_grid packed as a K x 2 matrix (row l = reading for alpha_l).
Eigen::MatrixX2d response_matrix(const ControlPulse& pulse, const AlphaGrid& grid);

/// Classical RK4 integration of x' = omega x over [0, t] with steps no longer than `step`.
/// Throws std::invalid_argument for a nonpositive step.
BlochState rk4_integrate(const Eigen::Matrix3d& omega, double t, const BlochState& x0, double step);

/// RK4 reference propagation of the same dynamics as propagate().
BlochState rk4_propagate(const ControlPulse& pulse, double alpha, double delta, const BlochState& x0,
                         double step);

}  // namespace gra
