#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "gra/bloch.hpp"

namespace gra {

/// Settings shared by the greedy designers and their inner maximizer.
struct GreedyConfig {
    double u_m = 10.0;           ///< amplitude bound per component
    double t_f = 16.0;           ///< fixed duration, or the duration bound when optimize_time is set
    bool optimize_time = false;  ///< also maximize over t_f in [0, t_f]

    std::size_t n_starts = 64;      ///< amplitude starts, laid out on a jittered square grid
    std::size_t time_slices = 5;    ///< duration strata per amplitude start (time mode)
    std::size_t screen_side = 64;   ///< dense screening lattice per amplitude axis; 0 disables
    std::size_t screen_time_levels = 8;
    std::size_t screen_keep = 8;    ///< best lattice points promoted to extra starts

    double grad_tol = 1e-7;  ///< projected-gradient stop, relative to 1 + |objective|
    double step_tol = 1e-12;
    std::size_t max_iterations = 200;
    std::size_t scout_iterations = 25;  ///< iteration cap for every start before polishing
    std::size_t polish_keep = 4;        ///< best scouted points continued up to max_iterations
    double fd_step = 1e-6;  ///< relative central-difference step

    std::uint64_t seed = 42;

    void validate() const;
};

using ControlObjective = std::function<double(const ControlPulse&)>;

struct ControlMaximum {
    ControlPulse pulse;
    double value = 0.0;
};

/// Multistart projected quasi-Newton ascent over the admissible box.
/// `stream` selects an independent jitter sequence for the same seed.
ControlMaximum maximize_over_controls(const ControlObjective& objective, const GreedyConfig& config,
                                      std::uint64_t stream = 0);

/// ||sum_l r_l Y_{u, alpha_l}(t_f)||^2, i.e. <r|W(u)|r> in the canonical basis.
double response_energy(const Eigen::VectorXd& direction, const ControlPulse& pulse, const AlphaGrid& grid);

}  // namespace gra
