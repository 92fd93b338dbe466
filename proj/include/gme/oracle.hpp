#pragma once

#include <Eigen/Dense>

#include <vector>

#include "gme/kernels.hpp"
#include "gme/quadratic_model.hpp"
#include "gme/time_grid.hpp"

namespace gme {

// Star discretization of the Lorentzian bath: N fermionic modes on a uniform
// frequency grid over [-W, W] with |g_r|² = J(ε_r) Δε.
struct DiscreteBath {
    Eigen::VectorXd frequencies;  // ε_r, midpoints of the frequency cells
    Eigen::VectorXd couplings;    // g_r >= 0
    double window{0.0};           // W

    int n_modes() const { return static_cast<int>(frequencies.size()); }
    double spacing() const { return 2.0 * window / n_modes(); }
};

DiscreteBath discretize_bath(const SpectralDensity& sd, int n_modes, double window);

// Poincaré recurrence estimate 2π/Δε; oracle comparisons are only meaningful
// well below it.
double recurrence_horizon(const DiscreteBath& bath);

// max over the grid times of |Σ_r g_r² e^{-i ε_r t} - c(t)|. The gate for
// accepting oracle comparisons checks this against a tolerance relative to
// c(0) = γλ/2.
double bath_reconstruction_error(const DiscreteBath& bath, const SpectralDensity& sd,
                                 const TimeGrid& grid);

struct OracleResult {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> system_gammas;  // reduced 2n x 2n blocks
    Eigen::MatrixXd populations;                  // rows: grid points
};

// Exact Gaussian evolution of system + discrete bath: one eigendecomposition
// of the full quadratic generator, then the covariance at every output time
// follows from the closed-form orthogonal flow (no time stepping). The bath
// starts empty (zero temperature, large negative chemical potential); the
// system block of the initial covariance is supplied by the caller.
OracleResult exact_evolve(const QuadraticModel& model, const DiscreteBath& bath,
                          const Eigen::MatrixXcd& gamma_system0, const TimeGrid& grid);

// Full-system covariance at a single time, for structure checks on small
// baths (the production path only extracts the system block).
Eigen::MatrixXcd exact_full_covariance(const QuadraticModel& model,
                                       const DiscreteBath& bath,
                                       const Eigen::MatrixXcd& gamma_system0, double t);

// System + bath assembled as one quadratic model (pairing only in the system
// block, tunneling between the coupled sites and every bath mode).
QuadraticModel extended_model(const QuadraticModel& model, const DiscreteBath& bath);

}  // namespace gme
