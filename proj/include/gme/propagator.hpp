#pragma once

#include <optional>
#include <vector>

#include "gme/dyson.hpp"
#include "gme/kernels.hpp"
#include "gme/quadratic_model.hpp"

namespace gme {

// Reduced-state representation: pure imaginary antisymmetric Γ over Majorana
// indices, eigenvalues within [-1, 1].
struct CovarianceState {
    Eigen::MatrixXcd gamma;
    double t{0.0};
};

// Coefficients of dΓ/dt = X Γ + Γ Xᵀ + Y at one time. X is real, Y pure
// imaginary antisymmetric; projection_deviation records how far the raw
// assembly was from that structure before projection.
struct LyapunovCoefficients {
    Eigen::MatrixXcd memory;   // M(t)
    Eigen::MatrixXd drift;     // X(t)
    Eigen::MatrixXcd noise;    // Y(t)
    double projection_deviation{0.0};
};

// Interaction coefficients tabulated on the grid: the Schrödinger-picture
// 𝔸(0)ᵀ and the lagged 𝔸(-k dt) needed by the memory integral.
struct MemoryIntegrand {
    Eigen::MatrixXcd a0_transposed;          // 2n x 2
    std::vector<Eigen::MatrixXcd> a_lagged;  // index k holds 𝔸(-k dt), 2 x 2n

    static MemoryIntegrand tabulate(const BogoliubovData& bog, const TimeGrid& grid);
};

// Memory matrix M(t_i) = -∫_0^{t_i} dτ 𝔸(0)ᵀ G(t_i, τ) 𝔸(τ - t_i) by a single
// composite trapezoid; the channel contraction runs over the 2x2 kernel
// indices. Throws when the index is off the grid.
Eigen::MatrixXcd memory_matrix(const TwoTimeKernel& g, const MemoryIntegrand& integrand,
                               int time_index);

// X = 2 Re[Ω M] - 2i Ω h, Y = -Ω (M - Mᵀ + M† - M*) Ω for the fermionic case.
// The structural invariants (X real, Y imaginary antisymmetric) are enforced
// by projection; a pre-projection deviation beyond consistency_tol signals a
// kernel or coefficient bug and throws NumericalError.
LyapunovCoefficients lyapunov_coefficients(const Eigen::MatrixXcd& memory,
                                           const MajoranaGenerator& gen,
                                           double consistency_tol = 1e-6);

struct IntegrationOptions {
    bool project_each_step{true};
    double physicality_tol{1e-6};
    double steady_rhs_tol{1e-6};
    int steady_sustain_steps{100};
};

struct CovarianceTrajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> gammas;
    Eigen::MatrixXd populations;     // rows: grid points, cols: modes
    std::vector<double> rhs_norms;   // max-norm of the Lyapunov right-hand side
    double max_projection_drift{0.0};
    double max_population_clip{0.0};
    double max_coefficient_deviation{0.0};
    std::optional<double> steady_state_time;

    CovarianceState state_at(int i) const { return {gammas.at(i), times.at(i)}; }
};

// Time-dependent coefficients on the grid; midpoint values for the integrator
// come from linear interpolation of M (the affine maps M -> X, Y commute with
// interpolation of the constant part).
class LyapunovProvider {
public:
    LyapunovProvider(std::vector<Eigen::MatrixXcd> memory_grid, MajoranaGenerator gen,
                     TimeGrid grid, double consistency_tol = 1e-6);

    LyapunovCoefficients at(double t) const;
    const TimeGrid& grid() const { return grid_; }

private:
    std::vector<Eigen::MatrixXcd> memory_grid_;
    MajoranaGenerator gen_;
    TimeGrid grid_;
    double consistency_tol_;
};

// Classical RK4 sweep of the matrix Lyapunov equation with per-step
// antisymmetry/imaginarity projection and a physicality guard on the Γ
// spectrum. Throws IntegrationError when iΓ leaves [-1, 1] beyond tolerance.
CovarianceTrajectory integrate_covariance(const Eigen::MatrixXcd& gamma0,
                                          const LyapunovProvider& provider,
                                          const IntegrationOptions& opts = {});

// Mode occupations <a†_n a_n> = (1 + i Γ_{2n-1,2n})/2, clipped to [0, 1].
Eigen::VectorXd populations(const Eigen::MatrixXcd& gamma);

enum class RunMode { Gme, Redfield };

struct RunSettings {
    QuadraticModel model;
    SpectralDensity bath;
    TimeGrid grid;
    StateSpec initial_state{StateSpec::BellPair};
    std::optional<Eigen::MatrixXcd> initial_gamma;  // overrides initial_state
    double dyson_tol{1e-6};
    int max_order{24};
    KernelConventions conventions{};
    IntegrationOptions integration{};
    bool keep_kernel{false};      // retain the dressed kernel in the result
    bool check_residual{false};   // evaluate the fixed-point defect (GME only)
};

struct RunResult {
    CovarianceTrajectory trajectory;
    // Dyson diagnostics (GME mode; Redfield reports order 1, no deltas).
    std::vector<double> dyson_deltas;
    int dyson_order{1};
    bool dyson_converged{true};
    std::optional<double> fixed_point_residual;
    std::optional<TwoTimeKernel> dressed_kernel;
};

// Full pipeline: kernels -> dressed kernel (GME) or bare kernel (Redfield) ->
// memory matrices -> Lyapunov integration.
RunResult run(RunMode mode, const RunSettings& settings);

}  // namespace gme
