#include "gme/propagator.hpp"

#include <algorithm>
#include <cmath>

namespace gme {

MemoryIntegrand MemoryIntegrand::tabulate(const BogoliubovData& bog,
                                          const TimeGrid& grid) {
    MemoryIntegrand out;
    out.a0_transposed = interaction_coefficients(bog, 0.0).transpose();
    out.a_lagged.resize(grid.points());
    for (int k = 0; k < grid.points(); ++k)
        out.a_lagged[k] = interaction_coefficients(bog, -grid.time(k));
    return out;
}

Eigen::MatrixXcd memory_matrix(const TwoTimeKernel& g, const MemoryIntegrand& integrand,
                               int time_index) {
    const TimeGrid& grid = g.grid();
    if (time_index < 0 || time_index >= grid.points())
        throw ValidationError("memory_matrix: time index outside the grid");
    const int dim = static_cast<int>(integrand.a0_transposed.rows());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (int j = 0; j <= time_index; ++j) {
        const double w = grid.trapezoid_weight(time_index, j);
        if (w == 0.0) continue;
        m.noalias() -= w * integrand.a0_transposed *
                       Eigen::Matrix2cd(g.block(time_index, j)) *
                       integrand.a_lagged[time_index - j];
    }
    return m;
}

LyapunovCoefficients lyapunov_coefficients(const Eigen::MatrixXcd& memory,
                                           const MajoranaGenerator& gen,
                                           double consistency_tol) {
    const auto& omega = gen.omega;
    const Eigen::MatrixXcd om = omega * memory;
    const Eigen::MatrixXcd x_raw =
        om + om.conjugate() - complexd(0.0, 2.0) * omega * gen.h;
    // ζ = -1: Y = -Ω (M - Mᵀ + M† - M*) Ω.
    const Eigen::MatrixXcd y_raw =
        -omega *
        (memory - memory.transpose() + memory.adjoint() - memory.conjugate()) * omega;

    double deviation = x_raw.imag().cwiseAbs().maxCoeff();
    deviation = std::max(deviation,
                         (y_raw + y_raw.transpose()).cwiseAbs().maxCoeff() * 0.5);
    deviation = std::max(deviation,
                         (y_raw + y_raw.conjugate()).cwiseAbs().maxCoeff() * 0.5);
    const double scale =
        std::max({1.0, x_raw.cwiseAbs().maxCoeff(), y_raw.cwiseAbs().maxCoeff()});
    if (deviation > consistency_tol * scale)
        throw NumericalError(
            "lyapunov_coefficients: structural deviation beyond tolerance "
            "(kernel or coefficient inconsistency)");

    LyapunovCoefficients out;
    out.memory = memory;
    out.drift = x_raw.real();
    Eigen::MatrixXcd y = 0.5 * (y_raw - y_raw.transpose().eval());
    y = 0.5 * (y - y.conjugate().eval());
    out.noise = y;
    out.projection_deviation = deviation;
    return out;
}

LyapunovProvider::LyapunovProvider(std::vector<Eigen::MatrixXcd> memory_grid,
                                   MajoranaGenerator gen, TimeGrid grid,
                                   double consistency_tol)
    : memory_grid_(std::move(memory_grid)),
      gen_(std::move(gen)),
      grid_(grid),
      consistency_tol_(consistency_tol) {
    if (static_cast<int>(memory_grid_.size()) != grid_.points())
        throw ValidationError("LyapunovProvider: memory grid size mismatch");
}

LyapunovCoefficients LyapunovProvider::at(double t) const {
    const double dt = grid_.dt();
    const double s = std::clamp(t / dt, 0.0, static_cast<double>(grid_.n_steps));
    const int i = std::min(static_cast<int>(s), grid_.n_steps - 1);
    const double frac = s - i;
    Eigen::MatrixXcd m;
    if (frac == 0.0)
        m = memory_grid_[i];
    else
        m = (1.0 - frac) * memory_grid_[i] + frac * memory_grid_[i + 1];
    return lyapunov_coefficients(m, gen_, consistency_tol_);
}

namespace {

Eigen::MatrixXcd lyapunov_rhs(const LyapunovCoefficients& c,
                              const Eigen::MatrixXcd& gamma) {
    return c.drift * gamma + gamma * c.drift.transpose() + c.noise;
}

}  // namespace

Eigen::VectorXd populations(const Eigen::MatrixXcd& gamma) {
    const int n = static_cast<int>(gamma.rows()) / 2;
    Eigen::VectorXd p(n);
    for (int m = 0; m < n; ++m) {
        const double val = 0.5 * (1.0 + (complexd(0.0, 1.0) * gamma(2 * m, 2 * m + 1)).real());
        p(m) = std::clamp(val, 0.0, 1.0);
    }
    return p;
}

CovarianceTrajectory integrate_covariance(const Eigen::MatrixXcd& gamma0,
                                          const LyapunovProvider& provider,
                                          const IntegrationOptions& opts) {
    const TimeGrid& grid = provider.grid();
    const int points = grid.points();
    const double dt = grid.dt();
    const int n = static_cast<int>(gamma0.rows()) / 2;

    CovarianceTrajectory traj;
    traj.times.resize(points);
    traj.gammas.resize(points);
    traj.populations.resize(points, n);
    traj.rhs_norms.resize(points);

    Eigen::MatrixXcd gamma = initial_covariance(gamma0);  // validates structure

    int sustained = 0;
    for (int i = 0; i < points; ++i) {
        const double t = grid.time(i);
        const LyapunovCoefficients c0 = provider.at(t);
        traj.max_coefficient_deviation =
            std::max(traj.max_coefficient_deviation, c0.projection_deviation);

        traj.times[i] = t;
        traj.gammas[i] = gamma;
        const Eigen::VectorXd raw = populations(gamma);
        for (int m = 0; m < n; ++m) {
            const double val =
                0.5 * (1.0 + (complexd(0.0, 1.0) * gamma(2 * m, 2 * m + 1)).real());
            traj.max_population_clip = std::max(
                traj.max_population_clip, std::max(-val, val - 1.0));
        }
        traj.populations.row(i) = raw.transpose();
        traj.rhs_norms[i] = lyapunov_rhs(c0, gamma).cwiseAbs().maxCoeff();

        if (!traj.steady_state_time && traj.rhs_norms[i] < opts.steady_rhs_tol) {
            if (++sustained >= opts.steady_sustain_steps)
                traj.steady_state_time = traj.times[i - opts.steady_sustain_steps + 1];
        } else if (!traj.steady_state_time) {
            sustained = 0;
        }

        if (i == points - 1) break;

        const LyapunovCoefficients ch = provider.at(t + 0.5 * dt);
        const LyapunovCoefficients c1 = provider.at(t + dt);
        const Eigen::MatrixXcd k1 = lyapunov_rhs(c0, gamma);
        const Eigen::MatrixXcd k2 = lyapunov_rhs(ch, gamma + 0.5 * dt * k1);
        const Eigen::MatrixXcd k3 = lyapunov_rhs(ch, gamma + 0.5 * dt * k2);
        const Eigen::MatrixXcd k4 = lyapunov_rhs(c1, gamma + dt * k3);
        gamma += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (opts.project_each_step) {
            const Eigen::MatrixXcd anti = 0.5 * (gamma - gamma.transpose().eval());
            const Eigen::MatrixXcd proj = 0.5 * (anti - anti.conjugate().eval());
            traj.max_projection_drift = std::max(
                traj.max_projection_drift, (gamma - proj).cwiseAbs().maxCoeff());
            gamma = proj;
        }

        const Eigen::VectorXd spectrum = covariance_spectrum(gamma);
        if (spectrum.minCoeff() < -1.0 - opts.physicality_tol ||
            spectrum.maxCoeff() > 1.0 + opts.physicality_tol)
            throw IntegrationError(
                "integrate_covariance: covariance spectrum left [-1, 1] at t = " +
                std::to_string(t + dt));
    }
    return traj;
}

RunResult run(RunMode mode, const RunSettings& settings) {
    settings.model.validate();
    settings.bath.validate();

    const NambuMatrix nambu = build_nambu(settings.model);
    const BogoliubovData bog =
        diagonalize_bogoliubov(nambu, settings.model.coupled_sites);
    const MajoranaGenerator gen = majorana_generator(settings.model);
    const int zeta = QuadraticModel::statistics_sign;

    const TwoTimeKernel bare = bare_correlation(settings.bath, settings.grid);
    const KeldyshComponents comps =
        keldysh_components(bare, zeta, settings.conventions);

    RunResult result;
    TwoTimeKernel dressed;
    if (mode == RunMode::Gme) {
        const TwoTimeKernel sigma = system_commutator(bog, settings.grid);
        const TwoTimeKernel sigma_t = self_energy(sigma, settings.conventions);
        DysonSolution sol = solve_dyson(sigma_t, comps, settings.dyson_tol,
                                        settings.max_order, zeta);
        result.dyson_deltas = sol.deltas;
        result.dyson_order = sol.order_reached;
        result.dyson_converged = sol.converged;
        dressed = std::move(sol.greater);
        if (settings.check_residual)
            result.fixed_point_residual =
                fixed_point_residual(dressed, sigma_t, comps, zeta);
    } else {
        dressed = comps.greater;  // k = 1 truncation
    }

    const MemoryIntegrand integrand = MemoryIntegrand::tabulate(bog, settings.grid);
    std::vector<Eigen::MatrixXcd> memory_grid(settings.grid.points());
    // Distinct time indices are independent.
#pragma omp parallel for schedule(static)
    for (int i = 0; i < settings.grid.points(); ++i)
        memory_grid[i] = memory_matrix(dressed, integrand, i);

    LyapunovProvider provider(std::move(memory_grid), gen, settings.grid);
    const Eigen::MatrixXcd gamma0 =
        settings.initial_gamma ? initial_covariance(*settings.initial_gamma)
                               : initial_covariance(settings.initial_state,
                                                    settings.model.n_modes);
    result.trajectory = integrate_covariance(gamma0, provider, settings.integration);
    if (settings.keep_kernel) result.dressed_kernel = std::move(dressed);
    return result;
}

}  // namespace gme
