#include "gme/oracle.hpp"

#include <cmath>

#include "gme/propagator.hpp"

namespace gme {

DiscreteBath discretize_bath(const SpectralDensity& sd, int n_modes, double window) {
    sd.validate();
    if (n_modes < 2) throw ValidationError("discretize_bath: need at least 2 modes");
    if (!(window > 0.0)) throw ValidationError("discretize_bath: window must be > 0");
    DiscreteBath bath;
    bath.window = window;
    bath.frequencies.resize(n_modes);
    bath.couplings.resize(n_modes);
    const double de = 2.0 * window / n_modes;
    for (int r = 0; r < n_modes; ++r) {
        bath.frequencies(r) = -window + (r + 0.5) * de;
        bath.couplings(r) = std::sqrt(sd.density(bath.frequencies(r)) * de);
    }
    return bath;
}

double recurrence_horizon(const DiscreteBath& bath) {
    return 2.0 * M_PI / bath.spacing();
}

double bath_reconstruction_error(const DiscreteBath& bath, const SpectralDensity& sd,
                                 const TimeGrid& grid) {
    double worst = 0.0;
    for (int i = 0; i < grid.points(); ++i) {
        const double t = grid.time(i);
        complexd sum{0.0, 0.0};
        for (int r = 0; r < bath.n_modes(); ++r)
            sum += bath.couplings(r) * bath.couplings(r) *
                   std::polar(1.0, -bath.frequencies(r) * t);
        worst = std::max(worst, std::abs(sum - sd.correlation(t)));
    }
    return worst;
}

QuadraticModel extended_model(const QuadraticModel& model, const DiscreteBath& bath) {
    model.validate();
    const int n = model.n_modes;
    const int nb = bath.n_modes();
    QuadraticModel full;
    full.n_modes = n + nb;
    full.hopping = Eigen::MatrixXcd::Zero(n + nb, n + nb);
    full.pairing = Eigen::MatrixXcd::Zero(n + nb, n + nb);
    full.hopping.topLeftCorner(n, n) = model.hopping;
    full.pairing.topLeftCorner(n, n) = model.pairing;
    for (int r = 0; r < nb; ++r) {
        full.hopping(n + r, n + r) = bath.frequencies(r);
        for (int s : model.coupled_sites) {
            full.hopping(s, n + r) = bath.couplings(r);
            full.hopping(n + r, s) = bath.couplings(r);
        }
    }
    full.coupled_sites = model.coupled_sites;
    return full;
}

namespace {

struct FullFlow {
    Eigen::VectorXd evals;        // eigenvalues of h_full
    Eigen::MatrixXcd vectors;     // columns: eigenvectors
    Eigen::MatrixXcd gamma0_eig;  // V† Γ(0) V
    int n_system;
};

FullFlow prepare_flow(const QuadraticModel& model, const DiscreteBath& bath,
                      const Eigen::MatrixXcd& gamma_system0) {
    const QuadraticModel full = extended_model(model, bath);
    const MajoranaGenerator gen = majorana_generator(full);

    const int n = model.n_modes;
    const int m = full.n_modes;
    if (gamma_system0.rows() != 2 * n || gamma_system0.cols() != 2 * n)
        throw ValidationError("exact_evolve: system covariance has wrong size");

    Eigen::MatrixXcd gamma0 = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
    gamma0.topLeftCorner(2 * n, 2 * n) = initial_covariance(gamma_system0);
    gamma0.bottomRightCorner(2 * (m - n), 2 * (m - n)) =
        initial_covariance(StateSpec::Vacuum, m - n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gen.h);
    if (solver.info() != Eigen::Success)
        throw NumericalError("exact_evolve: eigensolver failed on the full generator");

    FullFlow flow;
    flow.evals = solver.eigenvalues();
    flow.vectors = solver.eigenvectors();
    flow.gamma0_eig = flow.vectors.adjoint() * gamma0 * flow.vectors;
    flow.n_system = n;
    return flow;
}

// Γ(t) = e^{Xt} Γ(0) e^{Xᵀt} with X = -2i h; in the eigenbasis of h the flow
// is a phase rotation, so each output time is a pair of thin products.
Eigen::MatrixXcd system_block_at(const FullFlow& flow, double t) {
    const int dim = static_cast<int>(flow.evals.size());
    const int ns = 2 * flow.n_system;
    Eigen::VectorXcd phases(dim);
    for (int k = 0; k < dim; ++k) phases(k) = std::polar(1.0, -2.0 * flow.evals(k) * t);
    Eigen::MatrixXcd left = flow.vectors.topRows(ns) * phases.asDiagonal();
    return left * flow.gamma0_eig * left.adjoint();
}

}  // namespace

OracleResult exact_evolve(const QuadraticModel& model, const DiscreteBath& bath,
                          const Eigen::MatrixXcd& gamma_system0, const TimeGrid& grid) {
    const FullFlow flow = prepare_flow(model, bath, gamma_system0);

    OracleResult out;
    out.times.resize(grid.points());
    out.system_gammas.resize(grid.points());
    out.populations.resize(grid.points(), model.n_modes);
    for (int i = 0; i < grid.points(); ++i) {
        out.times[i] = grid.time(i);
        Eigen::MatrixXcd sys = system_block_at(flow, out.times[i]);
        // Exact flow preserves the structure; trim rounding noise.
        sys = 0.5 * (sys - sys.transpose().eval());
        sys = 0.5 * (sys - sys.conjugate().eval());
        out.populations.row(i) = populations(sys).transpose();
        out.system_gammas[i] = std::move(sys);
    }
    return out;
}

Eigen::MatrixXcd exact_full_covariance(const QuadraticModel& model,
                                       const DiscreteBath& bath,
                                       const Eigen::MatrixXcd& gamma_system0,
                                       double t) {
    const FullFlow flow = prepare_flow(model, bath, gamma_system0);
    const int dim = static_cast<int>(flow.evals.size());
    Eigen::VectorXcd phases(dim);
    for (int k = 0; k < dim; ++k) phases(k) = std::polar(1.0, -2.0 * flow.evals(k) * t);
    const Eigen::MatrixXcd rot = flow.vectors * phases.asDiagonal();
    return rot * flow.gamma0_eig * rot.adjoint();
}

}  // namespace gme
