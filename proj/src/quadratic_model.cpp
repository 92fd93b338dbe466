#include "gme/quadratic_model.hpp"

#include <algorithm>
#include <cmath>

namespace gme {

namespace {
constexpr complexd I{0.0, 1.0};
}

void QuadraticModel::validate(double tol) const {
    if (n_modes < 1) throw ValidationError("QuadraticModel: n_modes must be >= 1");
    if (hopping.rows() != n_modes || hopping.cols() != n_modes)
        throw ValidationError("QuadraticModel: hopping matrix must be n_modes x n_modes");
    if (pairing.rows() != n_modes || pairing.cols() != n_modes)
        throw ValidationError("QuadraticModel: pairing matrix must be n_modes x n_modes");
    const double scale = std::max(1.0, std::max(hopping.cwiseAbs().maxCoeff(),
                                                pairing.cwiseAbs().maxCoeff()));
    if ((hopping - hopping.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw ValidationError("QuadraticModel: hopping matrix must be Hermitian");
    if ((pairing + pairing.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        throw ValidationError("QuadraticModel: pairing matrix must be antisymmetric");
    if (coupled_sites.empty())
        throw ValidationError("QuadraticModel: coupled_sites must be non-empty");
    for (int s : coupled_sites) {
        if (s < 0 || s >= n_modes)
            throw ValidationError("QuadraticModel: coupled site index out of range");
    }
}

NambuMatrix build_nambu(const QuadraticModel& model) {
    model.validate();
    const int n = model.n_modes;
    Eigen::MatrixXcd bdg(2 * n, 2 * n);
    bdg.topLeftCorner(n, n) = model.hopping;
    bdg.topRightCorner(n, n) = model.pairing;
    bdg.bottomLeftCorner(n, n) = model.pairing.adjoint();
    bdg.bottomRightCorner(n, n) = -model.hopping.transpose();
    return NambuMatrix{std::move(bdg)};
}

Eigen::MatrixXcd BogoliubovData::unitary() const {
    const int n = n_modes();
    Eigen::MatrixXcd U(2 * n, 2 * n);
    U.topLeftCorner(n, n) = u;
    U.topRightCorner(n, n) = v;
    U.bottomLeftCorner(n, n) = v.conjugate();
    U.bottomRightCorner(n, n) = u.conjugate();
    return U;
}

BogoliubovData diagonalize_bogoliubov(const NambuMatrix& nambu,
                                      const std::vector<int>& coupled_sites,
                                      double degeneracy_tol) {
    const int n = nambu.n_modes();
    if (nambu.bdg.rows() != 2 * n || nambu.bdg.cols() != 2 * n || n < 1)
        throw ValidationError("diagonalize_bogoliubov: malformed Nambu matrix");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(nambu.bdg);
    if (solver.info() != Eigen::Success)
        throw NumericalError("diagonalize_bogoliubov: eigensolver failed");

    // Eigenvalues ascending: the upper half are the quasiparticle energies.
    const Eigen::VectorXd evals = solver.eigenvalues();
    const double scale = std::max(evals.cwiseAbs().maxCoeff(), 1e-300);
    for (int k = 0; k < n; ++k) {
        if (std::abs(evals(n + k)) < degeneracy_tol * scale)
            throw NumericalError(
                "diagonalize_bogoliubov: quasiparticle energy too close to zero; "
                "particle/hole eigenvector pairing is ambiguous");
    }

    BogoliubovData out;
    out.energies = evals.tail(n);
    out.u.resize(n, n);
    out.v.resize(n, n);
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXcd col = solver.eigenvectors().col(n + k);
        // Deterministic gauge: largest-magnitude component real positive.
        int imax = 0;
        double amax = 0.0;
        for (int i = 0; i < 2 * n; ++i) {
            const double a = std::abs(col(i));
            if (a > amax) { amax = a; imax = i; }
        }
        col *= std::conj(col(imax)) / std::abs(col(imax));
        out.u.col(k) = col.head(n);
        out.v.col(k) = col.tail(n).conjugate();
    }
    out.uv_sum = out.u + out.v.conjugate();
    out.uv_diff = out.u - out.v.conjugate();

    out.n_coupled = static_cast<int>(coupled_sites.size());
    out.phi = Eigen::VectorXcd::Zero(n);
    out.chi = Eigen::VectorXcd::Zero(n);
    for (int s : coupled_sites) {
        if (s < 0 || s >= n)
            throw ValidationError("diagonalize_bogoliubov: coupled site out of range");
        out.phi += out.u.row(s).transpose();
        out.chi += out.v.row(s).transpose();
    }
    return out;
}

MajoranaGenerator majorana_generator(const QuadraticModel& model) {
    model.validate();
    const int n = model.n_modes;
    MajoranaGenerator gen;
    gen.h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    gen.omega = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    // 2x2 block per mode pair in the Im/Re parts of J and Δ. The i/2 prefactor
    // matches the normalization {w_i, w_j} = δ_ij; validated against exact
    // closed-system evolution.
    for (int m = 0; m < n; ++m) {
        for (int p = 0; p < n; ++p) {
            const complexd J = model.hopping(m, p);
            const complexd D = model.pairing(m, p);
            gen.h(2 * m, 2 * p) = 0.5 * I * (J.imag() + D.imag());
            gen.h(2 * m, 2 * p + 1) = 0.5 * I * (J.real() - D.real());
            gen.h(2 * m + 1, 2 * p) = 0.5 * I * (-J.real() - D.real());
            gen.h(2 * m + 1, 2 * p + 1) = 0.5 * I * (J.imag() - D.imag());
        }
    }
    return gen;
}

Eigen::MatrixXcd interaction_coefficients(const BogoliubovData& bog, double t) {
    const int n = bog.n_modes();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2, 2 * n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int m = 0; m < n; ++m) {
        complexd even{0.0, 0.0};
        complexd odd{0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            const complexd e_minus = std::polar(1.0, -bog.energies(k) * t);
            const complexd e_plus = std::conj(e_minus);
            even += std::conj(bog.uv_sum(m, k)) * std::conj(bog.chi(k)) * e_minus +
                    bog.uv_sum(m, k) * std::conj(bog.phi(k)) * e_plus;
            odd += std::conj(bog.uv_diff(m, k)) * std::conj(bog.chi(k)) * e_minus -
                   bog.uv_diff(m, k) * std::conj(bog.phi(k)) * e_plus;
        }
        A(0, 2 * m) = inv_sqrt2 * even;
        A(0, 2 * m + 1) = I * inv_sqrt2 * odd;
    }
    A.row(1) = A.row(0).conjugate();
    return A;
}

Eigen::MatrixXcd initial_covariance(StateSpec spec, int n_modes) {
    if (n_modes < 1) throw ValidationError("initial_covariance: n_modes must be >= 1");
    Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Zero(2 * n_modes, 2 * n_modes);
    switch (spec) {
        case StateSpec::Vacuum:
            for (int m = 0; m < n_modes; ++m) {
                gamma(2 * m, 2 * m + 1) = I;
                gamma(2 * m + 1, 2 * m) = -I;
            }
            break;
        case StateSpec::FullyOccupied:
            for (int m = 0; m < n_modes; ++m) {
                gamma(2 * m, 2 * m + 1) = -I;
                gamma(2 * m + 1, 2 * m) = I;
            }
            break;
        case StateSpec::BellPair: {
            if (n_modes < 2)
                throw ValidationError("initial_covariance: bell-pair needs >= 2 modes");
            // (|00> + |11>)/√2 on modes 1,2: populations 1/2, pairing block
            // from <a_1 a_2> = -1/2.
            gamma(0, 3) = I; gamma(3, 0) = -I;
            gamma(1, 2) = I; gamma(2, 1) = -I;
            for (int m = 2; m < n_modes; ++m) {
                gamma(2 * m, 2 * m + 1) = I;
                gamma(2 * m + 1, 2 * m) = -I;
            }
            break;
        }
    }
    return gamma;
}

Eigen::VectorXd covariance_spectrum(const Eigen::MatrixXcd& gamma) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gamma, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("covariance_spectrum: eigensolver failed");
    return solver.eigenvalues();
}

Eigen::MatrixXcd initial_covariance(const Eigen::MatrixXcd& gamma, double tol) {
    if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0 || gamma.rows() == 0)
        throw ValidationError("initial_covariance: matrix must be square with even size");
    const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
    if ((gamma + gamma.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        throw ValidationError("initial_covariance: matrix must be antisymmetric");
    if ((gamma + gamma.conjugate()).cwiseAbs().maxCoeff() > tol * scale)
        throw ValidationError("initial_covariance: matrix must be pure imaginary");
    const Eigen::VectorXd spectrum = covariance_spectrum(gamma);
    if (spectrum.minCoeff() < -1.0 - tol || spectrum.maxCoeff() > 1.0 + tol)
        throw ValidationError("initial_covariance: spectrum outside [-1, 1]");
    return gamma;
}

}  // namespace gme
