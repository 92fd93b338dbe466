#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "gme/errors.hpp"

namespace gme {

using complexd = std::complex<double>;

// Quadratic fermionic Hamiltonian
//   H = Σ_{nm} [ J_{nm} a†_n a_m + (1/2) Δ_{nm} a†_n a†_m - (1/2) Δ*_{nm} a_n a_m ]
// with J Hermitian and Δ antisymmetric, plus the set of sites coupled to the bath.
struct QuadraticModel {
    int n_modes{0};
    Eigen::MatrixXcd hopping;         // J
    Eigen::MatrixXcd pairing;         // Δ
    std::vector<int> coupled_sites;   // 0-based, non-empty

    // Fermionic statistics sign; the pipeline is built for this case only.
    static constexpr int statistics_sign = -1;

    void validate(double tol = 1e-10) const;
};

// Doubled single-particle matrix [[J, Δ],[Δ†, -Jᵀ]]; Hermitian, spectrum ±ω.
struct NambuMatrix {
    Eigen::MatrixXcd bdg;
    int n_modes() const { return static_cast<int>(bdg.rows()) / 2; }
};

// Quasiparticle data from the Nambu diagonalization:
//   a_n = Σ_k [ u_{nk} b_k + v_{nk} b†_k ],  H = Σ_k ω_k b†_k b_k + const.
// uv_sum = u + conj(v) and uv_diff = u - conj(v) enter the Majorana transform;
// phi/chi are the bath-coupling vectors summed over the coupled sites.
struct BogoliubovData {
    Eigen::VectorXd energies;   // ω_k ≥ 0, ascending
    Eigen::MatrixXcd u;
    Eigen::MatrixXcd v;
    Eigen::MatrixXcd uv_sum;
    Eigen::MatrixXcd uv_diff;
    Eigen::VectorXcd phi;
    Eigen::VectorXcd chi;
    int n_coupled{0};

    int n_modes() const { return static_cast<int>(energies.size()); }
    // [[u, v],[conj(v), conj(u)]]; unitary, diagonalizes the Nambu matrix.
    Eigen::MatrixXcd unitary() const;
};

// Quadratic generator in the Majorana basis, H = Σ_{ij} h_{ij} w_i w_j with
// w_{2n-1} = (a†_n + a_n)/√2, w_{2n} = i(a†_n - a_n)/√2, {w_i, w_j} = δ_ij.
// h is pure imaginary antisymmetric; omega is the structure matrix (identity
// for fermions).
struct MajoranaGenerator {
    Eigen::MatrixXcd h;
    Eigen::MatrixXd omega;
};

NambuMatrix build_nambu(const QuadraticModel& model);

// Extracts quasiparticle energies and amplitudes from the Nambu matrix.
// Eigenvector phases are fixed (largest component real positive) so that the
// returned amplitudes are deterministic. Throws NumericalError when some
// |ω_k| falls below degeneracy_tol relative to the spectral scale, where the
// particle/hole pairing of eigenvectors becomes ambiguous.
BogoliubovData diagonalize_bogoliubov(const NambuMatrix& nambu,
                                      const std::vector<int>& coupled_sites,
                                      double degeneracy_tol = 1e-10);

MajoranaGenerator majorana_generator(const QuadraticModel& model);

// Interaction-picture coupling coefficients: row 0 holds the expansion of
// A†(t) over Majorana operators, row 1 the expansion of A(t) = conj(row 0),
// where A = Σ_{n∈coupled} a_n. Valid for any real t (memory integrals use
// negative arguments).
Eigen::MatrixXcd interaction_coefficients(const BogoliubovData& bog, double t);

enum class StateSpec { Vacuum, FullyOccupied, BellPair };

// Covariance matrix Γ_{ij} = <w_i w_j - w_j w_i> of a few named Gaussian
// states. BellPair entangles modes 1 and 2 as (|00> + |11>)/√2 and leaves any
// further modes empty.
Eigen::MatrixXcd initial_covariance(StateSpec spec, int n_modes);

// Validates a caller-supplied covariance matrix (pure imaginary antisymmetric,
// spectrum within [-1, 1]) and returns it.
Eigen::MatrixXcd initial_covariance(const Eigen::MatrixXcd& gamma,
                                    double tol = 1e-9);

// Spectrum of the (Hermitian) covariance matrix; physical states have all
// eigenvalues in [-1, 1].
Eigen::VectorXd covariance_spectrum(const Eigen::MatrixXcd& gamma);

}  // namespace gme
