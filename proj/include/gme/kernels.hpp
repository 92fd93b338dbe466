#pragma once

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>

#include "gme/quadratic_model.hpp"
#include "gme/time_grid.hpp"

namespace gme {

// Region of the (t_i, t_j) square on which a kernel's entries are meaningful.
// Storage is always the dense square; series terms of the Dyson solution are
// only defined for t_j <= t_i.
enum class KernelDomain { Square, LowerTriangle };

// Complex kernel F_{αβ}(t_i, t_j) with a 2x2 operator-channel index pair on a
// uniform two-time grid. Channel 0 pairs with A†/B, channel 1 with A/B†.
// Stored interleaved: matrix row 2i+α, column 2j+β.
class TwoTimeKernel {
public:
    TwoTimeKernel() = default;
    TwoTimeKernel(const TimeGrid& grid, KernelDomain domain = KernelDomain::Square)
        : grid_(grid),
          domain_(domain),
          data_(Eigen::MatrixXcd::Zero(2 * grid.points(), 2 * grid.points())) {}

    const TimeGrid& grid() const { return grid_; }
    KernelDomain domain() const { return domain_; }
    void set_domain(KernelDomain d) { domain_ = d; }
    int points() const { return grid_.points(); }

    complexd& at(int alpha, int beta, int i, int j) {
        return data_(2 * i + alpha, 2 * j + beta);
    }
    complexd at(int alpha, int beta, int i, int j) const {
        return data_(2 * i + alpha, 2 * j + beta);
    }

    Eigen::MatrixXcd& data() { return data_; }
    const Eigen::MatrixXcd& data() const { return data_; }

    Eigen::Block<Eigen::MatrixXcd, 2, 2> block(int i, int j) {
        return data_.block<2, 2>(2 * i, 2 * j);
    }
    Eigen::Block<const Eigen::MatrixXcd, 2, 2> block(int i, int j) const {
        return data_.block<2, 2>(2 * i, 2 * j);
    }

    // Largest entry magnitude over the valid domain.
    double max_abs() const;
    bool all_finite() const;

    // Zeroes the entries outside the valid domain (no-op for Square).
    void clear_invalid_region();

private:
    TimeGrid grid_{};
    KernelDomain domain_{KernelDomain::Square};
    Eigen::MatrixXcd data_;
};

void require_same_grid(const TwoTimeKernel& a, const TwoTimeKernel& b,
                       const char* where);

// Lorentzian environment: correlation c(t) = (γλ/2) e^{-λ|t|}, spectral
// density γλ²/(2π(ω² + λ²)). γ = 0 is the decoupled limit and is accepted.
struct SpectralDensity {
    double gamma{0.0};
    double lambda{1.0};

    void validate() const {
        if (!(gamma >= 0.0)) throw ValidationError("SpectralDensity: gamma must be >= 0");
        if (!(lambda > 0.0)) throw ValidationError("SpectralDensity: lambda must be > 0");
    }
    double correlation(double t) const {
        return 0.5 * gamma * lambda * std::exp(-lambda * std::abs(t));
    }
    double density(double w) const {
        return gamma * lambda * lambda / (2.0 * M_PI * (w * w + lambda * lambda));
    }
};

// Equal-time step-function conventions. The self-energy uses strict contour
// precedence (θ(0) = 0); the time-ordered correlation averages the greater and
// lesser branches (θ(0) = 1/2).
struct KernelConventions {
    double theta_zero_ordered{0.5};
    double theta_zero_self_energy{0.0};
};

// Bare environment correlation: channel (A†, A) entry c(t_i - t_j), all other
// channel pairs zero.
TwoTimeKernel bare_correlation(const SpectralDensity& sd, const TimeGrid& grid);

// Equal-statistics anticommutator kernel σ_{αβ}(τ, s) of the interaction-
// picture coupling operators, from the quasiparticle closed form.
TwoTimeKernel system_commutator(const BogoliubovData& bog, const TimeGrid& grid);

// Σ^T(τ, s) = θ(s - τ) σ(τ, s) with the strict θ(0) convention.
TwoTimeKernel self_energy(const TwoTimeKernel& sigma,
                          const KernelConventions& conv = {});

struct KeldyshComponents {
    TwoTimeKernel greater;   // C^>(τ,s) = c(τ,s)
    TwoTimeKernel lesser;    // C^<_{αβ}(τ,s) = ζ c_{βα}(s,τ)
    TwoTimeKernel ordered;   // C^T = θ(τ-s) C^> + θ(s-τ) C^<
};

KeldyshComponents keldysh_components(const TwoTimeKernel& bare, int zeta,
                                     const KernelConventions& conv = {});

// [F]^c_{αβ} = ζ conj(F_{ᾱβ̄}) with the channel bar 0 <-> 1; an involution.
TwoTimeKernel effective_conjugate(const TwoTimeKernel& f, int zeta);

// Debug dump, columns: i, j, alpha, beta, re, im (channels printed 1-based).
void kernel_to_csv(const TwoTimeKernel& f, std::ostream& os);

}  // namespace gme
