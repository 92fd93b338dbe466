#include "gme/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

namespace gme {

double TwoTimeKernel::max_abs() const {
    const int p = points();
    double m = 0.0;
    for (int i = 0; i < p; ++i) {
        const int jmax = (domain_ == KernelDomain::LowerTriangle) ? i : p - 1;
        for (int j = 0; j <= jmax; ++j) {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    m = std::max(m, std::abs(at(a, b, i, j)));
        }
    }
    return m;
}

bool TwoTimeKernel::all_finite() const {
    const int p = points();
    for (int i = 0; i < p; ++i) {
        const int jmax = (domain_ == KernelDomain::LowerTriangle) ? i : p - 1;
        for (int j = 0; j <= jmax; ++j) {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (!std::isfinite(at(a, b, i, j).real()) ||
                        !std::isfinite(at(a, b, i, j).imag()))
                        return false;
        }
    }
    return true;
}

void TwoTimeKernel::clear_invalid_region() {
    if (domain_ == KernelDomain::Square) return;
    const int p = points();
    for (int i = 0; i + 1 < p; ++i)
        data_.block(2 * i, 2 * (i + 1), 2, 2 * (p - 1 - i)).setZero();
}

void require_same_grid(const TwoTimeKernel& a, const TwoTimeKernel& b,
                       const char* where) {
    if (a.grid() != b.grid())
        throw ValidationError(std::string(where) + ": kernel grids differ");
}

TwoTimeKernel bare_correlation(const SpectralDensity& sd, const TimeGrid& grid) {
    sd.validate();
    TwoTimeKernel c(grid);
    const int p = grid.points();
    // Stationary: value depends on t_i - t_j only.
    std::vector<double> row(p);
    for (int d = 0; d < p; ++d) row[d] = sd.correlation(grid.time(d));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            c.at(0, 1, i, j) = row[std::abs(i - j)];
    return c;
}

TwoTimeKernel system_commutator(const BogoliubovData& bog, const TimeGrid& grid) {
    const int n = bog.n_modes();
    const int p = grid.points();
    // σ(τ,s) = Σ_k [ P_k e^{-iω_k(τ-s)} + Q_k e^{+iω_k(τ-s)} ] with channel
    // matrices built from the coupling vectors; stationary in τ-s.
    std::vector<Eigen::Matrix2cd> by_lag(2 * p - 1);
    for (int d = -(p - 1); d <= p - 1; ++d) {
        const double lag = d * grid.dt();
        Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
        for (int k = 0; k < n; ++k) {
            const complexd phase = std::polar(1.0, -bog.energies(k) * lag);
            const complexd pc = std::conj(bog.phi(k)) * std::conj(bog.chi(k));
            const double p2 = std::norm(bog.phi(k));
            const double c2 = std::norm(bog.chi(k));
            Eigen::Matrix2cd P, Q;
            P << pc, c2, p2, bog.phi(k) * bog.chi(k);
            Q << pc, p2, c2, bog.phi(k) * bog.chi(k);
            m += P * phase + Q * std::conj(phase);
        }
        by_lag[d + p - 1] = m;
    }
    TwoTimeKernel sigma(grid);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            sigma.block(i, j) = by_lag[(i - j) + p - 1];
    return sigma;
}

TwoTimeKernel self_energy(const TwoTimeKernel& sigma, const KernelConventions& conv) {
    TwoTimeKernel out(sigma.grid());
    const int p = sigma.points();
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            if (j == i)
                out.block(i, i) = conv.theta_zero_self_energy * sigma.block(i, i);
            else
                out.block(i, j) = sigma.block(i, j);
        }
    }
    return out;
}

KeldyshComponents keldysh_components(const TwoTimeKernel& bare, int zeta,
                                     const KernelConventions& conv) {
    const int p = bare.points();
    KeldyshComponents out{TwoTimeKernel(bare.grid()), TwoTimeKernel(bare.grid()),
                          TwoTimeKernel(bare.grid())};
    out.greater = bare;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    out.lesser.at(a, b, i, j) =
                        static_cast<double>(zeta) * bare.at(b, a, j, i);
    const double th = conv.theta_zero_ordered;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i > j)
                out.ordered.block(i, j) = out.greater.block(i, j);
            else if (i < j)
                out.ordered.block(i, j) = out.lesser.block(i, j);
            else
                out.ordered.block(i, j) = th * out.greater.block(i, i) +
                                          (1.0 - th) * out.lesser.block(i, i);
        }
    }
    return out;
}

TwoTimeKernel effective_conjugate(const TwoTimeKernel& f, int zeta) {
    TwoTimeKernel out(f.grid(), f.domain());
    const int p = f.points();
    const double z = static_cast<double>(zeta);
    for (int i = 0; i < p; ++i) {
        const int jmax = (f.domain() == KernelDomain::LowerTriangle) ? i : p - 1;
        for (int j = 0; j <= jmax; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    out.at(a, b, i, j) = z * std::conj(f.at(1 - a, 1 - b, i, j));
    }
    return out;
}

void kernel_to_csv(const TwoTimeKernel& f, std::ostream& os) {
    os << "i,j,alpha,beta,re,im\n";
    char buf[128];
    const int p = f.points();
    for (int i = 0; i < p; ++i) {
        const int jmax = (f.domain() == KernelDomain::LowerTriangle) ? i : p - 1;
        for (int j = 0; j <= jmax; ++j) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const complexd v = f.at(a, b, i, j);
                    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.17g,%.17g\n",
                                  i, j, a + 1, b + 1, v.real(), v.imag());
                    os << buf;
                }
            }
        }
    }
}

}  // namespace gme
