#include "gme/dyson.hpp"

#include <algorithm>
#include <string>

namespace gme {

namespace {

constexpr int kPanelBlocks = 64;

// Causally masked, trapezoid-weighted copy: row block i keeps column blocks
// j <= i scaled by the weights of ∫_0^{t_i}; row block 0 (empty integral) is
// zero.
Eigen::MatrixXcd weighted_mask(const Eigen::MatrixXcd& src, const TimeGrid& g) {
    const int p = g.points();
    const double dt = g.dt();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * p, 2 * p);
    for (int i = 1; i < p; ++i) {
        out.block(2 * i, 0, 2, 2 * (i + 1)) =
            dt * src.block(2 * i, 0, 2, 2 * (i + 1));
        out.block(2 * i, 0, 2, 2) *= 0.5;
        out.block(2 * i, 2 * i, 2, 2) *= 0.5;
    }
    return out;
}

// out = A * B in row panels, exploiting that A's row block i is supported on
// column blocks <= i. With triangular_out only the columns up to the panel end
// are formed; the caller masks or clears anything past the diagonal.
void panel_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                   Eigen::MatrixXcd& out, int p, bool triangular_out) {
    out.setZero(2 * p, 2 * p);
    for (int i0 = 1; i0 < p; i0 += kPanelBlocks) {
        const int i1 = std::min(p, i0 + kPanelBlocks);
        const int support = 2 * i1;
        const int ncols = triangular_out ? 2 * i1 : 2 * p;
        out.block(2 * i0, 0, 2 * (i1 - i0), ncols).noalias() =
            a.block(2 * i0, 0, 2 * (i1 - i0), support) * b.block(0, 0, support, ncols);
    }
}

}  // namespace

TwoTimeKernel compose(const TwoTimeKernel& x, const TwoTimeKernel& s,
                      const TwoTimeKernel& z, KernelDomain out_domain) {
    require_same_grid(x, s, "compose");
    require_same_grid(x, z, "compose");
    if (s.domain() != KernelDomain::Square || z.domain() != KernelDomain::Square)
        throw ValidationError("compose: middle and right kernels must be square-valid");

    const TimeGrid& g = x.grid();
    const int p = g.points();

    Eigen::MatrixXcd xw = weighted_mask(x.data(), g);
    Eigen::MatrixXcd inner;
    panel_product(xw, s.data(), inner, p, /*triangular_out=*/true);
    Eigen::MatrixXcd innerw = weighted_mask(inner, g);

    TwoTimeKernel out(g, out_domain);
    panel_product(innerw, z.data(), out.data(), p,
                  out_domain == KernelDomain::LowerTriangle);
    out.clear_invalid_region();
    return out;
}

TwoTimeKernel dyson_step(const TwoTimeKernel& g_prev, const TwoTimeKernel& sigma_t,
                         const TwoTimeKernel& c_ordered,
                         const TwoTimeKernel& c_greater, int zeta) {
    TwoTimeKernel term =
        compose(g_prev, sigma_t, c_ordered, KernelDomain::LowerTriangle);
    const TwoTimeKernel conj_prev = effective_conjugate(g_prev, zeta);
    const TwoTimeKernel cross =
        compose(conj_prev, sigma_t, c_greater, KernelDomain::LowerTriangle);
    term.data() -= cross.data();
    return term;
}

namespace {

// Lower-triangle restriction of a square-valid kernel; series terms and their
// sum live on this domain.
TwoTimeKernel lower_triangle_copy(const TwoTimeKernel& src) {
    TwoTimeKernel out(src.grid(), KernelDomain::LowerTriangle);
    const int p = src.points();
    for (int i = 0; i < p; ++i)
        out.data().block(2 * i, 0, 2, 2 * (i + 1)) =
            src.data().block(2 * i, 0, 2, 2 * (i + 1));
    return out;
}

}  // namespace

DysonSolution solve_dyson(const TwoTimeKernel& sigma_t, const KeldyshComponents& c,
                          double tol, int max_order, int zeta) {
    if (!(tol > 0.0)) throw ValidationError("solve_dyson: tol must be > 0");
    if (max_order < 1) throw ValidationError("solve_dyson: max_order must be >= 1");

    DysonSolution sol;
    sol.greater = lower_triangle_copy(c.greater);
    sol.order_reached = 1;

    TwoTimeKernel term = sol.greater;
    while (true) {
        TwoTimeKernel next = dyson_step(term, sigma_t, c.ordered, c.greater, zeta);
        if (!next.all_finite())
            throw DivergenceError("solve_dyson: series term " +
                                      std::to_string(sol.order_reached + 1) +
                                      " is not finite",
                                  sol.order_reached + 1);
        const double delta = next.max_abs();
        sol.deltas.push_back(delta);
        if (delta < tol) {
            sol.converged = true;
            break;
        }
        if (sol.order_reached >= max_order) break;  // flagged, not an error
        sol.greater.data() += next.data();
        ++sol.order_reached;
        term = std::move(next);
    }
    return sol;
}

double fixed_point_residual(const TwoTimeKernel& g, const TwoTimeKernel& sigma_t,
                            const KeldyshComponents& c, int zeta) {
    TwoTimeKernel rhs = compose(g, sigma_t, c.ordered, KernelDomain::LowerTriangle);
    const TwoTimeKernel gc = effective_conjugate(g, zeta);
    const TwoTimeKernel cross =
        compose(gc, sigma_t, c.greater, KernelDomain::LowerTriangle);
    rhs.data() -= cross.data();

    const int p = g.points();
    double defect = 0.0;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    defect = std::max(defect,
                                      std::abs(g.at(a, b, i, j) - c.greater.at(a, b, i, j) -
                                               rhs.at(a, b, i, j)));
        }
    }
    return defect;
}

}  // namespace gme
