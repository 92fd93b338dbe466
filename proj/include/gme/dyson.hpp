#pragma once

#include <vector>

#include "gme/kernels.hpp"

namespace gme {

// Converged (or truncated) series solution of the dressed-kernel equation
//   G^> = C^> + G^> · Σ^T · C^T - [G^>]^c · Σ^T · C^>.
// greater accumulates the series terms on the lower triangle t_j <= t_i, the
// region consumed by the memory integrals. deltas[k-1] holds Δ(k), the largest
// entry magnitude of the (k+1)-th term; the run stops once Δ(k) < tol or at
// max_order (then converged = false).
struct DysonSolution {
    TwoTimeKernel greater;
    int order_reached{0};
    bool converged{false};
    std::vector<double> deltas;
};

// Double-trapezoid kernel composition
//   (X·S·Z)(t_i, t_j) = ∫_0^{t_i} ds1 ∫_0^{t_i} ds2  X(t_i,s1) S(s1,s2) Z(s2,t_j)
// with the 2x2 channel contraction as a matrix product chain. X is consumed on
// its lower triangle only; S and Z must be square-valid. The inner contraction
// is precomputed once per row panel and reused across the outer time index,
// which keeps the cost at O(points^3) per call.
TwoTimeKernel compose(const TwoTimeKernel& x, const TwoTimeKernel& s,
                      const TwoTimeKernel& z,
                      KernelDomain out_domain = KernelDomain::Square);

// Next series term: G_k = G_{k-1} · Σ^T · C^T - [G_{k-1}]^c · Σ^T · C^>.
// Each term carries two more powers of the system-environment coupling than
// the previous one.
TwoTimeKernel dyson_step(const TwoTimeKernel& g_prev, const TwoTimeKernel& sigma_t,
                         const TwoTimeKernel& c_ordered,
                         const TwoTimeKernel& c_greater, int zeta);

// Accumulates series terms starting from C^> until Δ(k) < tol or max_order is
// reached. Throws DivergenceError when a term stops being finite.
DysonSolution solve_dyson(const TwoTimeKernel& sigma_t, const KeldyshComponents& c,
                          double tol, int max_order, int zeta);

// Max-norm defect of the single-equation fixed point over the lower triangle;
// an independent consistency check on a candidate solution.
double fixed_point_residual(const TwoTimeKernel& g, const TwoTimeKernel& sigma_t,
                            const KeldyshComponents& c, int zeta);

}  // namespace gme
