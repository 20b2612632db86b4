#pragma once

#include <span>
#include <vector>

#include "wqed/model.hpp"

// Exact real-space n-photon scattering eigenstates of the even-mode
// problem: symmetrized plane-wave pathways plus exponentially localized
// multi-photon bound clusters, with the emitter amplitude obtained from
// the discontinuity of the photon amplitude at the origin.  Everything
// here is a pure closed-form evaluation; the step function uses the
// midpoint convention theta(0) = 1/2 throughout.

namespace wqed {

// h_k(x) = e^{ikx} / sqrt(2 pi)
cplx plane_wave(double k, double x);

// Single-photon piece g_k(x) = h_k(x) [theta(-x) + tbar_k theta(x)].
cplx scattered_wave(double k, double x, const SystemParams& p);

// n-body bound cluster, n = 2..5:
//   -(-2)^(n-2) prod_i (tbar_{k_i}-1) prod_i theta(x_{i+1}-x_i)
//   * h_{k_1}(x_n) h_{k_2}(x_2) ... h_{k_{n-1}}(x_{n-1}) h_{k_n}(x_n)
//   * exp[(-Gamma/2 - i epsilon) |x_n - x_1|]
// Zero whenever the ordering product vanishes.  The momentum-to-position
// slot assignment matters only up to a relabeling once the cluster is
// summed over momentum permutations, which is the only way it enters the
// eigenstates.
cplx bound_state(std::span<const double> ks, std::span<const double> xs,
                 const SystemParams& p);

// Full photon amplitude g_n(x_1..x_n) for n = 1..4, including all bound
// cluster terms and the 1/n! normalization.  Positions must avoid 0.
cplx eigenstate_g(std::span<const double> ks, std::span<const double> xs,
                  const SystemParams& p);

// Emitter amplitude e_n(x_1..x_{n-1}) = (n i / Vbar) [g_n(0+, xs) - g_n(0-, xs)],
// computed from one-sided limits with Richardson extrapolation.
// Requires V > 0; |xs| = n-1 (empty for n = 1).
cplx eigenstate_e(std::span<const double> ks, std::span<const double> xs,
                  const SystemParams& p);

// One-sided limit of g_n as its first argument approaches 0 from the
// given side, the remaining positions held fixed.
cplx eigenstate_g_limit(std::span<const double> ks, std::span<const double> xs_rest,
                        const SystemParams& p, int side);

// Value of g_n with one position exactly at the origin: the average of
// the two one-sided limits, taken at +-eta.  eta = 0 picks the default
// 1e-10 / Gamma.
cplx midpoint_value(std::span<const double> ks, std::span<const double> xs,
                    const SystemParams& p, double eta = 0.0);

// Normalized finite-difference residual of the free evolution equation
// at an interior point: |[-i (d1+..+dn) - E] g_n| / (|g_n| + floor),
// using a 4th-order stencil along the diagonal direction (the bound-state
// kinks are constant along it).  Rejects stencils that straddle x_i = 0
// or a coincidence x_i = x_j.
double schrodinger_residual(std::span<const double> ks, std::span<const double> xs,
                            const SystemParams& p, double h);

// All permutations of {0..n-1}, in lexicographic order.
std::vector<std::vector<int>> permutations(int n);

}  // namespace wqed
