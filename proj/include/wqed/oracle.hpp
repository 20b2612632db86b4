#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wqed/model.hpp"

// Independent brute-force validator: the even-mode Hamiltonian discretized
// on a momentum grid (linear dispersion is exact there; the emitter couples
// with equal strength Vbar sqrt(dk/2pi) to every mode), propagated in time
// through the scattering event.  Asymptotic per-mode amplitudes are then
// compared against the analytic kernels.

namespace wqed {

struct LatticeConfig {
    int m_modes = 96;                // floor; raised to meet the resolution rule
    double k_halfwidth_units = 12.0; // window halfwidth in units of delta
    double k_halfwidth_gamma = 4.0;  // extra halfwidth in units of Gamma
    int photon_cutoff = 1;           // 1..3
    double evolve_time = 0.0;        // 0 -> 8/Gamma + 6/delta
    double propagator_tol = 1e-8;
    double x0 = 0.0;                 // 0 -> -3/delta (initial packet center)
    bool allow_coarse = false;       // keep m_modes even if under-resolved

    // full window halfwidth: the configured Gaussian part plus a
    // Gamma-scaled skirt for the bound-cluster Lorentzian arms
    double k_halfwidth(const SystemParams& p, const GaussianPacket& pkt) const;
    // smallest mode count satisfying dk <= min(delta, Gamma)/4
    int resolved_modes(const SystemParams& p, const GaussianPacket& pkt) const;
};

// Truncated few-photon state over the momentum lattice: per excitation
// sector, photon-only multisets first, then (one fewer photon) x emitter
// excited.  The excitation number is conserved block by block.
class MomentumLattice {
  public:
    MomentumLattice(const LatticeConfig& cfg, const SystemParams& p,
                    const GaussianPacket& pkt);

    int modes() const { return m_; }
    double dk() const { return dk_; }
    double mode_k(int j) const { return kmin_ + (double(j) + 0.5) * dk_; }
    double coupling_g() const { return g_; }
    double evolve_time() const { return evolve_time_; }
    double packet_center() const { return x0_; }
    const SystemParams& params() const { return p_; }
    const GaussianPacket& packet() const { return pkt_; }

    int dim(int n_exc) const;
    int photon_dim(int n_photons) const;  // multiset count
    int pair_index(int i, int j) const;   // i <= j
    int triple_index(int i, int j, int l) const;

    // y = (H - n k0) x on the given excitation sector (the diagonal shift
    // keeps the propagator step long; the global phase is restored by the
    // caller)
    void apply_shifted(int n_exc, const std::vector<cplx>& x, std::vector<cplx>& y) const;
    // y = N x with N = photon number + emitter occupation
    void apply_number(int n_exc, const std::vector<cplx>& x, std::vector<cplx>& y) const;

    // phase-advanced incident product packet, unit norm
    std::vector<cplx> product_packet(int n_photons) const;
    // diagonal free phases exp(-i (sum k - n k0) t) of the photon block
    void free_evolve(int n_photons, double t, std::vector<cplx>& state) const;

    // discrete level-shift of the emitter seen at mode j (principal-value
    // remnant of the coupling sum; vanishes at the window center)
    double self_energy_shift(int j) const;

  private:
    int m_;
    double kmin_, dk_, g_;
    double evolve_time_, x0_;
    SystemParams p_;
    GaussianPacket pkt_;
    std::vector<int> off3_;
};

// e^{-i H_shifted T} v via Arnoldi steps; the reported error accumulates
// the per-step residual estimates.
struct PropagationResult {
    std::vector<cplx> state;
    double error_estimate = 0.0;
    int steps = 0;
};
PropagationResult propagate(const MomentumLattice& lat, int n_exc, std::vector<cplx> v,
                            double T, double tol);

struct OracleReport {
    int n = 1;
    int m_modes = 0;
    double dk = 0.0, evolve_time = 0.0, x0 = 0.0;
    double v = 0.0, gamma_prime = 0.0, delta = 0.0, k0 = 0.0, epsilon = 0.0;
    double rms_pw_deviation = 0.0;   // packet-weighted per-mode deviation from tbar
    double max_pw_deviation = 0.0;
    double rms_core_deviation = 0.0; // same, restricted to the packet bulk
    double bound_l2_rel = 0.0;       // n=2: extracted vs analytic bound part
    double norm_drift = 0.0;         // | ||psi||^2 - 1 | for the lossless case
    double final_norm_sq_1 = 0.0;    // final single-photon norm^2
    double final_norm_sq_2 = 0.0;    // final two-photon norm^2 (n = 2 runs)
    double edge_amplitude = 0.0;
    double propagator_error = 0.0;
    bool valid = true;
    std::string note;
};

// Propagates an n-photon packet (n = 1 or 2) through the emitter and
// compares the final mode amplitudes against the analytic even-space
// kernels; for n = 2 the plane-wave prediction uses the transmission
// measured photon-by-photon on the same grid, so the residual isolates
// the bound-cluster part.
OracleReport scatter_and_compare(int n, const GaussianPacket& pkt, const SystemParams& p,
                                 const LatticeConfig& cfg);

}  // namespace wqed
