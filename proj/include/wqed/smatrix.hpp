#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "wqed/model.hpp"
#include "wqed/quadrature.hpp"
#include "wqed/spline.hpp"

// Wavepacket-convolved momentum-space output amplitudes for 1..3 incident
// right-going photons, per outcome sector (every pattern of transmitted /
// reflected photons), decomposed into the independent plane-wave pathway
// and the bound-cluster pathways.
//
// All amplitudes are smooth functions of positive momentum magnitudes;
// left-going photons are reported by the magnitude of their (negative)
// lab-frame momentum.  A sector amplitude is a sum over partitions of the
// outgoing photons into singles, one pair cluster, or one triple cluster:
// singles carry alpha(k) t_k (right) or alpha(m) r_m (left), a pair
// carries the kernel B(p1,p2), a triple the kernel W(p1,p2,p3); cluster
// kernels are species-independent because the clusters live purely in the
// even mode.

namespace wqed {

struct SectorLabel {
    int n = 1;        // photon count
    int n_right = 1;  // transmitted photons; the rest are reflected
    std::string name() const;            // e.g. "RRL"
    double multiplicity() const;         // n! / (nR! nL!)
};

struct BoundKernelResult {
    cplx value;
    double error = 0.0;
    bool converged = true;
};

// Pair-cluster kernel
//   B(k1,k2) = [ -i/2pi / (k1-eps+iG/2) + -i/2pi / (k2-eps+iG/2) ]
//              * Int_{k'>0} alpha(k') alpha(k1+k2-k') r_{k'} r_{k1+k2-k'} dk',
// evaluated with a fresh adaptive quadrature of the inner integral.
// window_scale < 0 uses the default window; window_scale = 0 integrates
// over the packet's full effective support.
BoundKernelResult bound_kernel_2(double k1, double k2, const GaussianPacket& pkt,
                                 const SystemParams& p, const QuadratureSpec& q,
                                 double window_scale = -1.0);

// Shared kernel context: caches the inner pair integral on a spline and,
// when three-photon amplitudes are requested, a table of the triple-cluster
// Cauchy transform.
class ScatteringKernels {
  public:
    enum class TripleMode { table, direct };

    ScatteringKernels(const SystemParams& p, const GaussianPacket& pkt,
                      const QuadratureSpec& q, int max_photons = 3,
                      TripleMode mode = TripleMode::table);

    const SystemParams& params() const { return p_; }
    const GaussianPacket& packet() const { return pkt_; }
    const QuadratureSpec& quad() const { return q_; }
    bool narrowband_warning() const { return !pkt_.narrowband(); }

    double alpha(double k) const { return packet_amplitude(k, pkt_, PacketKind::fock); }

    // inner pair integral I(E)
    cplx inner_pair_integral(double E) const;
    // pair-cluster kernel B(p1,p2)
    cplx bound_pair(double p1, double p2) const;
    // Cauchy transform K(E; p) entering the triple cluster
    cplx triple_transform(double E, double p) const;
    cplx triple_transform_exact(double E, double p) const;
    // triple-cluster kernel W(p1,p2,p3)
    cplx triple_cluster(double p1, double p2, double p3) const;

    // symmetric even-space kernels (chiral problem, before the even/odd
    // recombination): n = 1..3
    cplx even_kernel_sym(std::span<const double> ps) const;
    cplx even_kernel_pw(std::span<const double> ps) const;

    // breakpoint ladder around the emitter resonance, for seeding the
    // sector quadratures when Gamma << Delta
    std::vector<double> resonance_breakpoints() const;

    // per-axis integration window and seeding breakpoints for sector
    // probability integrals: the Gaussian core k0 +- W Delta plus the
    // Lorentzian bound-state tails, which extend over ~Gamma
    double sector_window_halfwidth() const;
    std::vector<double> sector_axis_breakpoints(double lo, double hi) const;

  private:
    void build_inner_spline();
    void build_triple_table() const;
    UniformCubicSpline<cplx> make_row_spline(double E) const;

    SystemParams p_;
    GaussianPacket pkt_;
    QuadratureSpec q_;
    int max_photons_;
    TripleMode mode_;
    UniformCubicSpline<cplx> inner_;  // I(E)
    mutable BicubicTable ktable_;
    mutable std::once_flag ktable_once_;
};

// One outcome sector's smooth amplitude.
class OutputAmplitude {
  public:
    OutputAmplitude(std::shared_ptr<const ScatteringKernels> ctx, SectorLabel label)
        : ctx_(std::move(ctx)), label_(label) {}

    const SectorLabel& sector() const { return label_; }
    const ScatteringKernels& kernels() const { return *ctx_; }

    // momenta: first n_right transmitted, then reflected magnitudes
    cplx eval(std::span<const double> momenta) const;
    cplx pw(std::span<const double> momenta) const;
    cplx bs(std::span<const double> momenta) const;  // eval - pw by construction

  private:
    cplx single(int slot, double k) const;

    std::shared_ptr<const ScatteringKernels> ctx_;
    SectorLabel label_;
};

// Expand an n-photon right-going product input over even/odd channels and
// collect the smooth amplitude of every outcome sector, ordered from all
// transmitted to all reflected.
std::vector<OutputAmplitude> combine_sectors(int n, const GaussianPacket& pkt,
                                             const SystemParams& p, const QuadratureSpec& q,
                                             ScatteringKernels::TripleMode mode =
                                                 ScatteringKernels::TripleMode::table);

// Even-space S-matrix kernel applied to the product wavepacket, the
// surface the lattice cross-check compares against; n = 1..3.
struct EvenKernel {
    int n;
    std::shared_ptr<const ScatteringKernels> ctx;
    cplx eval(std::span<const double> ps) const { return ctx->even_kernel_sym(ps); }
    cplx pw(std::span<const double> ps) const { return ctx->even_kernel_pw(ps); }
};
EvenKernel even_kernel(int n, const GaussianPacket& pkt, const SystemParams& p,
                       const QuadratureSpec& q);

}  // namespace wqed
