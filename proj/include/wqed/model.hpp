#pragma once

#include <complex>
#include <stdexcept>

// Physical parameters of a two-level emitter coupled to a 1D photonic
// continuum, and the single-photon scattering coefficients everything
// else is built from.  Units: hbar = c = 1; all rates and momenta share
// one inverse-length unit.

namespace wqed {

using cplx = std::complex<double>;

struct SystemParams {
    double epsilon;      // level splitting of the emitter
    double coupling_v;   // frequency-independent coupling V >= 0
    double gamma_prime;  // decay rate into non-guided channels, >= 0

    SystemParams(double eps, double v, double gp = 0.0)
        : epsilon(eps), coupling_v(v), gamma_prime(gp) {
        if (v < 0.0) throw std::invalid_argument("SystemParams: coupling_v must be >= 0");
        if (gp < 0.0) throw std::invalid_argument("SystemParams: gamma_prime must be >= 0");
    }

    // emission rate into the guided continuum, Gamma_c = Vbar^2 = 2 V^2
    double gamma_c() const { return 2.0 * coupling_v * coupling_v; }
    // total emission rate
    double gamma() const { return gamma_c() + gamma_prime; }
    // effective coupling of the even mode, Vbar = sqrt(2) V
    double coupling_vbar() const { return std::sqrt(2.0) * coupling_v; }
};

enum class PacketKind { fock, coherent };

// Gaussian spectral amplitude of the incident wavepacket.  Fock packets
// are unit normalized; coherent packets carry sqrt(nbar).
struct GaussianPacket {
    double k0;     // central momentum
    double delta;  // spectral width
    double nbar;   // mean photon number (coherent states only)

    GaussianPacket(double k0_, double delta_, double nbar_ = 0.0)
        : k0(k0_), delta(delta_), nbar(nbar_) {
        if (delta_ <= 0.0) throw std::invalid_argument("GaussianPacket: delta must be > 0");
        if (nbar_ < 0.0) throw std::invalid_argument("GaussianPacket: nbar must be >= 0");
    }

    // k0 >> delta keeps the negative-momentum tail negligible
    bool narrowband() const { return k0 / delta >= 20.0; }
};

// Even-mode transmission coefficient.  Unimodular for gamma_prime = 0.
// The fully decoupled singular point (V = 0, Gamma' = 0, k = epsilon) is
// defined as 1, its analytic limit.
cplx even_transmission(double k, const SystemParams& p);

// Lab-frame transmission and reflection, t = (tbar+1)/2, r = (tbar-1)/2.
// t - r = 1 always.
struct ChiralCoefficients { cplx t, r; };
ChiralCoefficients chiral_coefficients(double k, const SystemParams& p);

// Spectral amplitude alpha(k) of the Gaussian packet.
double packet_amplitude(double k, const GaussianPacket& pkt, PacketKind kind);

}  // namespace wqed
