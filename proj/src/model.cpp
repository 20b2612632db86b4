#include "wqed/model.hpp"

#include <cmath>

namespace wqed {

cplx even_transmission(double k, const SystemParams& p) {
    const double gc = p.gamma_c();
    const cplx num(k - p.epsilon, 0.5 * (p.gamma_prime - gc));
    const cplx den(k - p.epsilon, 0.5 * (p.gamma_prime + gc));
    if (den == cplx(0.0, 0.0)) return cplx(1.0, 0.0);  // decoupled limit
    return num / den;
}

ChiralCoefficients chiral_coefficients(double k, const SystemParams& p) {
    const cplx tb = even_transmission(k, p);
    return {0.5 * (tb + 1.0), 0.5 * (tb - 1.0)};
}

double packet_amplitude(double k, const GaussianPacket& pkt, PacketKind kind) {
    const double d2 = pkt.delta * pkt.delta;
    const double u = k - pkt.k0;
    const double a = std::pow(2.0 * M_PI * d2, -0.25) * std::exp(-u * u / (4.0 * d2));
    return kind == PacketKind::coherent ? std::sqrt(pkt.nbar) * a : a;
}

}  // namespace wqed
