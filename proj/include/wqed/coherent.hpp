#pragma once

#include <array>
#include <string>
#include <vector>

#include "wqed/fock.hpp"

// Coherent-state scattering observables of the transmitted field: the
// normalized second-order correlation g2(x2 - x1) and the photon-number
// distribution compared against a Poisson reference.

namespace wqed {

struct CorrelationCurve {
    std::vector<double> xs;      // separations (physical units)
    std::vector<double> values;  // g2 >= 0
    double g2_zero = 0.0;
    bool flagged = false;
    std::string note;
};

// g2 via the closed form: with T = Int alpha t dk and R = Int alpha r dk,
//   g2(x) = |T^2 - R^2 e^{-Gamma x / 2}|^2 / |T^2|^2.
// Valid for nbar <= 1 (higher number states dropped).  A vanishing
// transmitted one-photon amplitude flags the curve as unreliable rather
// than returning infinities.
CorrelationCurve g2_curve(const GaussianPacket& pkt, const SystemParams& p,
                          const std::vector<double>& xs);

// default grid: 60 points, x = 0 plus log-spaced Gamma x in (0, 15]
std::vector<double> default_g2_grid(const SystemParams& p);

struct G2Regime {
    double g2_zero = 0.0;
    bool antibunched = false;  // g2(0) < 1
    bool flagged = false;
};
G2Regime g2_regime(const GaussianPacket& pkt, const SystemParams& p);

enum class PoissonRef {
    transmitted,  // Poisson mean matched to the transmitted field (default)
    incident      // Poisson mean = incident nbar
};

struct NumberDistribution {
    std::array<double, 4> prob{};     // P_0..P_3 in the transmitted field
    std::array<double, 4> poisson{};  // Poisson reference
    std::array<double, 4> ratio{};
    double capture = 0.0;             // probability captured by the n<=3 truncation
    double mean_reference = 0.0;      // mean of the Poisson reference
    bool flagged = false;
    std::string note;
};

// Builds the output state from Poisson-weighted 0..3 photon Fock
// components, applies the sector amplitudes, and marginalizes over the
// reflected photons.  The transmitted reference mean is fixed by matching
// the truncated first moment, which reduces to the incident nbar for
// identity scattering.
NumberDistribution number_distribution(const GaussianPacket& pkt, const SystemParams& p,
                                       const QuadratureSpec& q,
                                       PoissonRef ref = PoissonRef::transmitted);

}  // namespace wqed
