#include "wqed/coherent.hpp"

#include <cmath>
#include <stdexcept>

namespace wqed {

namespace {

// packet-averaged single-photon transmission and reflection amplitudes
struct MeanAmps {
    cplx T, R;
};

MeanAmps mean_amplitudes(const GaussianPacket& pkt, const SystemParams& p) {
    QuadratureSpec qi;
    qi.rel_tol = 1e-10;
    qi.abs_tol = 1e-14;
    const double w = 12.0 * pkt.delta;
    const double lo = std::max(1e-12, pkt.k0 - w), hi = pkt.k0 + w;
    std::vector<double> bp;
    const double g = 0.5 * p.gamma();
    if (g > 0.0 && g < pkt.delta)
        for (double off : {-4.0 * g, 0.0, 4.0 * g}) bp.push_back(p.epsilon + off);
    auto ft = [&](double k) {
        return packet_amplitude(k, pkt, PacketKind::fock) * chiral_coefficients(k, p).t;
    };
    auto fr = [&](double k) {
        return packet_amplitude(k, pkt, PacketKind::fock) * chiral_coefficients(k, p).r;
    };
    return {integrate(ft, lo, hi, qi, bp).value, integrate(fr, lo, hi, qi, bp).value};
}

double poisson_pmf(int m, double mean) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return std::exp(-mean) * std::pow(mean, m) / f;
}

// truncated first moment of a Poisson distribution over m = 0..3
double truncated_mean(double x) {
    return std::exp(-x) * (x + x * x + 0.5 * x * x * x);
}

}  // namespace

std::vector<double> default_g2_grid(const SystemParams& p) {
    const double g = std::max(p.gamma(), 1e-12);
    std::vector<double> xs{0.0};
    const int n = 59;
    const double lo = std::log(0.05), hi = std::log(15.0);
    for (int i = 0; i < n; ++i)
        xs.push_back(std::exp(lo + (hi - lo) * double(i) / double(n - 1)) / g);
    return xs;
}

CorrelationCurve g2_curve(const GaussianPacket& pkt, const SystemParams& p,
                          const std::vector<double>& xs) {
    if (pkt.nbar > 1.0)
        throw std::invalid_argument("g2_curve: truncation requires nbar <= 1");
    CorrelationCurve out;
    out.xs = xs;
    if (!pkt.narrowband()) {
        out.flagged = true;
        out.note = "narrowband condition k0/delta >= 20 violated";
    }
    const auto m = mean_amplitudes(pkt, p);
    const cplx T2 = m.T * m.T, R2 = m.R * m.R;
    const double denom = std::norm(T2);
    if (denom < 1e-20) {
        out.flagged = true;
        out.note = "transmitted amplitude underflow (near-total reflection)";
    }
    const bool unreliable = denom < 1e-20;
    out.values.reserve(xs.size());
    for (double x : xs) {
        const double decay = std::exp(-0.5 * p.gamma() * std::abs(x));
        const double num = std::norm(T2 - R2 * decay);
        double v = unreliable ? 0.0 : num / denom;
        if (v < 0.0 && v > -1e-12) v = 0.0;  // clamp rounding noise only
        out.values.push_back(v);
        if (x == 0.0) out.g2_zero = v;
    }
    if (!xs.empty() && xs.front() != 0.0) {
        const double num = std::norm(T2 - R2);
        out.g2_zero = unreliable ? 0.0 : num / denom;
    }
    return out;
}

G2Regime g2_regime(const GaussianPacket& pkt, const SystemParams& p) {
    auto c = g2_curve(pkt, p, {0.0});
    return {c.g2_zero, c.g2_zero < 1.0, c.flagged};
}

NumberDistribution number_distribution(const GaussianPacket& pkt, const SystemParams& p,
                                       const QuadratureSpec& q, PoissonRef ref) {
    if (pkt.nbar > 1.0)
        throw std::invalid_argument("number_distribution: truncation requires nbar <= 1");
    const double nbar = pkt.nbar;

    // sector probabilities of the unit-normalized packet
    GaussianPacket unit(pkt.k0, pkt.delta);
    auto p1 = prob_one(unit, p, q);
    auto p2 = prob_two(unit, p, q);
    auto p3 = prob_three(unit, p, q);

    std::array<double, 4> w{};  // Poisson number weights of the incident state
    for (int n = 0; n <= 3; ++n) w[n] = poisson_pmf(n, nbar);

    NumberDistribution out;
    out.flagged = p1.flagged || p2.flagged || p3.flagged;
    // P_m = sum_j w_{m+j} P^{(m+j)}(m right, j left)
    out.prob[0] = w[0] + w[1] * p1["L"].total + w[2] * p2["LL"].total + w[3] * p3["LLL"].total;
    out.prob[1] = w[1] * p1["R"].total + w[2] * p2["RL"].total + w[3] * p3["RLL"].total;
    out.prob[2] = w[2] * p2["RR"].total + w[3] * p3["RRL"].total;
    out.prob[3] = w[3] * p3["RRR"].total;

    out.capture = out.prob[0] + out.prob[1] + out.prob[2] + out.prob[3];
    if (out.capture < 0.95) {
        out.flagged = true;
        out.note = "truncation remainder exceeds 5%";
    }

    double mean_ref = nbar;
    if (ref == PoissonRef::transmitted) {
        const double moment = out.prob[1] + 2.0 * out.prob[2] + 3.0 * out.prob[3];
        // match the truncated first moment: monotone on [0, 2] for the
        // means that arise with nbar <= 1
        double lo = 0.0, hi = 2.0;
        if (truncated_mean(hi) < moment) {
            mean_ref = hi;
        } else {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (truncated_mean(mid) < moment ? lo : hi) = mid;
            }
            mean_ref = 0.5 * (lo + hi);
        }
    }
    out.mean_reference = mean_ref;
    for (int m = 0; m <= 3; ++m) {
        out.poisson[m] = poisson_pmf(m, mean_ref);
        out.ratio[m] = out.poisson[m] > 0.0 ? out.prob[m] / out.poisson[m] : 0.0;
    }
    return out;
}

}  // namespace wqed
