#include "wqed/oracle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wqed/smatrix.hpp"

namespace wqed {

namespace {

double auto_evolve_time(const SystemParams& p, const GaussianPacket& pkt) {
    const double g = p.gamma();
    return (g > 0.0 ? 8.0 / g : 0.0) + 6.0 / pkt.delta;
}

}  // namespace

double LatticeConfig::k_halfwidth(const SystemParams& p, const GaussianPacket& pkt) const {
    // Gaussian support plus the Lorentzian arms of the bound clusters,
    // which extend over the emission linewidth
    return k_halfwidth_units * pkt.delta + k_halfwidth_gamma * p.gamma();
}

int LatticeConfig::resolved_modes(const SystemParams& p, const GaussianPacket& pkt) const {
    if (allow_coarse) return m_modes;
    double scale = pkt.delta;
    if (p.gamma() > 0.0) scale = std::min(scale, p.gamma());
    const double dk_max = scale / 4.0;
    const double width = 2.0 * k_halfwidth(p, pkt);
    const int need = int(std::ceil(width / dk_max - 1e-9));
    return std::max(m_modes, need);
}

MomentumLattice::MomentumLattice(const LatticeConfig& cfg, const SystemParams& p,
                                 const GaussianPacket& pkt)
    : p_(p), pkt_(pkt) {
    if (cfg.photon_cutoff < 1 || cfg.photon_cutoff > 3)
        throw std::invalid_argument("MomentumLattice: photon_cutoff must be 1..3");
    m_ = cfg.resolved_modes(p, pkt);
    const double half = cfg.k_halfwidth(p, pkt);
    dk_ = 2.0 * half / double(m_);
    kmin_ = pkt.k0 - half;
    g_ = p.coupling_vbar() * std::sqrt(dk_ / (2.0 * M_PI));
    evolve_time_ = cfg.evolve_time > 0.0 ? cfg.evolve_time : auto_evolve_time(p, pkt);
    x0_ = cfg.x0 != 0.0 ? cfg.x0 : -3.0 / pkt.delta;

    if (!cfg.allow_coarse) {
        double scale = pkt.delta;
        if (p.gamma() > 0.0) scale = std::min(scale, p.gamma());
        if (dk_ > scale / 4.0 + 1e-12)
            throw std::invalid_argument("MomentumLattice: dk does not resolve min(delta, Gamma)/4");
    }
    off3_.assign(m_ + 1, 0);
    for (int i = 0; i < m_; ++i) {
        const int rem = m_ - i;
        off3_[i + 1] = off3_[i] + rem * (rem + 1) / 2;
    }
}

int MomentumLattice::photon_dim(int n) const {
    switch (n) {
        case 0: return 1;
        case 1: return m_;
        case 2: return m_ * (m_ + 1) / 2;
        case 3: return off3_[m_];
        default: throw std::invalid_argument("photon_dim: n must be 0..3");
    }
}

int MomentumLattice::dim(int n_exc) const {
    return photon_dim(n_exc) + photon_dim(n_exc - 1);
}

int MomentumLattice::pair_index(int i, int j) const {
    return i * m_ - i * (i - 1) / 2 + (j - i);
}

int MomentumLattice::triple_index(int i, int j, int l) const {
    const int mloc = m_ - i;
    const int jj = j - i, ll = l - i;
    return off3_[i] + jj * mloc - jj * (jj - 1) / 2 + (ll - jj);
}

void MomentumLattice::apply_shifted(int n_exc, const std::vector<cplx>& x,
                                    std::vector<cplx>& y) const {
    const int np = photon_dim(n_exc), ne = photon_dim(n_exc - 1);
    if (int(x.size()) != np + ne) throw std::invalid_argument("apply_shifted: size mismatch");
    y.assign(x.size(), cplx(0.0, 0.0));
    const double shift = double(n_exc) * pkt_.k0;
    const cplx eps_term(p_.epsilon, -0.5 * p_.gamma_prime);

    // diagonal
    if (n_exc == 1) {
        for (int j = 0; j < m_; ++j) y[j] = (mode_k(j) - shift) * x[j];
        y[np] = (eps_term - shift) * x[np];
    } else if (n_exc == 2) {
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j) {
                const int idx = pair_index(i, j);
                y[idx] = (mode_k(i) + mode_k(j) - shift) * x[idx];
            }
        for (int j = 0; j < m_; ++j) y[np + j] = (mode_k(j) + eps_term - shift) * x[np + j];
    } else {
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j)
                for (int l = j; l < m_; ++l) {
                    const int idx = triple_index(i, j, l);
                    y[idx] = (mode_k(i) + mode_k(j) + mode_k(l) - shift) * x[idx];
                }
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j) {
                const int idx = np + pair_index(i, j);
                y[idx] = (mode_k(i) + mode_k(j) + eps_term - shift) * x[idx];
            }
    }

    // coupling: every emitter state exchanges one photon with each mode
    if (n_exc == 1) {
        for (int j = 0; j < m_; ++j) {
            y[j] += g_ * x[np];
            y[np] += g_ * x[j];
        }
    } else if (n_exc == 2) {
        for (int i = 0; i < m_; ++i) {
            const int ei = np + i;
            for (int j = 0; j < m_; ++j) {
                const int a = std::min(i, j), b = std::max(i, j);
                const double amp = g_ * (i == j ? std::sqrt(2.0) : 1.0);
                const int idx = pair_index(a, b);
                y[idx] += amp * x[ei];
                y[ei] += amp * x[idx];
            }
        }
    } else {
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j) {
                const int ei = np + pair_index(i, j);
                for (int l = 0; l < m_; ++l) {
                    int a = i, b = j, c = l;
                    if (c < a) std::swap(a, c);
                    if (c < b) std::swap(b, c);
                    if (b < a) std::swap(a, b);
                    int occ = 1;
                    if (l == i) ++occ;
                    if (l == j) ++occ;
                    const double amp = g_ * std::sqrt(double(occ));
                    const int idx = triple_index(a, b, c);
                    y[idx] += amp * x[ei];
                    y[ei] += amp * x[idx];
                }
            }
    }
}

void MomentumLattice::apply_number(int n_exc, const std::vector<cplx>& x,
                                   std::vector<cplx>& y) const {
    y.assign(x.size(), cplx(0.0, 0.0));
    for (size_t i = 0; i < x.size(); ++i) y[i] = double(n_exc) * x[i];
}

std::vector<cplx> MomentumLattice::product_packet(int n) const {
    std::vector<cplx> amps(m_);
    for (int j = 0; j < m_; ++j) {
        const double k = mode_k(j);
        amps[j] = packet_amplitude(k, pkt_, PacketKind::fock) * std::sqrt(dk_) *
                  std::polar(1.0, -k * x0_);
    }
    std::vector<cplx> v(dim(n), cplx(0.0, 0.0));
    if (n == 1) {
        for (int j = 0; j < m_; ++j) v[j] = amps[j];
    } else if (n == 2) {
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j)
                v[pair_index(i, j)] =
                    (i == j ? amps[i] * amps[i] : std::sqrt(2.0) * amps[i] * amps[j]);
    } else {
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j)
                for (int l = j; l < m_; ++l) {
                    double mult = 6.0;                     // distinct
                    if (i == j && j == l) mult = 1.0;
                    else if (i == j || j == l) mult = 3.0;
                    v[triple_index(i, j, l)] =
                        std::sqrt(mult) * amps[i] * amps[j] * amps[l];
                }
    }
    double norm2 = 0.0;
    for (const auto& c : v) norm2 += std::norm(c);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : v) c *= inv;
    return v;
}

void MomentumLattice::free_evolve(int n, double t, std::vector<cplx>& state) const {
    const double shift = double(n) * pkt_.k0;
    auto phase = [&](double e) { return std::polar(1.0, -(e - shift) * t); };
    if (n == 1) {
        for (int j = 0; j < m_; ++j) state[j] *= phase(mode_k(j));
    } else if (n == 2) {
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j)
                state[pair_index(i, j)] *= phase(mode_k(i) + mode_k(j));
    } else {
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j)
                for (int l = j; l < m_; ++l)
                    state[triple_index(i, j, l)] *= phase(mode_k(i) + mode_k(j) + mode_k(l));
    }
}

double MomentumLattice::self_energy_shift(int j) const {
    double s = 0.0;
    for (int l = 0; l < m_; ++l)
        if (l != j) s += 1.0 / (mode_k(j) - mode_k(l));
    return g_ * g_ * s;
}

PropagationResult propagate(const MomentumLattice& lat, int n_exc, std::vector<cplx> v,
                            double T, double tol) {
    using Mat = Eigen::MatrixXcd;
    using Vec = Eigen::VectorXcd;
    const int dim = int(v.size());
    if (dim != lat.dim(n_exc)) throw std::invalid_argument("propagate: size mismatch");
    if (T == 0.0) return {std::move(v), 0.0, 0};
    if (T < 0.0) throw std::invalid_argument("propagate: T must be >= 0");

    // crude spectral radius estimate of the shifted generator
    std::vector<cplx> pw(dim), pv(dim);
    for (int i = 0; i < dim; ++i) pv[i] = cplx(std::cos(0.7 * i + 0.3), std::sin(1.3 * i));
    double hnorm = 1.0;
    for (int it = 0; it < 12; ++it) {
        lat.apply_shifted(n_exc, pv, pw);
        double nrm = 0.0;
        for (const auto& c : pw) nrm += std::norm(c);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) break;
        hnorm = nrm;
        for (int i = 0; i < dim; ++i) pv[i] = pw[i] / nrm;
    }

    const int m = std::min(36, dim);
    double tau = std::min(T, 5.0 / std::max(hnorm, 1e-12));

    PropagationResult out;
    out.state = std::move(v);
    double t_done = 0.0;
    std::vector<std::vector<cplx>> V;
    std::vector<cplx> w(dim);

    while (t_done < T * (1.0 - 1e-15)) {
        tau = std::min(tau, T - t_done);
        double beta = 0.0;
        for (const auto& c : out.state) beta += std::norm(c);
        beta = std::sqrt(beta);
        if (beta == 0.0) break;

        V.assign(1, out.state);
        for (auto& c : V[0]) c /= beta;
        Mat H = Mat::Zero(m + 1, m);
        int m_eff = m;
        for (int j = 0; j < m; ++j) {
            lat.apply_shifted(n_exc, V[j], w);
            for (int i = 0; i <= j; ++i) {
                cplx h(0.0, 0.0);
                for (int d = 0; d < dim; ++d) h += std::conj(V[i][d]) * w[d];
                H(i, j) = h;
                for (int d = 0; d < dim; ++d) w[d] -= h * V[i][d];
            }
            // re-orthogonalize once for stability
            for (int i = 0; i <= j; ++i) {
                cplx h(0.0, 0.0);
                for (int d = 0; d < dim; ++d) h += std::conj(V[i][d]) * w[d];
                H(i, j) += h;
                for (int d = 0; d < dim; ++d) w[d] -= h * V[i][d];
            }
            double nrm = 0.0;
            for (const auto& c : w) nrm += std::norm(c);
            nrm = std::sqrt(nrm);
            H(j + 1, j) = nrm;
            if (nrm < 1e-14 * beta) { m_eff = j + 1; break; }
            V.push_back(w);
            for (auto& c : V.back()) c /= nrm;
        }

        const Mat Hm = H.topLeftCorner(m_eff, m_eff);
        const Mat F = (cplx(0.0, -tau) * Hm).exp();
        Vec e1 = Vec::Zero(m_eff);
        e1(0) = 1.0;
        const Vec y = F * e1;

        std::fill(out.state.begin(), out.state.end(), cplx(0.0, 0.0));
        for (int j = 0; j < m_eff; ++j)
            for (int d = 0; d < dim; ++d) out.state[d] += beta * y(j) * V[j][d];

        const double h_next = (m_eff < m + 1) ? std::abs(H(m_eff, m_eff - 1)) : 0.0;
        out.error_estimate += beta * h_next * std::abs(y(m_eff - 1)) * tau;
        ++out.steps;
        t_done += tau;
        if (out.steps > 100000) throw std::runtime_error("propagate: step limit exceeded");
    }

    if (out.error_estimate > tol * 100.0)
        throw std::runtime_error("propagate: accuracy target missed");
    return out;
}

OracleReport scatter_and_compare(int n, const GaussianPacket& pkt, const SystemParams& p,
                                 const LatticeConfig& cfg) {
    if (n < 1 || n > 2)
        throw std::invalid_argument("scatter_and_compare: n must be 1 or 2");
    LatticeConfig c = cfg;
    c.photon_cutoff = std::max(c.photon_cutoff, n);
    MomentumLattice lat(c, p, pkt);

    // the discrete momentum grid is periodic in position with L = 2 pi/dk;
    // the scattering protocol needs the transmitted packet to stay clear
    // of the emitter's image for the whole evolution
    const double L_period = 2.0 * M_PI / lat.dk();
    if (std::abs(lat.packet_center()) + lat.evolve_time() + 4.0 / pkt.delta > L_period)
        throw std::invalid_argument(
            "scatter_and_compare: packet would wrap around the periodic grid; raise m_modes");

    OracleReport rep;
    rep.n = n;
    rep.m_modes = lat.modes();
    rep.dk = lat.dk();
    rep.evolve_time = lat.evolve_time();
    rep.x0 = lat.packet_center();
    rep.v = p.coupling_v;
    rep.gamma_prime = p.gamma_prime;
    rep.delta = pkt.delta;
    rep.k0 = pkt.k0;
    rep.epsilon = p.epsilon;

    const int m = lat.modes();
    const double T = lat.evolve_time();

    // single-photon pass (needed for both n = 1 and the n = 2 prediction)
    auto in1 = lat.product_packet(1);
    auto prop1 = propagate(lat, 1, in1, T, c.propagator_tol);
    rep.propagator_error = prop1.error_estimate;
    auto free1 = lat.product_packet(1);
    lat.free_evolve(1, T, free1);

    // window-escape check on the incident packet
    double maxamp = 0.0;
    for (int j = 0; j < m; ++j) maxamp = std::max(maxamp, std::abs(in1[j]));
    rep.edge_amplitude = std::max(std::abs(in1[0]), std::abs(in1[m - 1])) / maxamp;
    if (rep.edge_amplitude > 1e-4) {
        rep.valid = false;
        rep.note = "packet reaches the momentum window edge";
        return rep;
    }

    // Compare only where the packet carries weight; far tail modes hold
    // finite-time leakage that swamps the ratio.  The finite window makes
    // the emitter level appear shifted by the principal-value remnant
    // sigma(k) of the coupling sum, so the continuum prediction is
    // evaluated at k - sigma(k); sigma vanishes at the window center and
    // shrinks with the window width.
    std::vector<cplx> tau(m, cplx(1.0, 0.0));
    double wsum = 0.0, dev2 = 0.0, devmax = 0.0;
    double wsum_core = 0.0, dev2_core = 0.0;
    for (int j = 0; j < m; ++j) {
        if (std::abs(free1[j]) < 1e-3 * maxamp) continue;
        const double wgt = std::norm(free1[j]);
        tau[j] = prop1.state[j] / free1[j];
        const double kc = lat.mode_k(j) - lat.self_energy_shift(j);
        const double d = std::abs(tau[j] - even_transmission(kc, p));
        wsum += wgt;
        dev2 += wgt * d * d;
        devmax = std::max(devmax, d);
        if (std::abs(free1[j]) >= 5e-2 * maxamp) {
            wsum_core += wgt;
            dev2_core += wgt * d * d;
        }
    }
    rep.rms_pw_deviation = std::sqrt(dev2 / wsum);
    rep.max_pw_deviation = devmax;
    rep.rms_core_deviation = wsum_core > 0.0 ? std::sqrt(dev2_core / wsum_core) : 0.0;

    double norm1 = 0.0;
    for (int j = 0; j < lat.dim(1); ++j) norm1 += std::norm(prop1.state[j]);
    rep.final_norm_sq_1 = norm1;
    if (p.gamma_prime == 0.0) rep.norm_drift = std::abs(norm1 - 1.0);

    if (n == 1) return rep;

    // two-photon pass
    auto in2 = lat.product_packet(2);
    const double in_norm_raw = [&] {
        // normalization applied inside product_packet; recompute the raw
        // scale so analytic kernels can be mapped onto the lattice
        double s = 0.0;
        for (int j = 0; j < m; ++j)
            s += std::norm(packet_amplitude(lat.mode_k(j), pkt, PacketKind::fock)) * lat.dk();
        return s;  // ~1; enters squared below
    }();
    auto prop2 = propagate(lat, 2, in2, T, c.propagator_tol);
    rep.propagator_error += prop2.error_estimate;

    auto free2 = lat.product_packet(2);
    lat.free_evolve(2, T, free2);

    QuadratureSpec q;
    ScatteringKernels kernels(p, pkt, q, 2);

    std::vector<cplx> bound_pred(lat.dim(2), cplx(0.0, 0.0));
    double bmax = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const int idx = lat.pair_index(i, j);
            const double s = (i == j) ? 1.0 : std::sqrt(2.0);
            const double E = lat.mode_k(i) + lat.mode_k(j);
            const cplx phase =
                std::polar(1.0, -(E - 2.0 * pkt.k0) * T - E * lat.packet_center());
            bound_pred[idx] = s * lat.dk() * 4.0 *
                              kernels.bound_pair(lat.mode_k(i), lat.mode_k(j)) * phase /
                              in_norm_raw;
            bmax = std::max(bmax, std::abs(bound_pred[idx]));
        }
    double num2 = 0.0, den2 = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const int idx = lat.pair_index(i, j);
            if (std::abs(bound_pred[idx]) < 1e-3 * bmax) continue;
            const cplx pw_pred = tau[i] * tau[j] * free2[idx];
            const cplx resid = prop2.state[idx] - pw_pred;
            num2 += std::norm(resid - bound_pred[idx]);
            den2 += std::norm(bound_pred[idx]);
        }
    rep.bound_l2_rel = den2 > 0.0 ? std::sqrt(num2 / den2) : 0.0;

    double norm2v = 0.0;
    for (int i = 0; i < lat.dim(2); ++i) norm2v += std::norm(prop2.state[i]);
    rep.final_norm_sq_2 = norm2v;
    if (p.gamma_prime == 0.0) rep.norm_drift = std::max(rep.norm_drift, std::abs(norm2v - 1.0));

    return rep;
}

}  // namespace wqed
