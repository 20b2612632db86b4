#include "wqed/smatrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wqed {

namespace {

// Lorentzian denominator of the emitter response
inline cplx emitter_denom(double p, const SystemParams& sp) {
    return cplx(p - sp.epsilon, 0.5 * sp.gamma());
}

std::vector<double> inner_breakpoints(double E, double lo, double hi,
                                      const SystemParams& sp) {
    std::vector<double> bp;
    const double g = std::max(0.5 * sp.gamma(), 1e-9);
    for (double c : {sp.epsilon, E - sp.epsilon})
        for (double off : {-8.0 * g, -2.0 * g, 0.0, 2.0 * g, 8.0 * g}) {
            const double x = c + off;
            if (x > lo && x < hi) bp.push_back(x);
        }
    return bp;
}

}  // namespace

std::string SectorLabel::name() const {
    std::string s;
    for (int i = 0; i < n_right; ++i) s += 'R';
    for (int i = n_right; i < n; ++i) s += 'L';
    return s;
}

double SectorLabel::multiplicity() const {
    auto fact = [](int m) { double f = 1; for (int i = 2; i <= m; ++i) f *= i; return f; };
    return fact(n) / (fact(n_right) * fact(n - n_right));
}

BoundKernelResult bound_kernel_2(double k1, double k2, const GaussianPacket& pkt,
                                 const SystemParams& p, const QuadratureSpec& q,
                                 double window_scale) {
    BoundKernelResult out;
    if (p.gamma_c() == 0.0) return out;  // no emitter coupling, no cluster

    const double E = k1 + k2;
    const double w = (window_scale > 0.0 ? window_scale : q.window_halfwidth + 4.0) * pkt.delta;
    double lo, hi;
    if (window_scale == 0.0) {
        // effectively unbounded: cover the packet product's full support
        lo = std::max(1e-12, E / 2.0 - 30.0 * pkt.delta);
        hi = E / 2.0 + 30.0 * pkt.delta;
    } else {
        lo = std::max(1e-12, std::min(pkt.k0, E / 2.0) - w);
        hi = std::max(pkt.k0, E / 2.0) + w;
    }
    if (!(hi > lo)) return out;

    QuadratureSpec qi = q;
    qi.rel_tol = std::min(q.rel_tol, 1e-8);
    qi.abs_tol = 1e-14;

    auto integrand = [&](double k) -> cplx {
        const double a1 = packet_amplitude(k, pkt, PacketKind::fock);
        const double a2 = packet_amplitude(E - k, pkt, PacketKind::fock);
        const cplx r1 = chiral_coefficients(k, p).r;
        const cplx r2 = chiral_coefficients(E - k, p).r;
        return a1 * a2 * r1 * r2;
    };
    const auto bp = inner_breakpoints(E, lo, hi, p);
    auto res = integrate(integrand, lo, hi, qi, bp);

    const cplx lor = cplx(0.0, -1.0 / (2.0 * M_PI)) *
                     (1.0 / emitter_denom(k1, p) + 1.0 / emitter_denom(k2, p));
    out.value = lor * res.value;
    out.error = std::abs(lor) * res.error;
    out.converged = res.converged;
    return out;
}

ScatteringKernels::ScatteringKernels(const SystemParams& p, const GaussianPacket& pkt,
                                     const QuadratureSpec& q, int max_photons,
                                     TripleMode mode)
    : p_(p), pkt_(pkt), q_(q), max_photons_(max_photons), mode_(mode) {
    if (max_photons_ < 1 || max_photons_ > 3)
        throw std::invalid_argument("ScatteringKernels: max_photons must be 1..3");
    q_.validate();
    if (max_photons_ >= 2) build_inner_spline();
}

void ScatteringKernels::build_inner_spline() {
    const double d = pkt_.delta;
    const double e0 = 2.0 * pkt_.k0;
    const double half = 55.0 * d;
    const double dx = d / 16.0 * (q_.rel_tol <= 2e-6 ? 0.5 : 1.0);
    const size_t n = size_t(2.0 * half / dx) + 1;

    QuadratureSpec qi = q_;
    qi.rel_tol = std::min(q_.rel_tol, 1e-8);
    qi.abs_tol = 1e-14;

    std::vector<cplx> vals(n);
    for (size_t i = 0; i < n; ++i) {
        const double E = e0 - half + dx * double(i);
        if (p_.gamma_c() == 0.0) { vals[i] = 0.0; continue; }
        const double lo = std::max(1e-12, E / 2.0 - 14.0 * d);
        const double hi = E / 2.0 + 14.0 * d;
        if (!(hi > lo)) { vals[i] = 0.0; continue; }
        auto integrand = [&](double k) -> cplx {
            const double a1 = packet_amplitude(k, pkt_, PacketKind::fock);
            const double a2 = packet_amplitude(E - k, pkt_, PacketKind::fock);
            return a1 * a2 * chiral_coefficients(k, p_).r * chiral_coefficients(E - k, p_).r;
        };
        vals[i] = integrate(integrand, lo, hi, qi, inner_breakpoints(E, lo, hi, p_)).value;
    }
    inner_ = UniformCubicSpline<cplx>(e0 - half, dx, std::move(vals));
}

cplx ScatteringKernels::inner_pair_integral(double E) const {
    if (p_.gamma_c() == 0.0) return cplx(0.0, 0.0);
    if (E < inner_.x_min() || E > inner_.x_max()) return cplx(0.0, 0.0);
    return inner_(E);
}

cplx ScatteringKernels::bound_pair(double p1, double p2) const {
    if (p_.gamma_c() == 0.0) return cplx(0.0, 0.0);
    const cplx lor = cplx(0.0, -1.0 / (2.0 * M_PI)) *
                     (1.0 / emitter_denom(p1, p_) + 1.0 / emitter_denom(p2, p_));
    return lor * inner_pair_integral(p1 + p2);
}

// Smooth profile G_E(q) = alpha(E-q) (tbar_{E-q}-1) J(q) with J = 4 I,
// sampled where the packet factor is non-negligible.
UniformCubicSpline<cplx> ScatteringKernels::make_row_spline(double E) const {
    const double d = pkt_.delta;
    const double lo = E - pkt_.k0 - 14.0 * d;
    const double dx = d / 16.0;
    const size_t n = size_t(28.0 * d / dx) + 1;
    std::vector<cplx> vals(n);
    for (size_t i = 0; i < n; ++i) {
        const double qv = lo + dx * double(i);
        const double a = packet_amplitude(E - qv, pkt_, PacketKind::fock);
        const cplx tb1 = even_transmission(E - qv, p_) - 1.0;
        vals[i] = a * tb1 * 4.0 * inner_pair_integral(qv);
    }
    return UniformCubicSpline<cplx>(lo, dx, std::move(vals));
}

cplx ScatteringKernels::triple_transform_exact(double E, double p) const {
    if (p_.gamma_c() == 0.0) return cplx(0.0, 0.0);
    const auto row = make_row_spline(E);
    const cplx z = cplx(p + p_.epsilon, -0.5 * p_.gamma());
    return cauchy_integral(row, z);
}

void ScatteringKernels::build_triple_table() const {
    const double d = pkt_.delta;
    const double e0 = 3.0 * pkt_.k0, ehalf = 26.0 * d;
    const double p0 = pkt_.k0, phalf = sector_window_halfwidth() + 2.0 * d;
    // tighter quadrature tolerances ask for a finer table
    const double fine = q_.rel_tol <= 2e-6 ? 0.5 : 1.0;
    const double he = fine * d / 8.0;
    // smoothed by the Lorentzian: away from Gamma << Delta the transform
    // varies on the scale of Gamma, so the p grid may coarsen with it
    const double hp = fine * std::max(d / 10.0, p_.gamma() / 40.0);
    const size_t ne = size_t(2.0 * ehalf / he) + 1;
    const size_t np = size_t(2.0 * phalf / hp) + 1;
    std::vector<cplx> vals(ne * np);
    for (size_t j = 0; j < ne; ++j) {
        const double E = e0 - ehalf + he * double(j);
        const auto row = make_row_spline(E);
        for (size_t i = 0; i < np; ++i) {
            const double p = p0 - phalf + hp * double(i);
            const cplx z = cplx(p + p_.epsilon, -0.5 * p_.gamma());
            vals[j * np + i] = cauchy_integral(row, z);
        }
    }
    ktable_ = BicubicTable(p0 - phalf, hp, np, e0 - ehalf, he, ne, std::move(vals));
}

cplx ScatteringKernels::triple_transform(double E, double p) const {
    if (p_.gamma_c() == 0.0) return cplx(0.0, 0.0);
    if (mode_ == TripleMode::direct) return triple_transform_exact(E, p);
    std::call_once(ktable_once_, [this] { build_triple_table(); });
    return ktable_(p, E);
}

cplx ScatteringKernels::triple_cluster(double p1, double p2, double p3) const {
    if (p_.gamma_c() == 0.0) return cplx(0.0, 0.0);
    const double E = p1 + p2 + p3;
    const double ps[3] = {p1, p2, p3};
    cplx dsum(0.0, 0.0);
    cplx dinv[3], kv[3];
    for (int i = 0; i < 3; ++i) {
        dinv[i] = 1.0 / emitter_denom(ps[i], p_);
        dsum += dinv[i];
        kv[i] = triple_transform(E, ps[i]);
    }
    cplx acc(0.0, 0.0);
    for (int j = 0; j < 3; ++j) acc += kv[j] * (dsum - dinv[j]);
    // -(1/4) (2pi)^-2 sum_{i != j} K(E; p_j) / D(p_i)
    constexpr double inv4pi2 = 1.0 / (4.0 * M_PI * M_PI);
    return -0.25 * inv4pi2 * acc;
}

cplx ScatteringKernels::even_kernel_sym(std::span<const double> ps) const {
    const int n = int(ps.size());
    if (n < 1 || n > max_photons_)
        throw std::invalid_argument("even_kernel_sym: unsupported photon count");
    cplx pw(1.0, 0.0);
    for (double p : ps) pw *= even_transmission(p, p_) * alpha(p);
    if (n == 1) return pw;
    if (n == 2) return pw + 4.0 * bound_pair(ps[0], ps[1]);
    cplx acc = pw;
    const int pair[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int j = 0; j < 3; ++j) {
        const int s = 3 - pair[j][0] - pair[j][1];
        acc += 4.0 * bound_pair(ps[pair[j][0]], ps[pair[j][1]]) *
               even_transmission(ps[s], p_) * alpha(ps[s]);
    }
    acc += 8.0 * triple_cluster(ps[0], ps[1], ps[2]);
    return acc;
}

cplx ScatteringKernels::even_kernel_pw(std::span<const double> ps) const {
    cplx pw(1.0, 0.0);
    for (double p : ps) pw *= even_transmission(p, p_) * alpha(p);
    return pw;
}

std::vector<double> ScatteringKernels::resonance_breakpoints() const {
    std::vector<double> bp;
    const double g = 0.5 * p_.gamma();
    if (g <= 0.0) return bp;
    if (g < pkt_.delta) {
        for (double off : {-16.0 * g, -4.0 * g, -1.0 * g, 0.0, 1.0 * g, 4.0 * g, 16.0 * g})
            bp.push_back(p_.epsilon + off);
    }
    return bp;
}

double ScatteringKernels::sector_window_halfwidth() const {
    // Gaussian core plus the bound-cluster Lorentzian tails; the tail
    // fraction beyond u falls off as (Gamma/u)^3, so tighter tolerances
    // purchase a wider skirt
    const double ext = q_.rel_tol <= 2e-6 ? 24.0 : 12.0;
    return q_.window_halfwidth * pkt_.delta + ext * p_.gamma();
}

std::vector<double> ScatteringKernels::sector_axis_breakpoints(double lo, double hi) const {
    std::vector<double> bp;
    const double d = pkt_.delta, g = p_.gamma();
    for (double x : {pkt_.k0 - q_.window_halfwidth * d, pkt_.k0 - 2.0 * d, pkt_.k0 + 2.0 * d,
                     pkt_.k0 + q_.window_halfwidth * d})
        bp.push_back(x);
    if (g > 0.0) {
        for (double x : {p_.epsilon - 4.0 * g, p_.epsilon - 0.5 * g, p_.epsilon + 0.5 * g,
                         p_.epsilon + 4.0 * g})
            bp.push_back(x);
        if (g < d)
            for (double x : {p_.epsilon, p_.epsilon - 16.0 * g, p_.epsilon + 16.0 * g})
                bp.push_back(x);
    }
    std::vector<double> out;
    for (double x : bp)
        if (x > lo && x < hi) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

cplx OutputAmplitude::single(int slot, double k) const {
    const auto c = chiral_coefficients(k, ctx_->params());
    const cplx coeff = slot < label_.n_right ? c.t : c.r;
    return coeff * ctx_->alpha(k);
}

cplx OutputAmplitude::pw(std::span<const double> m) const {
    cplx acc(1.0, 0.0);
    for (int i = 0; i < label_.n; ++i) acc *= single(i, m[i]);
    return acc;
}

cplx OutputAmplitude::bs(std::span<const double> m) const {
    const int n = label_.n;
    if (n == 1) return cplx(0.0, 0.0);
    if (n == 2) return ctx_->bound_pair(m[0], m[1]);
    const int pair[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    cplx acc(0.0, 0.0);
    for (int j = 0; j < 3; ++j) {
        const int s = 3 - pair[j][0] - pair[j][1];
        acc += ctx_->bound_pair(m[pair[j][0]], m[pair[j][1]]) * single(s, m[s]);
    }
    acc += ctx_->triple_cluster(m[0], m[1], m[2]);
    return acc;
}

cplx OutputAmplitude::eval(std::span<const double> m) const { return pw(m) + bs(m); }

std::vector<OutputAmplitude> combine_sectors(int n, const GaussianPacket& pkt,
                                             const SystemParams& p, const QuadratureSpec& q,
                                             ScatteringKernels::TripleMode mode) {
    if (n < 1 || n > 3) throw std::invalid_argument("combine_sectors: n must be 1..3");
    auto ctx = std::make_shared<const ScatteringKernels>(p, pkt, q, n, mode);
    std::vector<OutputAmplitude> out;
    for (int nr = n; nr >= 0; --nr) out.emplace_back(ctx, SectorLabel{n, nr});
    return out;
}

EvenKernel even_kernel(int n, const GaussianPacket& pkt, const SystemParams& p,
                       const QuadratureSpec& q) {
    if (n < 1 || n > 3) throw std::invalid_argument("even_kernel: n must be 1..3");
    return EvenKernel{n, std::make_shared<const ScatteringKernels>(p, pkt, q, n)};
}

}  // namespace wqed
