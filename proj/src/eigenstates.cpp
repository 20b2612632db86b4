#include "wqed/eigenstates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wqed {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2 pi)

double theta(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5); }

cplx scattered_product(std::span<const double> ks, std::span<const double> xs,
                       std::span<const int> q, const SystemParams& p) {
    cplx acc(1.0, 0.0);
    for (size_t i = 0; i < ks.size(); ++i) acc *= scattered_wave(ks[i], xs[q[i]], p);
    return acc;
}

}  // namespace

std::vector<std::vector<int>> permutations(int n) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(idx);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

cplx plane_wave(double k, double x) {
    return kInvSqrt2Pi * std::polar(1.0, k * x);
}

cplx scattered_wave(double k, double x, const SystemParams& p) {
    if (x < 0.0) return plane_wave(k, x);
    const cplx tb = even_transmission(k, p);
    if (x > 0.0) return tb * plane_wave(k, x);
    return 0.5 * (1.0 + tb) * plane_wave(k, x);
}

cplx bound_state(std::span<const double> ks, std::span<const double> xs,
                 const SystemParams& p) {
    const int n = int(ks.size());
    if (n < 2 || n > 5 || xs.size() != ks.size())
        throw std::invalid_argument("bound_state: need 2..5 momenta with matching positions");

    double order = 1.0;
    for (int i = 0; i + 1 < n; ++i) {
        order *= theta(xs[i + 1] - xs[i]);
        if (order == 0.0) return cplx(0.0, 0.0);
    }

    cplx pref = -std::pow(cplx(-2.0, 0.0), n - 2);
    for (int i = 0; i < n; ++i) pref *= even_transmission(ks[i], p) - 1.0;

    // momentum-to-position assignment: k_1 and k_n ride on x_n, the rest
    // stay on their own coordinates
    double phase = ks[0] * xs[n - 1] + ks[n - 1] * xs[n - 1];
    for (int i = 1; i + 1 < n; ++i) phase += ks[i] * xs[i];

    const double spread = std::abs(xs[n - 1] - xs[0]);
    const cplx envelope = std::exp(cplx(-0.5 * p.gamma() * spread, -p.epsilon * spread));

    return pref * order * std::pow(kInvSqrt2Pi, n) * std::polar(1.0, phase) * envelope;
}

cplx eigenstate_g(std::span<const double> ks, std::span<const double> xs,
                  const SystemParams& p) {
    const int n = int(ks.size());
    if (n < 1 || n > 4 || xs.size() != ks.size())
        throw std::invalid_argument("eigenstate_g: need 1..4 momenta with matching positions");

    if (n == 1) return scattered_wave(ks[0], xs[0], p);

    const auto perms = permutations(n);
    const double norm = 1.0 / std::tgamma(double(n + 1));

    auto kp = [&](const std::vector<int>& perm, std::initializer_list<int> slots) {
        std::vector<double> v;
        v.reserve(slots.size());
        for (int s : slots) v.push_back(ks[perm[s]]);
        return v;
    };
    auto xq = [&](const std::vector<int>& perm, std::initializer_list<int> slots) {
        std::vector<double> v;
        v.reserve(slots.size());
        for (int s : slots) v.push_back(xs[perm[s]]);
        return v;
    };

    cplx acc(0.0, 0.0);

    // all-plane-wave pathway
    for (const auto& q : perms) acc += scattered_product(ks, xs, q, p);

    if (n == 2) {
        for (const auto& P : perms)
            for (const auto& Q : perms) {
                const auto kk = kp(P, {0, 1});
                const auto xx = xq(Q, {0, 1});
                acc += bound_state(kk, xx, p) * theta(xs[Q[0]]);
            }
    } else if (n == 3) {
        for (const auto& P : perms)
            for (const auto& Q : perms) {
                // one free photon + a bound pair
                const auto kk2 = kp(P, {1, 2});
                const auto xx2 = xq(Q, {1, 2});
                acc += scattered_wave(ks[P[0]], xs[Q[0]], p) * bound_state(kk2, xx2, p) *
                       theta(xs[Q[1]]);
                // three-photon cluster
                const auto kk3 = kp(P, {0, 1, 2});
                const auto xx3 = xq(Q, {0, 1, 2});
                acc += bound_state(kk3, xx3, p) * theta(xs[Q[0]]);
            }
    } else {  // n == 4
        for (const auto& P : perms)
            for (const auto& Q : perms) {
                acc += scattered_wave(ks[P[0]], xs[Q[0]], p) *
                       scattered_wave(ks[P[1]], xs[Q[1]], p) *
                       bound_state(kp(P, {2, 3}), xq(Q, {2, 3}), p) * theta(xs[Q[2]]);
                acc += scattered_wave(ks[P[0]], xs[Q[0]], p) *
                       bound_state(kp(P, {1, 2, 3}), xq(Q, {1, 2, 3}), p) * theta(xs[Q[1]]);
                acc += bound_state(kp(P, {0, 1}), xq(Q, {0, 1}), p) *
                       bound_state(kp(P, {2, 3}), xq(Q, {2, 3}), p) * theta(xs[Q[0]]) *
                       theta(xs[Q[2]]);
                acc += bound_state(kp(P, {0, 1, 2, 3}), xq(Q, {0, 1, 2, 3}), p) *
                       theta(xs[Q[0]]);
            }
    }

    return norm * acc;
}

cplx eigenstate_g_limit(std::span<const double> ks, std::span<const double> xs_rest,
                        const SystemParams& p, int side) {
    const int n = int(ks.size());
    if (int(xs_rest.size()) != n - 1)
        throw std::invalid_argument("eigenstate_g_limit: need n-1 fixed positions");
    double scale = std::max({p.gamma(), p.epsilon, 1.0});
    for (double k : ks) scale = std::max(scale, std::abs(k));
    const double eta = 1e-5 / scale;
    const double sgn = side >= 0 ? 1.0 : -1.0;

    auto eval = [&](double e) {
        std::vector<double> xs(n);
        xs[0] = sgn * e;
        for (int i = 1; i < n; ++i) xs[i] = xs_rest[i - 1];
        return eigenstate_g(ks, xs, p);
    };
    // quadratic Richardson extrapolation of the one-sided limit
    return (8.0 * eval(eta / 4.0) - 6.0 * eval(eta / 2.0) + eval(eta)) / 3.0;
}

cplx eigenstate_e(std::span<const double> ks, std::span<const double> xs,
                  const SystemParams& p) {
    const int n = int(ks.size());
    if (p.coupling_v <= 0.0)
        throw std::invalid_argument("eigenstate_e: decoupled emitter (V = 0)");
    if (int(xs.size()) != n - 1)
        throw std::invalid_argument("eigenstate_e: need n-1 positions");
    const cplx jump =
        eigenstate_g_limit(ks, xs, p, +1) - eigenstate_g_limit(ks, xs, p, -1);
    return cplx(0.0, double(n) / p.coupling_vbar()) * jump;
}

cplx midpoint_value(std::span<const double> ks, std::span<const double> xs,
                    const SystemParams& p, double eta) {
    const int n = int(ks.size());
    if (xs.size() != ks.size()) throw std::invalid_argument("midpoint_value: size mismatch");
    int zi = 0;
    for (int i = 0; i < n; ++i)
        if (std::abs(xs[i]) < std::abs(xs[zi])) zi = i;
    if (eta <= 0.0) eta = 1e-10 / std::max(p.gamma(), 1e-12);

    std::vector<double> xp(xs.begin(), xs.end()), xm(xs.begin(), xs.end());
    xp[zi] = eta;
    xm[zi] = -eta;
    return 0.5 * (eigenstate_g(ks, xp, p) + eigenstate_g(ks, xm, p));
}

double schrodinger_residual(std::span<const double> ks, std::span<const double> xs,
                            const SystemParams& p, double h) {
    const int n = int(ks.size());
    if (h <= 0.0) throw std::invalid_argument("schrodinger_residual: h must be > 0");
    for (int i = 0; i < n; ++i) {
        if (std::abs(xs[i]) <= 2.5 * h)
            throw std::domain_error("schrodinger_residual: stencil straddles the origin");
        for (int j = i + 1; j < n; ++j)
            if (std::abs(xs[i] - xs[j]) <= h)
                throw std::domain_error("schrodinger_residual: coincident positions");
    }

    auto shifted = [&](double tau) {
        std::vector<double> y(xs.begin(), xs.end());
        for (double& v : y) v += tau;
        return eigenstate_g(ks, y, p);
    };

    const cplx g0 = eigenstate_g(ks, xs, p);
    const cplx d =
        (-shifted(2.0 * h) + 8.0 * shifted(h) - 8.0 * shifted(-h) + shifted(-2.0 * h)) /
        (12.0 * h);
    double energy = 0.0;
    for (double k : ks) energy += k;

    const cplx residual = cplx(0.0, -1.0) * d - energy * g0;
    return std::abs(residual) / (std::abs(g0) + 1e-300);
}

}  // namespace wqed
