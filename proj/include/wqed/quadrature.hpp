#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

// Adaptive quadrature on finite windows: Gauss-Kronrod 7-15 panels in 1D,
// tensor GK panels with bisection of the worst box in 2D/3D.  Integrands
// are complex; the embedded Gauss rule provides the error estimate.  The
// integrands this project meets are Gaussians times Lorentzians, so
// callers may seed interior breakpoints where a Lorentzian is much
// narrower than the window.

namespace wqed {

struct QuadratureSpec {
    double rel_tol = 1e-5;
    double abs_tol = 1e-9;
    double window_halfwidth = 10.0;  // in units of the packet width
    int max_subdivisions = 20000;
    enum class Scheme { adaptive, fixed } scheme = Scheme::adaptive;
    int fixed_panels = 64;  // used by Scheme::fixed

    void validate() const {
        if (rel_tol <= 0.0) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
        if (window_halfwidth < 6.0)
            throw std::invalid_argument("QuadratureSpec: window_halfwidth must be >= 6");
    }
};

template <typename T>
struct QuadResult {
    T value{};
    double error = 0.0;
    long evaluations = 0;
    bool converged = true;
};

namespace detail {

// 15-point Kronrod nodes on [-1,1]; odd entries are the embedded 7-point
// Gauss nodes.
inline constexpr std::array<double, 15> gk_x = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898,  0.0,                0.207784955007898,
     0.405845151377397,  0.586087235467691,  0.741531185599394,
     0.864864423359769,  0.949107912342759,  0.991455371120813};

inline constexpr std::array<double, 15> gk_wk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};

inline constexpr std::array<double, 15> gk_wg = {
    0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
    0.381830050505119, 0.0, 0.417959183673469, 0.0,
    0.381830050505119, 0.0, 0.279705391489277, 0.0,
    0.129484966168870, 0.0};

inline double cnorm(const std::complex<double>& z) { return std::abs(z); }
inline double cnorm(double x) { return std::abs(x); }

}  // namespace detail

// Single GK15 panel with embedded error estimate.
template <typename F, typename T = std::invoke_result_t<F, double>>
QuadResult<T> gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T acc_k{}, acc_g{};
    for (int i = 0; i < 15; ++i) {
        T v = f(c + h * detail::gk_x[i]);
        acc_k += detail::gk_wk[i] * v;
        acc_g += detail::gk_wg[i] * v;
    }
    QuadResult<T> r;
    r.value = h * acc_k;
    r.error = detail::cnorm(h * (acc_k - acc_g));
    // sharpen the raw difference the usual way so smooth panels are not
    // over-refined
    r.error = std::min(r.error, std::pow(200.0 * r.error, 1.5));
    r.evaluations = 15;
    return r;
}

// Adaptive 1D integration over [a, b].  Optional breakpoints pre-split
// the interval.
template <typename F, typename T = std::invoke_result_t<F, double>>
QuadResult<T> integrate(F&& f, double a, double b, const QuadratureSpec& spec,
                        std::span<const double> breakpoints = {}) {
    if (!(b > a)) return {};

    if (spec.scheme == QuadratureSpec::Scheme::fixed) {
        QuadResult<T> total;
        const int n = std::max(1, spec.fixed_panels);
        for (int i = 0; i < n; ++i) {
            auto p = gk15_panel(f, a + (b - a) * i / n, a + (b - a) * (i + 1) / n);
            total.value += p.value;
            total.error += p.error;
            total.evaluations += p.evaluations;
        }
        return total;
    }

    struct Seg {
        double a, b, err;
        T val;
        std::uint64_t id;
        bool operator<(const Seg& o) const {
            return err != o.err ? err < o.err : id > o.id;
        }
    };

    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    std::priority_queue<Seg> heap;
    T total{};
    double toterr = 0.0;
    long evals = 0;
    std::uint64_t next_id = 0;

    auto push = [&](double lo, double hi) {
        auto p = gk15_panel(f, lo, hi);
        evals += p.evaluations;
        heap.push({lo, hi, p.error, p.value, next_id++});
        total += p.value;
        toterr += p.error;
    };
    for (size_t i = 0; i + 1 < cuts.size(); ++i) push(cuts[i], cuts[i + 1]);

    int splits = 0;
    while (toterr > std::max(spec.abs_tol, spec.rel_tol * detail::cnorm(total)) &&
           splits < spec.max_subdivisions) {
        Seg s = heap.top();
        heap.pop();
        total -= s.val;
        toterr -= s.err;
        const double mid = 0.5 * (s.a + s.b);
        push(s.a, mid);
        push(mid, s.b);
        ++splits;
    }

    // re-sum from the heap so incremental updates leave no roundoff drift
    T resum{};
    double reerr = 0.0;
    while (!heap.empty()) {
        resum += heap.top().val;
        reerr += heap.top().err;
        heap.pop();
    }
    QuadResult<T> r;
    r.value = resum;
    r.error = reerr;
    r.evaluations = evals;
    r.converged =
        reerr <= std::max(spec.abs_tol, spec.rel_tol * detail::cnorm(resum)) * 1.0001 + 1e-300;
    return r;
}

// Axis-aligned box for the multidimensional integrator.
struct QuadBox {
    std::array<double, 3> lo{}, hi{};
    int dim = 0;
};

// Adaptive tensor-GK integration over a box of dimension 1..3.  The worst
// box is bisected along its widest axis (relative to the initial extent).
// Per-axis breakpoints seed the initial subdivision.
template <typename F, typename T = std::invoke_result_t<F, std::span<const double>>>
QuadResult<T> integrate_nd(F&& f, const QuadBox& box, const QuadratureSpec& spec,
                           const std::vector<std::vector<double>>& axis_breakpoints = {}) {
    const int d = box.dim;
    if (d < 1 || d > 3) throw std::invalid_argument("integrate_nd: dim must be 1..3");

    struct Node {
        std::array<double, 3> lo, hi;
        T val;
        double err;
        std::uint64_t id;
        bool operator<(const Node& o) const {
            return err != o.err ? err < o.err : id > o.id;
        }
    };

    std::array<double, 3> scale{};
    for (int i = 0; i < d; ++i) scale[i] = box.hi[i] - box.lo[i];

    auto eval_box = [&](const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                        T& val, double& err) -> long {
        std::array<double, 3> c{}, h{};
        for (int i = 0; i < d; ++i) {
            c[i] = 0.5 * (lo[i] + hi[i]);
            h[i] = 0.5 * (hi[i] - lo[i]);
        }
        T acc_k{}, acc_g{};
        std::array<double, 3> x{};
        long n = 0;
        const int n0 = 15, n1 = d > 1 ? 15 : 1, n2 = d > 2 ? 15 : 1;
        for (int i0 = 0; i0 < n0; ++i0) {
            x[0] = c[0] + h[0] * detail::gk_x[i0];
            const double wk0 = detail::gk_wk[i0], wg0 = detail::gk_wg[i0];
            for (int i1 = 0; i1 < n1; ++i1) {
                if (d > 1) x[1] = c[1] + h[1] * detail::gk_x[i1];
                const double wk1 = d > 1 ? detail::gk_wk[i1] : 1.0;
                const double wg1 = d > 1 ? detail::gk_wg[i1] : 1.0;
                for (int i2 = 0; i2 < n2; ++i2) {
                    if (d > 2) x[2] = c[2] + h[2] * detail::gk_x[i2];
                    const double wk2 = d > 2 ? detail::gk_wk[i2] : 1.0;
                    const double wg2 = d > 2 ? detail::gk_wg[i2] : 1.0;
                    T v = f(std::span<const double>(x.data(), d));
                    acc_k += (wk0 * wk1 * wk2) * v;
                    acc_g += (wg0 * wg1 * wg2) * v;
                    ++n;
                }
            }
        }
        double vol = 1.0;
        for (int i = 0; i < d; ++i) vol *= h[i];
        val = vol * acc_k;
        err = detail::cnorm(vol * (acc_k - acc_g));
        return n;
    };

    // initial grid from breakpoints
    std::array<std::vector<double>, 3> cuts;
    for (int i = 0; i < d; ++i) {
        cuts[i] = {box.lo[i]};
        if ((int)axis_breakpoints.size() > i)
            for (double x : axis_breakpoints[i])
                if (x > box.lo[i] && x < box.hi[i]) cuts[i].push_back(x);
        cuts[i].push_back(box.hi[i]);
        std::sort(cuts[i].begin(), cuts[i].end());
    }

    std::priority_queue<Node> heap;
    T total{};
    double toterr = 0.0;
    long evals = 0;
    std::uint64_t next_id = 0;

    auto push = [&](std::array<double, 3> lo, std::array<double, 3> hi) {
        Node nd{lo, hi, T{}, 0.0, next_id++};
        evals += eval_box(lo, hi, nd.val, nd.err);
        total += nd.val;
        toterr += nd.err;
        heap.push(nd);
    };

    const size_t n1c = d > 1 ? cuts[1].size() - 1 : 1;
    const size_t n2c = d > 2 ? cuts[2].size() - 1 : 1;
    for (size_t i0 = 0; i0 + 1 < cuts[0].size(); ++i0)
        for (size_t i1 = 0; i1 < n1c; ++i1)
            for (size_t i2 = 0; i2 < n2c; ++i2) {
                std::array<double, 3> lo{cuts[0][i0], 0, 0}, hi{cuts[0][i0 + 1], 0, 0};
                if (d > 1) { lo[1] = cuts[1][i1]; hi[1] = cuts[1][i1 + 1]; }
                if (d > 2) { lo[2] = cuts[2][i2]; hi[2] = cuts[2][i2 + 1]; }
                push(lo, hi);
            }

    int splits = 0;
    while (toterr > std::max(spec.abs_tol, spec.rel_tol * detail::cnorm(total)) &&
           splits < spec.max_subdivisions) {
        Node s = heap.top();
        heap.pop();
        total -= s.val;
        toterr -= s.err;
        int axis = 0;
        double w = -1.0;
        for (int i = 0; i < d; ++i) {
            const double rel = (s.hi[i] - s.lo[i]) / scale[i];
            if (rel > w) { w = rel; axis = i; }
        }
        const double mid = 0.5 * (s.lo[axis] + s.hi[axis]);
        auto hi1 = s.hi, lo2 = s.lo;
        hi1[axis] = mid;
        lo2[axis] = mid;
        push(s.lo, hi1);
        push(lo2, s.hi);
        ++splits;
    }

    T resum{};
    double reerr = 0.0;
    while (!heap.empty()) {
        resum += heap.top().val;
        reerr += heap.top().err;
        heap.pop();
    }
    QuadResult<T> r;
    r.value = resum;
    r.error = reerr;
    r.evaluations = evals;
    r.converged =
        reerr <= std::max(spec.abs_tol, spec.rel_tol * detail::cnorm(resum)) * 1.0001 + 1e-300;
    return r;
}

}  // namespace wqed
