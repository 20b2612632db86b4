#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

// Interpolation support: natural cubic splines on uniform grids (real or
// complex values), a tensor-product cubic B-spline surface, and the exact
// Cauchy-kernel integral of a cubic spline against 1/(x - z) for complex z
// off the real axis.

namespace wqed {

template <typename T>
class UniformCubicSpline {
  public:
    UniformCubicSpline() = default;

    // ys sampled at x0 + i*dx, natural boundary conditions
    UniformCubicSpline(double x0, double dx, std::vector<T> ys)
        : x0_(x0), dx_(dx), y_(std::move(ys)) {
        const size_t n = y_.size();
        if (n < 3) throw std::invalid_argument("UniformCubicSpline: need >= 3 nodes");
        // solve tridiagonal system for second derivatives
        m_.assign(n, T{});
        std::vector<T> rhs(n, T{});
        std::vector<double> diag(n, 2.0), off(n, 0.5);
        for (size_t i = 1; i + 1 < n; ++i)
            rhs[i] = 3.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (dx_ * dx_);
        // natural: m_0 = m_{n-1} = 0; inner system (1/2,2,1/2)
        std::vector<double> c(n, 0.0);
        std::vector<T> d(n, T{});
        for (size_t i = 1; i + 1 < n; ++i) {
            const double m = (i == 1) ? diag[i] : diag[i] - off[i] * c[i - 1];
            c[i] = off[i] / m;
            const T prev = (i == 1) ? T{} : d[i - 1];
            d[i] = (rhs[i] - off[i] * prev) / m;
        }
        for (size_t i = n - 2; i >= 1; --i) {
            m_[i] = d[i] - c[i] * m_[i + 1];
            if (i == 1) break;
        }
    }

    T operator()(double x) const {
        const size_t n = y_.size();
        double t = (x - x0_) / dx_;
        if (t <= 0.0) return y_.front();
        if (t >= double(n - 1)) return y_.back();
        const size_t i = std::min<size_t>(size_t(t), n - 2);
        const double a = t - double(i);
        const double b = 1.0 - a;
        return b * y_[i] + a * y_[i + 1] +
               (dx_ * dx_ / 6.0) *
                   ((b * b * b - b) * m_[i] + (a * a * a - a) * m_[i + 1]);
    }

    double x_min() const { return x0_; }
    double x_max() const { return x0_ + dx_ * double(y_.size() - 1); }
    double dx() const { return dx_; }
    size_t size() const { return y_.size(); }
    const std::vector<T>& values() const { return y_; }
    const std::vector<T>& second_derivatives() const { return m_; }

  private:
    double x0_ = 0.0, dx_ = 1.0;
    std::vector<T> y_, m_;
};

// Integral of the spline against 1/(x - z) over its full support.
// Requires Im z != 0.  Pieces near the pole integrate in closed form with
// a complex log (both endpoints of a piece sit in the same half plane
// relative to z, so the principal branch is continuous); far pieces use a
// 4-point Gauss rule, whose error decays as (h / 2 dist)^8.
template <typename T>
std::complex<double> cauchy_integral(const UniformCubicSpline<T>& s, std::complex<double> z) {
    using C = std::complex<double>;
    if (z.imag() == 0.0) throw std::invalid_argument("cauchy_integral: pole on the real axis");
    static constexpr double gx[4] = {-0.861136311594053, -0.339981043584856,
                                     0.339981043584856, 0.861136311594053};
    static constexpr double gw[4] = {0.347854845137454, 0.652145154862546,
                                     0.652145154862546, 0.347854845137454};
    const double h = s.dx();
    const auto& y = s.values();
    const auto& m = s.second_derivatives();
    const double zr = z.real(), zi = std::abs(z.imag());
    C total{};
    for (size_t i = 0; i + 1 < y.size(); ++i) {
        const double xa = s.x_min() + h * double(i);
        // cubic on [0,h] in local coordinate u = x - xa:
        // f(u) = c0 + c1 u + c2 u^2 + c3 u^3
        const C yi = C(y[i]), yi1 = C(y[i + 1]), mi = C(m[i]), mi1 = C(m[i + 1]);
        const C c0 = yi;
        const C c2 = 0.5 * mi;
        const C c3 = (mi1 - mi) / (6.0 * h);
        const C c1 = (yi1 - yi) / h - h * (2.0 * mi + mi1) / 6.0;
        const double dist = std::hypot(xa + 0.5 * h - zr, zi);
        if (dist > 8.0 * h) {
            C acc{};
            for (int gq = 0; gq < 4; ++gq) {
                const double u = 0.5 * h * (1.0 + gx[gq]);
                acc += gw[gq] * (c0 + u * (c1 + u * (c2 + u * c3))) / (xa + u - z);
            }
            total += 0.5 * h * acc;
            continue;
        }
        // shift to v = u - w with w = z - xa: f = sum d_k v^k
        const C w = z - xa;
        const C d0 = c0 + w * (c1 + w * (c2 + w * c3));
        const C d1 = c1 + w * (2.0 * c2 + 3.0 * w * c3);
        const C d2 = c2 + 3.0 * w * c3;
        const C d3 = c3;
        const C va = -w, vb = h - w;  // v at the interval ends
        const C lg = std::log(vb / va);
        total += d0 * lg + d1 * (vb - va) + d2 * 0.5 * (vb * vb - va * va) +
                 d3 * (vb * vb * vb - va * va * va) / 3.0;
    }
    return total;
}

// Tensor-product interpolating cubic B-spline on a uniform 2D grid.
// Coefficients come from the separable (1 4 1)/6 systems with not-a-knot-free
// natural edges; evaluation is a local 4x4 basis combination.  Outside the
// grid the surface is clamped to zero (the tabulated kernels decay to
// negligible values well inside the boundary).
class BicubicTable {
  public:
    using C = std::complex<double>;

    BicubicTable() = default;

    BicubicTable(double x0, double dx, size_t nx, double y0, double dy, size_t ny,
                 std::vector<C> values)
        : x0_(x0), dx_(dx), nx_(nx), y0_(y0), dy_(dy), ny_(ny) {
        if (values.size() != nx * ny) throw std::invalid_argument("BicubicTable: size mismatch");
        if (nx < 4 || ny < 4) throw std::invalid_argument("BicubicTable: need >= 4 nodes per axis");
        coef_.assign((nx + 2) * (ny + 2), C{});
        // interpolate along x for each y-row, then along y
        std::vector<C> tmp((nx + 2) * ny);
        std::vector<C> line, sol;
        for (size_t j = 0; j < ny; ++j) {
            line.assign(nx, C{});
            for (size_t i = 0; i < nx; ++i) line[i] = values[j * nx + i];
            solve_bspline_line(line, sol);
            for (size_t i = 0; i < nx + 2; ++i) tmp[j * (nx + 2) + i] = sol[i];
        }
        for (size_t i = 0; i < nx + 2; ++i) {
            line.assign(ny, C{});
            for (size_t j = 0; j < ny; ++j) line[j] = tmp[j * (nx + 2) + i];
            solve_bspline_line(line, sol);
            for (size_t j = 0; j < ny + 2; ++j) coef_[j * (nx + 2) + i] = sol[j];
        }
    }

    bool empty() const { return coef_.empty(); }

    C operator()(double x, double y) const {
        const double tx = (x - x0_) / dx_, ty = (y - y0_) / dy_;
        if (tx < 0.0 || tx > double(nx_ - 1) || ty < 0.0 || ty > double(ny_ - 1)) return C{};
        const size_t ix = std::min<size_t>(size_t(tx), nx_ - 2);
        const size_t iy = std::min<size_t>(size_t(ty), ny_ - 2);
        const double ux = tx - double(ix), uy = ty - double(iy);
        double bx[4], by[4];
        basis(ux, bx);
        basis(uy, by);
        C acc{};
        for (int j = 0; j < 4; ++j) {
            C row{};
            const size_t off = (iy + j) * (nx_ + 2) + ix;
            for (int i = 0; i < 4; ++i) row += bx[i] * coef_[off + i];
            acc += by[j] * row;
        }
        return acc;
    }

  private:
    static void basis(double u, double b[4]) {
        const double v = 1.0 - u;
        b[0] = v * v * v / 6.0;
        b[1] = (3.0 * u * u * u - 6.0 * u * u + 4.0) / 6.0;
        b[2] = (-3.0 * u * u * u + 3.0 * u * u + 3.0 * u + 1.0) / 6.0;
        b[3] = u * u * u / 6.0;
    }

    // Solve for n+2 B-spline coefficients interpolating n samples, with
    // natural end conditions (zero second derivative at both ends).
    static void solve_bspline_line(const std::vector<C>& f, std::vector<C>& c) {
        const size_t n = f.size();
        c.assign(n + 2, C{});
        // unknowns c[0..n+1]; equations:
        //   c[0] - 2 c[1] + c[2] = 0
        //   (c[i] + 4 c[i+1] + c[i+2])/6 = f[i],  i = 0..n-1
        //   c[n-1] - 2 c[n] + c[n+1] = 0
        // eliminate c[0] and c[n+1]:
        //   row 0: (c[0]+4c[1]+c[2])/6 = f[0] with c[0] = 2c[1]-c[2]
        //          -> c[1] = f[0]
        // and similarly c[n] = f[n-1].
        c[1] = f[0];
        c[n] = f[n - 1];
        // interior tridiagonal for c[2..n-1]: equations
        //   c[i] + 4 c[i+1] + c[i+2] = 6 f[i],  i = 1..n-2
        if (n > 2) {
            const size_t m = n - 2;
            std::vector<double> cp(m, 0.0);
            std::vector<C> dp(m, C{});
            for (size_t k = 0; k < m; ++k) {
                C rhs = 6.0 * f[k + 1];
                if (k == 0) rhs -= c[1];
                if (k == m - 1) rhs -= c[n];
                const double denom = (k == 0) ? 4.0 : 4.0 - cp[k - 1];
                cp[k] = (k == m - 1) ? 0.0 : 1.0 / denom;
                dp[k] = (rhs - (k == 0 ? C{} : dp[k - 1])) / denom;
            }
            for (size_t k = m; k-- > 0;)
                c[k + 2] = (k == m - 1) ? dp[k] : dp[k] - cp[k] * c[k + 3];
        }
        c[0] = 2.0 * c[1] - c[2];
        c[n + 1] = 2.0 * c[n] - c[n - 1];
    }

    double x0_ = 0, dx_ = 1;
    size_t nx_ = 0;
    double y0_ = 0, dy_ = 1;
    size_t ny_ = 0;
    std::vector<C> coef_;
};

}  // namespace wqed
