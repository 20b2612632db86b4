#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "wqed/quadrature.hpp"
#include "wqed/spline.hpp"

using namespace wqed;
using cplx = std::complex<double>;

TEST_CASE("gaussian over a wide window") {
    QuadratureSpec q;
    q.rel_tol = 1e-10;
    q.abs_tol = 1e-14;
    auto r = integrate([](double x) { return std::exp(-x * x); }, -12.0, 12.0, q);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
}

TEST_CASE("complex oscillatory integrand") {
    QuadratureSpec q;
    q.rel_tol = 1e-10;
    q.abs_tol = 1e-14;
    const double k = 7.0;
    auto r = integrate(
        [&](double x) { return std::polar(1.0, k * x) * std::exp(-x * x); }, -12.0, 12.0, q);
    const double exact = std::sqrt(M_PI) * std::exp(-k * k / 4.0);
    CHECK(std::abs(r.value - cplx(exact, 0.0)) < 1e-10);
}

TEST_CASE("narrow lorentzian with breakpoints") {
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    q.abs_tol = 1e-14;
    const double g = 1e-4;
    std::vector<double> bp{-4.0 * g, -g, 0.0, g, 4.0 * g};
    auto r = integrate([&](double x) { return g / (x * x + g * g); }, -1.0, 1.0, q, bp);
    CHECK(r.value == doctest::Approx(2.0 * std::atan(1.0 / g)).epsilon(1e-9));
}

TEST_CASE("subdivision budget reports non-convergence") {
    QuadratureSpec q;
    q.rel_tol = 1e-14;
    q.abs_tol = 1e-300;
    q.max_subdivisions = 2;
    auto r = integrate([](double x) { return 1.0 / std::sqrt(std::abs(x) + 1e-12); }, -1.0, 1.0, q);
    CHECK_FALSE(r.converged);
}

TEST_CASE("fixed scheme matches adaptive") {
    QuadratureSpec qa, qf;
    qf.scheme = QuadratureSpec::Scheme::fixed;
    qf.fixed_panels = 96;
    auto f = [](double x) { return std::cos(3.0 * x) * std::exp(-0.3 * x * x); };
    auto a = integrate(f, -8.0, 8.0, qa);
    auto b = integrate(f, -8.0, 8.0, qf);
    CHECK(std::abs(a.value - b.value) < 1e-10);
}

TEST_CASE("2d and 3d tensor integration") {
    QuadratureSpec q;
    q.rel_tol = 1e-8;
    q.abs_tol = 1e-12;
    QuadBox b2;
    b2.dim = 2;
    b2.lo = {-6.0, -6.0, 0.0};
    b2.hi = {6.0, 6.0, 0.0};
    auto r2 = integrate_nd(
        [](std::span<const double> x) { return std::exp(-x[0] * x[0] - 2.0 * x[1] * x[1]); }, b2,
        q);
    CHECK(r2.value == doctest::Approx(std::sqrt(M_PI) * std::sqrt(M_PI / 2.0)).epsilon(1e-8));

    QuadBox b3;
    b3.dim = 3;
    b3.lo = {0.0, 0.0, 0.0};
    b3.hi = {1.0, 1.0, 1.0};
    auto r3 = integrate_nd(
        [](std::span<const double> x) { return x[0] * x[1] * x[2] * std::exp(x[0]); }, b3, q);
    CHECK(r3.value == doctest::Approx(0.25).epsilon(1e-8));  // int x e^x = 1 on [0,1]
}

TEST_CASE("cubic spline interpolates smooth data") {
    const int n = 200;
    std::vector<cplx> ys(n);
    for (int i = 0; i < n; ++i) {
        const double x = -3.0 + 6.0 * i / (n - 1);
        ys[i] = cplx(std::sin(2.0 * x), std::cos(x)) * std::exp(-0.2 * x * x);
    }
    UniformCubicSpline<cplx> s(-3.0, 6.0 / (n - 1), ys);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double x = -2.8 + 5.6 * i / 499.0;
        const cplx exact = cplx(std::sin(2.0 * x), std::cos(x)) * std::exp(-0.2 * x * x);
        worst = std::max(worst, std::abs(s(x) - exact));
    }
    CHECK(worst < 2e-6);
}

TEST_CASE("cauchy integral against adaptive quadrature") {
    const int n = 400;
    const double lo = -4.0, hi = 4.0;
    std::vector<cplx> ys(n);
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        ys[i] = std::exp(-x * x) * cplx(1.0, 0.3 * x);
    }
    UniformCubicSpline<cplx> s(lo, (hi - lo) / (n - 1), ys);

    QuadratureSpec q;
    q.rel_tol = 1e-11;
    q.abs_tol = 1e-15;
    for (cplx z : {cplx(0.3, -0.05), cplx(-1.0, -0.8), cplx(2.5, -0.002)}) {
        std::vector<double> bp{z.real() - 0.1, z.real(), z.real() + 0.1};
        auto ref = integrate([&](double x) { return s(x) / (x - z); }, lo, hi, q, bp);
        const cplx got = cauchy_integral(s, z);
        CHECK(std::abs(got - ref.value) < 1e-8 * std::abs(ref.value) + 1e-12);
    }
}

TEST_CASE("bicubic table reproduces a smooth surface") {
    const size_t nx = 80, ny = 60;
    const double x0 = -2.0, dx = 4.0 / (nx - 1);
    const double y0 = 0.0, dy = 3.0 / (ny - 1);
    auto f = [](double x, double y) {
        return cplx(std::sin(1.7 * x) * std::exp(-0.5 * y), std::cos(x + y));
    };
    std::vector<cplx> vals(nx * ny);
    for (size_t j = 0; j < ny; ++j)
        for (size_t i = 0; i < nx; ++i) vals[j * nx + i] = f(x0 + dx * i, y0 + dy * j);
    BicubicTable t(x0, dx, nx, y0, dy, ny, std::move(vals));
    double worst = 0.0;
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) {
            const double x = -1.8 + 3.6 * i / 39.0, y = 0.1 + 2.8 * j / 39.0;
            worst = std::max(worst, std::abs(t(x, y) - f(x, y)));
        }
    CHECK(worst < 5e-6);
    CHECK(std::abs(t(-5.0, 1.0)) == 0.0);  // clamped outside
}
