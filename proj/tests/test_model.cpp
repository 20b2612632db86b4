#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wqed/model.hpp"
#include "wqed/quadrature.hpp"

using namespace wqed;

TEST_CASE("derived rates") {
    SystemParams p(10.0, 0.5, 0.2);
    CHECK(p.gamma_c() == 2.0 * 0.5 * 0.5);
    CHECK(p.gamma() == p.gamma_c() + 0.2);
    CHECK(p.coupling_vbar() == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-15));
    CHECK_THROWS(SystemParams(10.0, -0.1, 0.0));
    CHECK_THROWS(SystemParams(10.0, 0.1, -0.1));
}

TEST_CASE("even transmission on resonance and at the half-width point") {
    SystemParams p(10.0, 0.5, 0.0);
    CHECK(std::abs(even_transmission(10.0, p) - cplx(-1.0, 0.0)) < 1e-14);
    // k - eps = Gamma_c/2 gives (1-i)/(1+i) = -i
    CHECK(std::abs(even_transmission(10.0 + 0.5 * p.gamma_c(), p) - cplx(0.0, -1.0)) < 1e-14);
}

TEST_CASE("unimodular for lossless coupling") {
    SystemParams p(7.0, 0.3, 0.0);
    for (double k : {-3.0, 0.0, 6.9, 7.0, 7.1, 30.0})
        CHECK(std::abs(std::abs(even_transmission(k, p)) - 1.0) < 1e-12);
}

TEST_CASE("decoupled singular point") {
    SystemParams p(10.0, 0.0, 0.0);
    CHECK(even_transmission(10.0, p) == cplx(1.0, 0.0));
    auto c = chiral_coefficients(10.0, p);
    CHECK(c.t == cplx(1.0, 0.0));
    CHECK(c.r == cplx(0.0, 0.0));
}

TEST_CASE("lab coefficients") {
    SystemParams p(10.0, 0.5, 0.0);
    auto on = chiral_coefficients(10.0, p);
    CHECK(std::abs(on.t) < 1e-14);
    CHECK(std::abs(on.r - cplx(-1.0, 0.0)) < 1e-14);

    auto hw = chiral_coefficients(10.0 + 0.5 * p.gamma_c(), p);
    CHECK(std::norm(hw.t) + std::norm(hw.r) == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uk(-20.0, 20.0), uv(0.0, 2.0), ug(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        SystemParams pr(10.0, uv(rng), ug(rng));
        auto c = chiral_coefficients(uk(rng), pr);
        CHECK(std::abs(c.t - c.r - 1.0) < 1e-15);
    }
}

TEST_CASE("phase winds by 2 pi across resonance, monotone") {
    // sweeping k downward through resonance unwinds the phase by -2 pi
    SystemParams p(10.0, 0.4, 0.0);
    const double gc = p.gamma_c();
    const int n = 4000;
    double prev = std::arg(even_transmission(10.0 + 400.0 * gc, p));
    double unwrapped = prev;
    for (int i = 1; i <= n; ++i) {
        const double k = 10.0 + 400.0 * gc - 800.0 * gc * double(i) / n;
        double a = std::arg(even_transmission(k, p));
        double d = a - prev;
        while (d > M_PI) d -= 2.0 * M_PI;
        while (d < -M_PI) d += 2.0 * M_PI;
        CHECK(d <= 1e-12);  // monotone decreasing through resonance
        unwrapped += d;
        prev = a;
    }
    CHECK(unwrapped - std::arg(even_transmission(10.0 + 400.0 * gc, p)) ==
          doctest::Approx(-2.0 * M_PI).epsilon(2e-3));
}

TEST_CASE("scaling covariance") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uk(5.0, 15.0);
    for (double s : {0.5, 2.0, 7.0}) {
        for (int i = 0; i < 20; ++i) {
            const double k = uk(rng);
            SystemParams p(10.0, 0.4, 0.15);
            SystemParams ps(s * 10.0, std::sqrt(s) * 0.4, s * 0.15);
            CHECK(std::abs(even_transmission(k, p) - even_transmission(s * k, ps)) < 1e-12);
        }
    }
}

TEST_CASE("packet amplitude and normalization") {
    GaussianPacket pkt(10.0, 0.1);
    CHECK(packet_amplitude(10.0, pkt, PacketKind::fock) ==
          doctest::Approx(std::pow(2.0 * M_PI * 0.01, -0.25)).epsilon(1e-14));

    QuadratureSpec q;
    q.rel_tol = 1e-12;
    q.abs_tol = 1e-14;
    auto norm = integrate(
        [&](double k) {
            const double a = packet_amplitude(k, pkt, PacketKind::fock);
            return a * a;
        },
        10.0 - 1.5, 10.0 + 1.5, q);
    CHECK(std::abs(norm.value - 1.0) < 1e-10);

    GaussianPacket coh(10.0, 0.1, 0.64);
    auto norm2 = integrate(
        [&](double k) {
            const double a = packet_amplitude(k, coh, PacketKind::coherent);
            return a * a;
        },
        10.0 - 1.5, 10.0 + 1.5, q);
    CHECK(std::abs(norm2.value - 0.64) < 1e-10);
}

TEST_CASE("narrowband flag") {
    CHECK(GaussianPacket(10.0, 0.1).narrowband());
    CHECK_FALSE(GaussianPacket(1.0, 0.1).narrowband());
    CHECK_THROWS(GaussianPacket(10.0, 0.0));
}
