#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

#include "ambientlink/error.hpp"
#include "ambientlink/kernel.hpp"
#include "support.hpp"

using namespace ambientlink;
using boost::math::quadrature::gauss_kronrod;

namespace {

double gk(const std::function<double(double)>& f, double a, double b)
{
    return gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

}

TEST_CASE("window and spectrum normalizations")
{
    for (const auto shape : {WindowShape::triangle, WindowShape::gaussian}) {
        const double h = WindowSpec::unit_half_width(shape);
        auto u = [shape](double t) { return WindowSpec::unit(shape, t); };
        CHECK(gk(u, -h, h) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(gk([&](double t) { return u(t) * u(t); }, -h, h) ==
              doctest::Approx(WindowSpec::unit_norm2(shape)).epsilon(1e-6));
        for (double x : {0.0, 0.7, 2.5, 6.0}) {
            const double ft = gk([&](double t) { return u(t) * std::cos(x * t); }, -h, h);
            CHECK(WindowSpec::unit_hat(shape, x) == doctest::Approx(ft).epsilon(1e-6));
        }
    }
    WindowSpec w;
    w.T = 7.0;
    CHECK(gk([&](double t) { return w.phi(t); }, -7.0, 7.0) == doctest::Approx(1.0).epsilon(1e-9));

    for (const auto shape : {SpectrumShape::boxcar, SpectrumShape::raised_cosine, SpectrumShape::truncated_gaussian}) {
        NoiseSpectrum s;
        s.shape = shape;
        const double h = s.s_max();
        CHECK(gk([&](double x) { return s.F0(x); }, -h, h) == doctest::Approx(pi).epsilon(1e-6));
        CHECK(s.band_power(s.omega0 - s.B * h, s.omega0 + s.B * h) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.F0_primitive(0.1) == doctest::Approx(gk([&](double x) { return s.F0(x); }, -h, 0.1)).epsilon(1e-6));
    }
}

TEST_CASE("kernel expansion for an empty array is the free-space sinc")
{
    const Scene s = testing::default_scene();
    const double w = 2.0 * pi * 1.03;
    const double k = w;
    const double d = 0.5;
    const QTerms q = q_expansion(w, s.receivers.xr, s.receivers.xrp, {}, Background{});
    CHECK(q.total().real() == doctest::Approx(std::sin(k * d) / (4.0 * pi * k * d)).epsilon(1e-13));
    CHECK(q.total().imag() == 0.0);
    const QTerms auto_q = q_expansion(w, s.receivers.xr, s.receivers.xr, {}, Background{});
    CHECK(auto_q.total().real() == doctest::Approx(1.0 / (4.0 * pi)));
}

TEST_CASE("kernel expansion with one monopole")
{
    const Background bg{1.5};
    const double w = 4.0;
    const double k = w / bg.c0;
    const Vec3 xr{0.1, 0, 0}, xrp{-0.3, 0.2, 0}, z{0.4, -0.1, 3.0};
    const cplx rho(0.2, 0.35);
    const std::vector<Inclusion> inc{{z, Tunable{rho.real(), rho.imag(), true}, std::nullopt}};
    const QTerms q = q_expansion(w, xr, xrp, inc, bg);
    auto G = [&](const Vec3& a, const Vec3& b) {
        const double r = distance(a, b);
        return std::exp(cplx(0.0, k * r)) / (4.0 * pi * r);
    };
    CHECK(std::abs(q.term1 - G(xr, xrp).imag() / k) < 1e-15);
    CHECK(std::abs(q.term2 - (rho * G(xr, z) * G(xrp, z)).imag() / k) < 1e-15);
    CHECK(std::abs(q.term3 + rho.imag() * std::conj(G(xr, z)) * G(xrp, z) / k) < 1e-15);
    CHECK(q.term4 == cplx(0.0));
    CHECK(q.term5 == cplx(0.0));
}

TEST_CASE("kernel is Hermitian in the receiver pair and conjugate in frequency")
{
    std::mt19937_64 g(3);
    Scene s = testing::default_scene(4, 0.2, 0.05).with_state(true);
    for (int i = 0; i < 20; ++i) {
        const Vec3 a = testing::random_point(g, 1.0), b = testing::random_point(g, 1.0);
        const double w = 2.0 * pi * (0.9 + 0.2 * std::uniform_real_distribution<double>()(g));
        const cplx ab = q_expansion(w, a, b, s.surface.inclusions, s.background).total();
        const cplx ba = q_expansion(w, b, a, s.surface.inclusions, s.background).total();
        CHECK(std::abs(ab - std::conj(ba)) < 1e-14 * std::abs(ab));
        CHECK(q_hat(-w, a, b, s) == std::conj(q_hat(w, a, b, s)));
    }
}

TEST_CASE("standard Helmholtz-Kirchhoff residual shrinks with the shell radius")
{
    std::mt19937_64 g(11);
    const double w = 2.0 * pi;
    double r50 = 0.0, r100 = 0.0;
    for (int i = 0; i < 5; ++i) {
        const Vec3 x = testing::random_point(g, 1.0), y = testing::random_point(g, 1.0);
        r50 += hk_residual_standard(w, x, y, 50.0, 0, Background{});
        r100 += hk_residual_standard(w, x, y, 100.0, 0, Background{});
    }
    CHECK(r50 / 5.0 < 5e-3);
    CHECK(r100 < 0.5 * r50);
}

TEST_CASE("shell quadrature regime refusals")
{
    const Scene s = testing::default_scene(2);
    const double w = 2.0 * pi;
    const std::size_t need = nyquist_nodes(s.shell.L_src, 1.0);
    try {
        q_quadrature(w, s.receivers.xr, s.receivers.xrp, s, need / 2);
        FAIL("expected a regime refusal");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::regime);
        CHECK(e.value() == static_cast<double>(need));
    }
    Scene small = s;
    small.shell.L_src = 20.0;
    try {
        q_quadrature(w, s.receivers.xr, s.receivers.xrp, small, 0);
        FAIL("expected a regime refusal");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::regime);
    }
    CHECK_THROWS_AS(q_quadrature(-w, s.receivers.xr, s.receivers.xrp, s, 0), Error);
}

TEST_CASE("generalized Helmholtz-Kirchhoff identity for a weak array")
{
    Scene s = testing::default_scene(4, 0.1, 0.03).with_state(true);
    const double w = 2.0 * pi;
    const cplx q = q_expansion(w, s.receivers.xr, s.receivers.xrp, s.surface.inclusions, s.background).total();
    const double res = hk_residual_generalized(w, s.receivers.xr, s.receivers.xrp, s, 0);
    CHECK(res < 1e-3 * std::abs(q) + 1e-5);
}

TEST_CASE("mean_general for an empty array against an independent band integral")
{
    Scene s = testing::default_scene();
    s.surface.inclusions.clear();
    NoiseSpectrum sp;
    WindowSpec win;
    win.Tprime = 1.0 / sp.B;
    const double d = s.receivers.separation();
    auto q = [&](double w) { return std::sin(w * d) / (4.0 * pi * w * d); };
    for (double omega : {sp.omega0, sp.omega0 + 0.3 * sp.B}) {
        const double lo = sp.omega0 - 0.5 * sp.B, hi = sp.omega0 + 0.5 * sp.B;
        const double pos = gk([&](double w) { return sp.F(w) * q(w) * win.psi_hat(omega - w); }, lo, hi);
        const double neg = gk([&](double w) { return sp.F(w) * q(w) * win.psi_hat(omega + w); }, lo, hi);
        const double oracle = (pos + neg) / (2.0 * pi);
        const cplx m = mean_general(omega, s.receivers.xr, s.receivers.xrp, s, sp, win);
        CHECK(m.real() == doctest::Approx(oracle).epsilon(1e-10));
        CHECK(std::abs(m.imag()) < 1e-15);
    }
}

TEST_CASE("closed-form mean pieces")
{
    NoiseSpectrum sp;
    WindowSpec win;
    win.Tprime = 1.0 / sp.B;
    const Scene on = testing::default_scene().with_state(true);
    const ClosedFormMean m = mean_closed_form(on, sp, win);
    const double s2 = gk([&](double s) { return s * s * sp.F0(s) * win.psi_hat(sp.B * s); }, -0.5, 0.5);
    CHECK(m.mean_I == doctest::Approx(s2 * sp.B * sp.B / (8.0 * pi * pi * sp.omega0 * sp.omega0)).epsilon(1e-10));
    CHECK(m.alpha == doctest::Approx(std::acos(0.25 / std::sqrt(100.0625))));
    // Tunable rho has a frequency-flat imaginary part rho1, so rho_B = i rho1 * integral F0 psi_hat.
    const double band = gk([&](double s) { return sp.F0(s) * win.psi_hat(sp.B * s); }, -0.5, 0.5);
    CHECK(m.rho_B.imag() == doctest::Approx(0.1 * band).epsilon(1e-10));
    const double J = 64.0, L = on.L();
    CHECK(std::abs(m.mean_III) == doctest::Approx(J * 0.1 * band / (64.0 * std::pow(pi, 4) * L * L)).epsilon(1e-10));
    CHECK(std::abs(r_B1(on.surface, on.receivers.xr, sp.omega0, on.background)) <= 1.0);

    // The off state has no imaginary reflectivity, so mean_III vanishes.
    const ClosedFormMean off = mean_closed_form(on.with_state(false), sp, win);
    CHECK(std::abs(off.mean_III) == 0.0);

    Scene wide = on;
    wide.receivers.xrp = {0.4, 0.0, 0.0};
    CHECK_THROWS_AS(mean_closed_form(wide, sp, win), Error);
    WindowSpec bad = win;
    bad.Tprime = 2.0 / sp.B;
    CHECK_THROWS_AS(mean_closed_form(on, sp, bad), Error);
}

TEST_CASE("closed-form mean tracks mean_general in a paraxial scene")
{
    NoiseSpectrum sp;
    WindowSpec win;
    win.Tprime = 1.0 / sp.B;
    Scene s = testing::default_scene(8, 0.1);
    s.surface = make_metasurface(8, 4.0, {0, 0, 30}, {0, 0, -1}, Tunable{0.0, 0.1, false});
    const Scene on = s.with_state(true), off = s.with_state(false);
    const cplx diff = mean_general(sp.omega0, on.receivers.xr, on.receivers.xrp, on, sp, win) -
                      mean_general(sp.omega0, off.receivers.xr, off.receivers.xrp, off, sp, win);
    const ClosedFormMean m = mean_closed_form(on, sp, win);
    const ClosedFormMean m0 = mean_closed_form(off, sp, win);
    const cplx closed = m.total() - m0.total();
    CHECK(std::abs(diff - closed) < 0.05 * std::abs(closed));
}

TEST_CASE("mean is independent of the averaging window length")
{
    NoiseSpectrum sp;
    WindowSpec a, b;
    a.Tprime = b.Tprime = 1.0 / sp.B;
    a.T = 50.0 / sp.B;
    b.T = 400.0 / sp.B;
    const Scene on = testing::default_scene().with_state(true);
    CHECK(mean_general(sp.omega0, on.receivers.xr, on.receivers.xrp, on, sp, a) ==
          mean_general(sp.omega0, on.receivers.xr, on.receivers.xrp, on, sp, b));
    CHECK(mean_closed_form(on, sp, a).total() == mean_closed_form(on, sp, b).total());
}

TEST_CASE("closed-form variance scaling and the general variance")
{
    NoiseSpectrum sp;
    WindowSpec w;
    w.Tprime = 1.0 / sp.B;
    w.T = 100.0 / sp.B;
    const double v = var_closed_form(sp, w);
    // Boxcar F0 = pi, so the integral is pi^2 times the band integral of psi_hat^2.
    const double band = gk([&](double s) { return std::exp(-s * s / 2.0); }, -0.5, 0.5);
    CHECK(v == doctest::Approx(w.phi_norm2() * pi * pi * band / (32.0 * pi * pi * pi * 100.0)).epsilon(1e-10));
    WindowSpec w2 = w;
    w2.T *= 4.0;
    CHECK(var_closed_form(sp, w2) == doctest::Approx(v / 4.0).epsilon(1e-12));

    const Scene on = testing::default_scene().with_state(true);
    const double vg = var_general(sp.omega0, on.receivers.xr, on.receivers.xrp, on, sp, w);
    CHECK(vg == doctest::Approx(v).epsilon(0.05));
}

TEST_CASE("Fresnel integrals against direct quadrature")
{
    CHECK(fresnel_cs(1.0).C == doctest::Approx(0.9045242379002720).epsilon(1e-13));
    CHECK(fresnel_cs(1.0).S == doctest::Approx(0.3102683017233811).epsilon(1e-13));
    for (double d : {0.2, 1.3, 1.5, 1.7, 3.0, 5.9, 6.1, 9.0, 14.0}) {
        const double c = gk([](double t) { return std::cos(t * t); }, 0.0, d);
        const double s = gk([](double t) { return std::sin(t * t); }, 0.0, d);
        const FresnelPair p = fresnel_cs(d);
        CHECK(p.C == doctest::Approx(c).epsilon(1e-9));
        CHECK(p.S == doctest::Approx(s).epsilon(1e-9));
        const FresnelPair m = fresnel_cs(-d);
        CHECK(m.C == -p.C);
        CHECK(m.S == -p.S);
    }
    const FresnelPair far = fresnel_cs(1e4);
    CHECK(far.C == doctest::Approx(0.5 * std::sqrt(pi / 2.0)).epsilon(1e-4));
    CHECK(far.S == doctest::Approx(0.5 * std::sqrt(pi / 2.0)).epsilon(1e-4));
}

TEST_CASE("Fresnel bound in the default scene")
{
    const Scene s = testing::default_scene();
    const FresnelCheck f = fresnel_bound_check(s.surface, s.receivers.xr, 2.0 * pi, s.background);
    CHECK(f.abs_R_B1 == doctest::Approx(std::abs(r_B1(s.surface, s.receivers.xr, 2.0 * pi, s.background))));
    CHECK(f.bound > 0.0);
}

TEST_CASE("measurement noise variance")
{
    WindowSpec w;
    w.Tprime = 1.0;
    w.T = 100.0;
    const double v = measurement_noise_var(0.2, 0.05, w);
    CHECK(measurement_noise_var(0.4, 0.05, w) == doctest::Approx(16.0 * v));
    CHECK(measurement_noise_var(0.2, 0.025, w) == doctest::Approx(0.25 * v));
    CHECK_THROWS_AS(measurement_noise_var(0.2, 0.2, w), Error);
    CHECK_THROWS_AS(measurement_noise_var(0.2, 0.0, w), Error);
}

TEST_CASE("link budget bookkeeping")
{
    NoiseSpectrum sp;
    WindowSpec w;
    w.Tprime = 1.0 / sp.B;
    w.T = 100.0 / sp.B;
    const Scene s = testing::default_scene();
    const LinkBudget b = snr_budget(s, sp, w, 0.1);
    const double strength = 64.0 * 1.0 * 0.1 / (b.L * b.L);
    CHECK(b.cond_ratio == doctest::Approx(strength * 10.0));
    CHECK(b.implied_rate == doctest::Approx(sp.B * strength * strength / 10.0));
    CHECK(b.rate == doctest::Approx(1.0 / (4.0 * w.T)));
    CHECK(b.snr_ratio == doctest::Approx(std::abs(b.mean_III) / std::sqrt(b.variance)));
    const WindowSpec w_snr{b.T_for_snr, w.Tprime};
    CHECK(snr_budget(s, sp, w_snr, 0.1).snr_ratio == doctest::Approx(std::sqrt(10.0)).epsilon(1e-9));
}
