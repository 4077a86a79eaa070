#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

#include "ambientlink/error.hpp"
#include "ambientlink/rng.hpp"
#include "ambientlink/synth.hpp"
#include "support.hpp"

using namespace ambientlink;

namespace {

struct Moments {
    double rr = 0.0, pp = 0.0, rp = 0.0, lag = 0.0;
    std::size_t n = 0;
};

// Time-and-ensemble averages over the main part of each record.
Moments moments(const FieldSynthesizer& synth, const SlotSchedule& schedule, std::size_t realizations,
                std::size_t lag)
{
    Moments m;
    for (std::size_t i = 0; i < realizations; ++i) {
        const FieldRecord rec = synth.realize(schedule, {99, i});
        const auto& a = rec.samples[0];
        const auto& b = rec.samples[1];
        for (std::size_t j = 0; j + lag < a.size(); ++j) {
            m.rr += a[j] * a[j];
            m.pp += b[j] * b[j];
            m.rp += a[j] * b[j];
            m.lag += a[j] * a[j + lag];
            ++m.n;
        }
    }
    const double n = static_cast<double>(m.n);
    m.rr /= n;
    m.pp /= n;
    m.rp /= n;
    m.lag /= n;
    return m;
}

double gk(const std::function<double(double)>& f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}

}

TEST_CASE("FFT sizes are the smallest 5-smooth length")
{
    auto smooth = [](std::size_t n) {
        for (std::size_t p : {2, 3, 5})
            while (n % p == 0) n /= p;
        return n == 1;
    };
    for (std::size_t n = 2; n < 3000; ++n) {
        std::size_t want = n;
        while (!smooth(want)) ++want;
        REQUIRE(fft_size_at_least(n) == want);
    }
}

TEST_CASE("sampling step")
{
    NoiseSpectrum sp;
    CHECK(default_dt(sp) == doctest::Approx(2.0 * pi / (5.0 * (sp.omega0 + sp.B))));
    CHECK(default_dt(sp, 4.0) == doctest::Approx(default_dt(sp) / 4.0));
}

TEST_CASE("record layout")
{
    NoiseSpectrum sp;
    WindowSpec w;
    w.Tprime = 1.0 / sp.B;
    w.T = 20.0 / sp.B;
    const FieldSynthesizer synth(testing::default_scene(), sp, w);
    const SlotSchedule sch = encode({1, 0}, 0.1, w.T, {1});
    const RecordLayout l = synth.layout(sch);
    REQUIRE(l.starts.size() == sch.n_slots() + 1);
    CHECK(l.t0 == doctest::Approx(-static_cast<double>(l.guard) * l.dt));
    CHECK(static_cast<double>(l.guard) * l.dt >= w.psi_half_width());
    CHECK(l.t0 + static_cast<double>(l.n_samples - 1) * l.dt >= sch.duration() + w.psi_half_width());
    for (std::size_t s = 1; s < sch.n_slots(); ++s) {
        const double t = l.t0 + static_cast<double>(l.starts[s]) * l.dt;
        CHECK(t >= sch.slot_start(s) - 1e-9);
        CHECK(t < sch.slot_start(s) + l.dt);
    }

    const SlotSchedule short_slots = encode({1}, 0.1, 5.0 / sp.B, {});
    try {
        synth.layout(short_slots);
        FAIL("expected a regime refusal");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::regime);
    }
}

TEST_CASE("empty-array field covariance matches the free-space spectrum")
{
    NoiseSpectrum sp;
    WindowSpec w;
    w.Tprime = 1.0 / sp.B;
    w.T = 20.0 / sp.B;
    Scene s = testing::default_scene();
    s.surface.inclusions.clear();
    const FieldSynthesizer synth(s, sp, w);
    const SlotSchedule sch = unmodulated(2, w.T);
    const std::size_t lag = 2;
    const double tau = static_cast<double>(lag) * synth.dt();
    const Moments m = moments(synth, sch, 40, lag);

    const double d = s.receivers.separation();
    const double lo = sp.omega0 - 0.5 * sp.B, hi = sp.omega0 + 0.5 * sp.B;
    const double auto0 = 1.0 / (4.0 * pi);
    const double cross0 = gk([&](double x) { return sp.F(x) * std::sin(x * d) / (4.0 * pi * x * d); }, lo, hi) / pi;
    const double auto_tau = gk([&](double x) { return sp.F(x) * std::cos(x * tau) / (4.0 * pi); }, lo, hi) / pi;

    CHECK(m.rr == doctest::Approx(auto0).epsilon(0.06));
    CHECK(m.pp == doctest::Approx(auto0).epsilon(0.06));
    CHECK(std::abs(m.rp - cross0) < 0.06 * auto0);
    CHECK(std::abs(m.lag - auto_tau) < 0.06 * auto0);
    CHECK(auto_tau < -0.3 * auto0);
}

TEST_CASE("direct per-node synthesis agrees with the reduced covariance")
{
    NoiseSpectrum sp;
    WindowSpec w;
    w.Tprime = 1.0 / sp.B;
    w.T = 20.0 / sp.B;
    Scene s;
    s.surface = make_metasurface(2, 1.0, {0.0, 0.0, 3.0}, {0.0, 0.0, -1.0}, Tunable{0.0, 0.5, true});
    s.receivers = {{-0.25, 0.0, 0.0}, {0.25, 0.0, 0.0}};
    s.shell.L_src = 20.0;
    const SlotSchedule sch = encode({1, 1}, 0.5, w.T, {});

    SynthOptions reduced, direct;
    direct.kernel = SynthKernel::direct;
    const Moments a = moments(FieldSynthesizer(s, sp, w, reduced), sch, 30, 1);
    const Moments b = moments(FieldSynthesizer(s, sp, w, direct), sch, 30, 1);
    const double scale = 1.0 / (4.0 * pi);
    CHECK(std::abs(a.rr - b.rr) < 0.1 * scale);
    CHECK(std::abs(a.pp - b.pp) < 0.1 * scale);
    CHECK(std::abs(a.rp - b.rp) < 0.1 * scale);
    CHECK(std::abs(a.lag - b.lag) < 0.1 * scale);
}

TEST_CASE("synthesis is deterministic under the seed and independent of workers")
{
    NoiseSpectrum sp;
    WindowSpec w;
    w.Tprime = 1.0 / sp.B;
    w.T = 20.0 / sp.B;
    const Scene s = testing::default_scene(4);
    const SlotSchedule sch = encode({1, 0, 1}, 0.1, w.T, {1});
    SynthOptions one, four;
    four.workers = 4;
    const FieldRecord a = FieldSynthesizer(s, sp, w, one).realize(sch, {5, 2});
    const FieldRecord b = FieldSynthesizer(s, sp, w, four).realize(sch, {5, 2});
    const FieldRecord c = FieldSynthesizer(s, sp, w, one).realize(sch, {5, 3});
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    CHECK(a.slot_boundaries.size() == sch.n_slots() + 1);

    const FieldSynthesizer synth(s, sp, w);
    const RecordLayout l = synth.layout(sch);
    const SlotSegment seg = synth.segment(sch, l, {5, 2}, 3);
    for (std::size_t j = 0; j < seg.r.size(); ++j) REQUIRE(seg.r[j] == a.samples[0][seg.first + j]);
}

TEST_CASE("slots are drawn independently")
{
    NoiseSpectrum sp;
    WindowSpec w;
    w.Tprime = 1.0 / sp.B;
    w.T = 10.0 / sp.B;
    Scene s = testing::default_scene();
    s.surface.inclusions.clear();
    const FieldSynthesizer synth(s, sp, w);
    const SlotSchedule sch = unmodulated(1, w.T);
    const RecordLayout l = synth.layout(sch);
    const std::size_t edge = l.starts[1];
    double across = 0.0, within = 0.0, var = 0.0;
    const std::size_t n = 400;
    for (std::size_t i = 0; i < n; ++i) {
        const FieldRecord rec = synth.realize(sch, {17, i});
        const auto& u = rec.samples[0];
        across += u[edge - 1] * u[edge];
        within += u[edge - 2] * u[edge - 1];
        var += u[edge - 1] * u[edge - 1];
    }
    const double corr_across = across / var;
    CHECK(std::abs(corr_across) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(within / var) > 0.2);
}

TEST_CASE("measurement noise statistics")
{
    const double dt = 0.01, t_meas = 0.05, sigma = 0.3;
    const std::size_t n = 200000;
    std::vector<double> a(n, 0.0), b(n, 0.0);
    add_measurement_noise_range(a, 0, 0, dt, sigma, t_meas, {4, 0});
    add_measurement_noise_range(b, 0, 1, dt, sigma, t_meas, {4, 0});
    const std::size_t lag = 5;  // tau = t_meas
    double v = 0.0, c = 0.0, x = 0.0;
    for (std::size_t j = 0; j + lag < n; ++j) {
        v += a[j] * a[j];
        c += a[j] * a[j + lag];
        x += a[j] * b[j];
    }
    v /= static_cast<double>(n - lag);
    c /= static_cast<double>(n - lag);
    x /= static_cast<double>(n - lag);
    CHECK(v == doctest::Approx(sigma * sigma).epsilon(0.05));
    CHECK(c / v == doctest::Approx(std::exp(-pi)).epsilon(0.25));
    CHECK(std::abs(x) < 0.03 * sigma * sigma);

    std::vector<double> part(1000, 0.0);
    add_measurement_noise_range(part, 5000, 0, dt, sigma, t_meas, {4, 0});
    for (std::size_t j = 0; j < part.size(); ++j) REQUIRE(part[j] == a[5000 + j]);

    std::vector<double> coarse(10, 0.0);
    CHECK_THROWS_AS(add_measurement_noise_range(coarse, 0, 0, 0.04, sigma, t_meas, {4, 0}), Error);
    std::vector<double> zero(10, 1.0);
    add_measurement_noise_range(zero, 0, 0, dt, 0.0, t_meas, {4, 0});
    CHECK(zero == std::vector<double>(10, 1.0));
}

TEST_CASE("counter RNG moments and key separation")
{
    CounterRng r(stream_key({1, 2, 3}));
    double mean = 0.0, m2 = 0.0, z2 = 0.0, zr = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        mean += u;
        m2 += u * u;
        const auto z = r.complex_normal();
        z2 += std::norm(z);
        zr += z.real() * z.imag();
    }
    CHECK(mean / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(m2 / n - (mean / n) * (mean / n) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
    CHECK(z2 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(zr / n) < 0.01);

    CHECK(stream_key({1, 2}) != stream_key({2, 1}));
    CHECK(stream_key({1, 2}) != stream_key({1, 2, 0}));
    CounterRng a(7), b(7);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
}
