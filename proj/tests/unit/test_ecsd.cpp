#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ambientlink/ecsd.hpp"
#include "ambientlink/error.hpp"
#include "ambientlink/synth.hpp"

using namespace ambientlink;

namespace {

FieldRecord tone_record(double t0, double t1, double dt, double w1, double theta)
{
    FieldRecord rec;
    rec.dt = dt;
    rec.t0 = t0;
    const std::size_t n = static_cast<std::size_t>(std::ceil((t1 - t0) / dt)) + 1;
    rec.samples.assign(2, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const double t = rec.time(j);
        rec.samples[0][j] = std::cos(w1 * t);
        rec.samples[1][j] = std::cos(w1 * t + theta);
    }
    return rec;
}

FieldRecord white_record(std::size_t n, double dt, unsigned seed)
{
    std::mt19937_64 g(seed);
    std::normal_distribution<double> d;
    FieldRecord rec;
    rec.dt = dt;
    rec.t0 = -3.0;
    rec.samples.assign(2, std::vector<double>(n));
    for (auto& s : rec.samples)
        for (auto& x : s) x = d(g);
    return rec;
}

WindowSpec windows(double T, double Tp)
{
    WindowSpec w;
    w.T = T;
    w.Tprime = Tp;
    return w;
}

}

TEST_CASE("pure tone against the exact windowed transform")
{
    const double w1 = 2.0, theta = 0.7, tc = 60.0;
    for (const auto phi_shape : {WindowShape::triangle, WindowShape::gaussian}) {
        WindowSpec w = windows(phi_shape == WindowShape::triangle ? 40.0 : 10.0, 3.0);
        w.phi_shape = phi_shape;
        const auto [lo, hi] = ecsd_span(tc, w);
        const FieldRecord rec = tone_record(lo - 1.0, hi + 1.0, 0.02, w1, theta);
        for (double omega : {2.0, 2.1, 1.7, -2.0}) {
            const cplx e_plus = std::polar(1.0, theta), e_minus = std::polar(1.0, -theta);
            const cplx oracle = 0.25 * (e_plus * w.psi_hat(omega + w1) + e_minus * w.psi_hat(omega - w1)) +
                                0.5 * w.psi_hat(omega) * w.phi_hat(2.0 * w1) * std::cos(2.0 * w1 * tc + theta);
            const cplx s = ecsd_at(rec, omega, tc, w);
            CHECK(std::abs(s - oracle) < 2e-5);
        }
    }
}

TEST_CASE("conjugate symmetry and receiver exchange")
{
    const FieldRecord rec = white_record(6000, 0.05, 1);
    FieldRecord swapped = rec;
    std::swap(swapped.samples[0], swapped.samples[1]);
    const WindowSpec w = windows(40.0, 2.0);
    for (double omega : {0.0, 1.3, 6.0}) {
        const cplx s = ecsd_at(rec, omega, 100.0, w);
        const cplx neg = ecsd_at(rec, -omega, 100.0, w);
        const cplx sw = ecsd_at(swapped, omega, 100.0, w);
        CHECK(std::abs(neg - std::conj(s)) < 1e-12 * std::abs(s));
        CHECK(std::abs(sw - std::conj(s)) < 1e-12 * std::abs(s));
        const RecordView auto_view{rec.dt, rec.t0, rec.samples[0], rec.samples[0]};
        const cplx a = ecsd_at(auto_view, omega, 100.0, w);
        CHECK(std::abs(a.imag()) < 1e-12 * std::abs(a.real()));
    }
}

TEST_CASE("bilinearity and the PSD-difference form")
{
    const FieldRecord rec = white_record(6000, 0.05, 2);
    const WindowSpec w = windows(40.0, 2.0);
    FieldRecord scaled = rec;
    for (auto& x : scaled.samples[0]) x *= 2.0;
    for (auto& x : scaled.samples[1]) x *= -3.0;
    const cplx s = ecsd_at(rec, 1.1, 120.0, w);
    CHECK(std::abs(ecsd_at(scaled, 1.1, 120.0, w) + 6.0 * s) < 1e-12 * std::abs(s));
    CHECK(ecsd_psd_diff(rec, 1.1, 120.0, w) == doctest::Approx(s.real()).epsilon(1e-10));
}

TEST_CASE("a view with an absolute offset reads the same samples")
{
    const FieldRecord rec = white_record(8000, 0.05, 3);
    const WindowSpec w = windows(40.0, 2.0);
    const std::size_t first = 1234;
    const std::size_t count = 4000;
    const RecordView part{rec.dt, rec.t0, std::span<const double>(rec.samples[0]).subspan(first, count),
                          std::span<const double>(rec.samples[1]).subspan(first, count), first};
    const double tc = part.time(count / 2);
    const cplx full = ecsd_at(rec, 0.9, tc, w);
    const cplx sub = ecsd_at(part, 0.9, tc, w);
    CHECK(std::abs(full - sub) < 1e-13 * std::abs(full));
}

TEST_CASE("windows reaching outside the record are refused")
{
    const FieldRecord rec = white_record(2000, 0.05, 4);
    const WindowSpec w = windows(40.0, 2.0);
    try {
        ecsd_at(rec, 1.0, 20.0, w);
        FAIL("expected a regime refusal");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::regime);
        CHECK(e.value() == doctest::Approx(-3.0 - (20.0 - 48.0)));
    }
    FieldRecord bad = rec;
    bad.samples[1].pop_back();
    CHECK_THROWS_AS(ecsd_at(bad, 1.0, 40.0, windows(10.0, 1.0)), Error);
}

TEST_CASE("series evaluates at slot centres, independent of workers")
{
    const FieldRecord rec = white_record(20000, 0.05, 5);
    const WindowSpec w = windows(20.0, 1.0);
    SlotSchedule sch = encode({1, 0, 1}, 0.1, 24.0, {});
    // record covers [-3, 997); the schedule spans 4 T per bit
    const EcsdSeries a = ecsd_series(rec, sch, w, 2.0, 1);
    const EcsdSeries b = ecsd_series(rec, sch, w, 2.0, 3);
    REQUIRE(a.size() == 6);
    CHECK(a.values == b.values);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.centers[k] == doctest::Approx((2.0 * static_cast<double>(k) + 1.0) * 24.0));
        CHECK(a.values[k] == ecsd_at(rec, 2.0, a.centers[k], w));
    }
}

TEST_CASE("equal Gaussian windows with T' = 2T give an exponential auto-spectrum")
{
    NoiseSpectrum sp;
    Scene scene;
    scene.receivers = {{0.25, 0.0, 0.0}, {-0.25, 0.0, 0.0}};
    auto cv = [&](const WindowSpec& w, double slot_T) {
        const FieldSynthesizer synth(scene, sp, w);
        const SlotSchedule sched = unmodulated(1, slot_T);
        std::vector<double> v;
        for (std::uint64_t i = 0; i < 300; ++i) {
            const FieldRecord rec = synth.realize(sched, {21, i});
            const RecordView auto_view{rec.dt, rec.t0, rec.samples[0], rec.samples[0]};
            v.push_back(ecsd_at(auto_view, sp.omega0, sched.slot_center(0), w).real());
        }
        double mean = 0.0, var = 0.0;
        for (double x : v) mean += x / 300.0;
        for (double x : v) var += (x - mean) * (x - mean) / 299.0;
        return std::sqrt(var) / mean;
    };
    WindowSpec unstable;
    unstable.phi_shape = unstable.psi_shape = WindowShape::gaussian;
    unstable.T = 5.0 / sp.B;
    unstable.Tprime = 10.0 / sp.B;
    CHECK(cv(unstable, 30.0 / sp.B) == doctest::Approx(1.0).epsilon(0.2));

    const WindowSpec stable = windows(100.0 / sp.B, 1.0 / sp.B);
    CHECK(cv(stable, 100.0 / sp.B) < 0.25);
}
