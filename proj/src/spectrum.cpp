#include "ambientlink/spectrum.hpp"

#include <cmath>

#include "ambientlink/error.hpp"
#include "ambientlink/media.hpp"

namespace ambientlink {

namespace {

constexpr double gauss_sigma = 0.25;
constexpr double gauss_cut = 0.75;

double gauss_amplitude()
{
    static const double a = pi / (gauss_sigma * std::sqrt(2.0 * pi) * std::erf(gauss_cut / (gauss_sigma * std::sqrt(2.0))));
    return a;
}

}

std::string to_string(SpectrumShape s)
{
    switch (s) {
    case SpectrumShape::boxcar: return "boxcar";
    case SpectrumShape::raised_cosine: return "raised-cosine";
    case SpectrumShape::truncated_gaussian: return "truncated-gaussian";
    }
    return "?";
}

std::string to_string(WindowShape s)
{
    return s == WindowShape::triangle ? "triangle" : "gaussian";
}

SpectrumShape spectrum_shape_from(const std::string& name)
{
    if (name == "boxcar") return SpectrumShape::boxcar;
    if (name == "raised-cosine") return SpectrumShape::raised_cosine;
    if (name == "truncated-gaussian") return SpectrumShape::truncated_gaussian;
    fail(ErrorKind::validation, "unknown spectrum shape '" + name + "'");
}

WindowShape window_shape_from(const std::string& name)
{
    if (name == "triangle") return WindowShape::triangle;
    if (name == "gaussian") return WindowShape::gaussian;
    fail(ErrorKind::validation, "unknown window shape '" + name + "'");
}

double NoiseSpectrum::F0(double s) const
{
    const double a = std::abs(s);
    switch (shape) {
    case SpectrumShape::boxcar: return a <= 0.5 ? pi : 0.0;
    case SpectrumShape::raised_cosine: return a <= 0.5 ? pi * (1.0 + std::cos(2.0 * pi * s)) : 0.0;
    case SpectrumShape::truncated_gaussian:
        return a <= gauss_cut ? gauss_amplitude() * std::exp(-s * s / (2.0 * gauss_sigma * gauss_sigma)) : 0.0;
    }
    return 0.0;
}

double NoiseSpectrum::F0_primitive(double s) const
{
    const double h = s_max();
    if (s <= -h) return 0.0;
    if (s >= h) return pi;
    switch (shape) {
    case SpectrumShape::boxcar: return pi * (s + 0.5);
    case SpectrumShape::raised_cosine: return pi * (s + 0.5 + std::sin(2.0 * pi * s) / (2.0 * pi));
    case SpectrumShape::truncated_gaussian: {
        const double k = gauss_sigma * std::sqrt(2.0);
        return gauss_amplitude() * gauss_sigma * std::sqrt(pi / 2.0) * (std::erf(s / k) + std::erf(gauss_cut / k));
    }
    }
    return 0.0;
}

double NoiseSpectrum::s_max() const
{
    return shape == SpectrumShape::truncated_gaussian ? gauss_cut : 0.5;
}

double NoiseSpectrum::F(double omega) const
{
    return F0((std::abs(omega) - omega0) / B) / B;
}

double NoiseSpectrum::band_power(double wa, double wb) const
{
    return (F0_primitive((wb - omega0) / B) - F0_primitive((wa - omega0) / B)) / (2.0 * pi);
}

double NoiseSpectrum::lambda0(double c0) const
{
    return 2.0 * pi * c0 / omega0;
}

void validate(const NoiseSpectrum& s)
{
    if (!(s.omega0 > 0.0) || !std::isfinite(s.omega0)) fail(ErrorKind::validation, "spectrum: omega0 must be positive");
    if (!(s.B > 0.0)) fail(ErrorKind::validation, "spectrum: B must be positive");
    if (s.B / s.omega0 > 0.2) fail(ErrorKind::validation, "spectrum: B/omega0 exceeds 0.2 (narrowband premise)");
    if (s.B * s.s_max() >= s.omega0) fail(ErrorKind::validation, "spectrum: band reaches zero frequency");
}

double WindowSpec::unit(WindowShape s, double t)
{
    const double a = std::abs(t);
    if (s == WindowShape::triangle) return a < 1.0 ? 1.0 - a : 0.0;
    return a <= 4.0 ? std::exp(-t * t) / std::sqrt(pi) : 0.0;
}

double WindowSpec::unit_hat(WindowShape s, double x)
{
    if (s == WindowShape::gaussian) return std::exp(-x * x / 4.0);
    // sinc^2(x/2) written to stay accurate near zero
    const double h = 0.5 * x;
    if (std::abs(h) < 1e-4) return 1.0 - h * h / 3.0;
    const double r = std::sin(h) / h;
    return r * r;
}

double WindowSpec::unit_norm2(WindowShape s)
{
    return s == WindowShape::triangle ? 2.0 / 3.0 : 1.0 / std::sqrt(2.0 * pi);
}

double WindowSpec::unit_half_width(WindowShape s)
{
    return s == WindowShape::triangle ? 1.0 : 4.0;
}

double WindowSpec::phi(double t) const
{
    return unit(phi_shape, t / T) / T;
}

double WindowSpec::psi(double tau) const
{
    return unit(psi_shape, tau / Tprime) / Tprime;
}

void validate(const WindowSpec& w)
{
    if (!(w.T > 0.0) || !(w.Tprime > 0.0)) fail(ErrorKind::validation, "windows: T and Tprime must be positive");
}

}
