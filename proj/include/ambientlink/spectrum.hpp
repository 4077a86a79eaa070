#pragma once

#include <string>

namespace ambientlink {

enum class SpectrumShape { boxcar, raised_cosine, truncated_gaussian };
enum class WindowShape { triangle, gaussian };

std::string to_string(SpectrumShape s);
std::string to_string(WindowShape s);
SpectrumShape spectrum_shape_from(const std::string& name);
WindowShape window_shape_from(const std::string& name);

// Two-sided F(w) = (1/B) F0((|w| - w0)/B) with the integral of F0 equal to pi.
struct NoiseSpectrum {
    double omega0 = 2.0 * 3.14159265358979323846;
    double B = 0.05 * 2.0 * 3.14159265358979323846;
    SpectrumShape shape = SpectrumShape::boxcar;

    double F0(double s) const;
    // Integral of F0 from -inf to s.
    double F0_primitive(double s) const;
    // F0 vanishes for |s| > s_max().
    double s_max() const;
    double F(double omega) const;
    // (1/2pi) * integral of F over [wa, wb], both on the positive band.
    double band_power(double wa, double wb) const;
    double lambda0(double c0) const;
};

void validate(const NoiseSpectrum& s);

// phi_T(t) = phi(t/T)/T, psi_T'(tau) = psi(tau/T')/T'. Transforms use the e^{+i w t} convention.
struct WindowSpec {
    double T = 100.0;
    double Tprime = 1.0;
    WindowShape phi_shape = WindowShape::triangle;
    WindowShape psi_shape = WindowShape::gaussian;

    double phi(double t) const;
    double psi(double tau) const;
    double phi_hat(double omega) const { return unit_hat(phi_shape, T * omega); }
    double psi_hat(double omega) const { return unit_hat(psi_shape, Tprime * omega); }
    double phi_norm2() const { return unit_norm2(phi_shape); }
    double psi_norm2() const { return unit_norm2(psi_shape); }
    double phi_half_width() const { return T * unit_half_width(phi_shape); }
    double psi_half_width() const { return Tprime * unit_half_width(psi_shape); }

    static double unit(WindowShape s, double t);
    static double unit_hat(WindowShape s, double x);
    static double unit_norm2(WindowShape s);
    // Support half width; the Gaussian is truncated at 4.
    static double unit_half_width(WindowShape s);
};

void validate(const WindowSpec& w);

}
