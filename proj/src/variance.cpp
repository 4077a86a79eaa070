#include <algorithm>
#include <cmath>

#include "ambientlink/error.hpp"
#include "ambientlink/kernel.hpp"
#include "ambientlink/quadrature.hpp"

namespace ambientlink {

namespace {

// Panels for the lag integral in units of the window transform period.
std::vector<double> lag_breaks(double d, double period)
{
    std::vector<double> b{0.0};
    for (double x = period; x < d; x += period) b.push_back(x);
    b.push_back(d);
    return b;
}

}

// Integrates over the positive-positive and negative-negative frequency blocks in
// (sigma, delta) = ((s1 + s2)/2, s1 - s2). The mixed blocks carry psi_hat at |T' w|
// of order T' w0 and vanish in double precision for any admissible spectrum.
double var_general(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene, const NoiseSpectrum& spectrum,
                   const WindowSpec& windows, const VarOptions& options)
{
    const double B = spectrum.B;
    const double w0 = spectrum.omega0;
    const double h = spectrum.s_max();
    const double BT = B * windows.T;
    const double dmax = std::min(2.0 * h, options.lag_cutoff / BT);
    const double period = 2.0 * pi / BT;

    auto block = [&](double sign) {
        auto Q = [&](double s, const Vec3& a, const Vec3& b) { return q_hat(sign * (w0 + B * s), a, b, scene); };
        auto inner = [&](double sigma) {
            const double d = std::min(dmax, 2.0 * (h - std::abs(sigma)));
            if (d <= 0.0) return 0.0;
            const double wsum = sign * (w0 + B * sigma);
            const double p1 = windows.psi_hat(omega - wsum);
            const double p2 = windows.psi_hat(omega + wsum);
            auto f = [&](double delta) {
                const double s1 = sigma + 0.5 * delta;
                const double s2 = sigma - 0.5 * delta;
                const double phi = windows.phi_hat(B * delta);
                const double weight = phi * phi * spectrum.F0(s1) * spectrum.F0(s2);
                if (weight == 0.0) return 0.0;
                double v = (Q(s1, xr, xr) * Q(s2, xrp, xrp)).real() * p1 * p1;
                if (options.include_cross) v += (Q(s1, xr, xrp) * Q(s2, xrp, xr)).real() * p1 * p2;
                return v * weight;
            };
            const auto breaks = lag_breaks(d, period);
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
                total += gauss_legendre(f, breaks[i], breaks[i + 1]);
                total += gauss_legendre(f, -breaks[i + 1], -breaks[i]);
            }
            return total;
        };
        // Kinks where the lag range switches from the cutoff to the support edge.
        const double k = h - 0.5 * dmax;
        double total = gauss_legendre(inner, -k, k, 8);
        if (k < h) {
            total += gauss_legendre(inner, -h, -k, 2);
            total += gauss_legendre(inner, k, h, 2);
        }
        return total;
    };
    // d w1 d w2 = B^2 d sigma d delta, F_hat = F0/B.
    return (block(1.0) + block(-1.0)) / (4.0 * pi * pi);
}

}
