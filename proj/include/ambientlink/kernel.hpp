#pragma once

#include <string>
#include <vector>

#include "ambientlink/scene.hpp"
#include "ambientlink/spectrum.hpp"

namespace ambientlink {

struct QTerms {
    cplx term1, term2, term3, term4, term5;
    cplx total() const { return term1 + term2 + term3 + term4 + term5; }
};

QTerms q_expansion(double omega, const Vec3& xr, const Vec3& xrp, std::span<const Inclusion> inclusions,
                   const Background& bg);

// Shell size and Nyquist checks shared by every shell quadrature; returns the node count to use.
std::size_t check_quadrature_regime(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene,
                                    std::size_t n_nodes);

// Shell quadrature of conj(G(xr, y)) G(xrp, y). n_nodes = 0 selects the Nyquist minimum.
cplx q_quadrature(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene, std::size_t n_nodes,
                  unsigned workers = 1);

double hk_residual_standard(double omega, const Vec3& x, const Vec3& y, double L_src, std::size_t n_nodes,
                            const Background& bg, unsigned workers = 1);
double hk_residual_generalized(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene,
                               std::size_t n_nodes, unsigned workers = 1);

// Kernel over the pair at frequency omega, negative frequencies by conjugation.
cplx q_hat(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene);

cplx mean_general(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene, const NoiseSpectrum& spectrum,
                  const WindowSpec& windows);

struct ClosedFormMean {
    double mean_I = 0.0;
    double mean_II = 0.0;
    cplx mean_III;
    cplx rho_B, R_B1, R_B2;
    double alpha = 0.0;
    double L = 0.0;
    std::vector<std::string> warnings;

    cplx total() const { return mean_I + mean_II + mean_III; }
};

ClosedFormMean mean_closed_form(const Scene& scene, const NoiseSpectrum& spectrum, const WindowSpec& windows);

cplx rho_B(const ReflectivityModel& model, const NoiseSpectrum& spectrum, const WindowSpec& windows);
cplx r_B1(const Metasurface& surface, const Vec3& xr, double omega0, const Background& bg);
cplx r_B2(const ReflectivityModel& model, const NoiseSpectrum& spectrum, const WindowSpec& windows, double L,
          const Background& bg);

struct FresnelPair {
    double C = 0.0;
    double S = 0.0;
};
FresnelPair fresnel_cs(double d);

struct FresnelCheck {
    double abs_R_B1 = 0.0;
    double bound = 0.0;
    double estimate = 0.0;  // Fresnel-integral approximation of |R_B1|
    bool regime_ok = true;
    std::vector<std::string> warnings;

    bool holds() const { return abs_R_B1 <= bound; }
};
double fresnel_estimate(const Metasurface& surface, const Vec3& xr, double omega0, const Background& bg);
FresnelCheck fresnel_bound_check(const Metasurface& surface, const Vec3& xr, double omega0, const Background& bg);

double var_closed_form(const NoiseSpectrum& spectrum, const WindowSpec& windows);

struct VarOptions {
    bool include_cross = true;
    double lag_cutoff = 200.0;  // |T (w1 - w2)| truncation of |phi_hat|^2
};
double var_general(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene, const NoiseSpectrum& spectrum,
                   const WindowSpec& windows, const VarOptions& options = {});

double measurement_noise_var(double sigma_meas, double t_meas, const WindowSpec& windows);
// Signal-by-noise contribution to the measured ECSD variance for the empty-array auto kernel
// Q = 1/(4 pi); not part of the small-coherence formula above.
double measurement_noise_cross_var(double sigma_meas, double t_meas, const NoiseSpectrum& spectrum,
                                   const WindowSpec& windows);

struct LinkBudget {
    double mean_I = 0.0;
    double mean_II = 0.0;
    cplx mean_III;
    double variance = 0.0;
    double snr_ratio = 0.0;
    double cond_ratio = 0.0;  // (J lambda0 rho1 / L^2) * sqrt(BT)
    cplx rho_B, R_B1, R_B2;
    double fresnel_bound = 0.0;
    double alpha = 0.0;
    double L = 0.0;
    double lambda0 = 0.0;
    std::size_t J = 0;
    double rate = 0.0;            // 1/(4T)
    double implied_rate = 0.0;    // B (J lambda0 rho1 / L^2)^2 / 10
    double T_for_snr = 0.0;       // T giving snr_ratio = sqrt(10)
    double rate_for_snr = 0.0;
    std::vector<std::string> warnings;
};

LinkBudget snr_budget(const Scene& scene, const NoiseSpectrum& spectrum, const WindowSpec& windows, double rho1);

}
