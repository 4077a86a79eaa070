#include "ambientlink/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ambientlink/error.hpp"
#include "ambientlink/parallel.hpp"
#include "ambientlink/quadrature.hpp"

namespace ambientlink {

namespace {

constexpr std::size_t shell_chunk = 4096;
constexpr std::size_t band_panels = 8;

cplx dot3(const CVec3& a, const CVec3& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

CVec3 mat_vec(const CMat3& m, const CVec3& v)
{
    CVec3 r{};
    for (int i = 0; i < 3; ++i) r[i] = m[3 * i] * v[0] + m[3 * i + 1] * v[1] + m[3 * i + 2] * v[2];
    return r;
}

CVec3 conj3(const CVec3& a)
{
    return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])};
}

void check_shell(const char* what, const std::vector<Vec3>& points, double L_src, double diameter_factor)
{
    double diameter = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(norm(points[i]) < L_src)) {
            fail(ErrorKind::regime, std::string(what) + ": point outside the source shell");
        }
        for (std::size_t j = i + 1; j < points.size(); ++j) diameter = std::max(diameter, distance(points[i], points[j]));
    }
    if (diameter_factor > 0.0 && L_src < diameter_factor * diameter) {
        std::ostringstream os;
        os << what << ": shell radius " << L_src << " is below " << diameter_factor << " x region diameter "
           << diameter;
        fail(ErrorKind::regime, os.str(), diameter_factor * diameter);
    }
}

std::size_t resolve_nodes(const char* what, double omega, double L_src, std::size_t n_nodes, const Background& bg)
{
    const std::size_t required = nyquist_nodes(L_src, 2.0 * pi * bg.c0 / omega);
    if (n_nodes == 0) return std::max<std::size_t>(required, 100);
    if (n_nodes < required) {
        std::ostringstream os;
        os << what << ": " << n_nodes << " shell nodes below Nyquist density, need at least " << required;
        fail(ErrorKind::regime, os.str(), static_cast<double>(required));
    }
    return n_nodes;
}

// Deterministic chunked sum of term(i) over the shell, independent of the worker count.
template <class Term>
cplx shell_sum(std::size_t n, unsigned workers, Term&& term)
{
    const std::size_t chunks = (n + shell_chunk - 1) / shell_chunk;
    std::vector<cplx> partial(chunks);
    parallel_for(chunks, workers, [&](std::size_t c) {
        cplx s = 0.0;
        const std::size_t end = std::min(n, (c + 1) * shell_chunk);
        for (std::size_t i = c * shell_chunk; i < end; ++i) s += term(i);
        partial[c] = s;
    });
    return pairwise_sum<cplx>(partial);
}

struct InclusionCache {
    Vec3 z;
    cplx rho;
    bool dipole = false;
    CMat3 m{};
};

}

QTerms q_expansion(double omega, const Vec3& xr, const Vec3& xrp, std::span<const Inclusion> inclusions,
                   const Background& bg)
{
    const double c = bg.c0 / omega;
    QTerms q{};
    if (xr == xrp) {
        q.term1 = c * green0_im_coincident(omega, bg);
    } else {
        q.term1 = c * green0(omega, xr, xrp, bg).imag();
    }
    for (const auto& inc : inclusions) {
        const cplx rho = rho_of(inc.reflectivity, omega);
        const cplx gr = green0(omega, xr, inc.position, bg);
        const cplx grp = green0(omega, xrp, inc.position, bg);
        q.term2 += c * (rho * gr * grp).imag();
        q.term3 -= c * rho.imag() * std::conj(gr) * grp;
        if (inc.polarization) {
            const CMat3 m = inc.polarization->at(omega);
            const CVec3 ar = grad_green0(omega, xr, inc.position, bg);
            const CVec3 arp = grad_green0(omega, xrp, inc.position, bg);
            q.term4 += c * dot3(ar, mat_vec(m, arp)).imag();
            CMat3 im{};
            for (int k = 0; k < 9; ++k) im[k] = m[k].imag();
            q.term5 -= c * dot3(conj3(ar), mat_vec(im, arp));
        }
    }
    return q;
}

std::size_t check_quadrature_regime(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene,
                                    std::size_t n_nodes)
{
    if (!(omega > 0.0)) fail(ErrorKind::domain, "q_quadrature: omega must be positive");
    std::vector<Vec3> pts{xr, xrp};
    for (const auto& inc : scene.surface.inclusions) pts.push_back(inc.position);
    check_shell("q_quadrature", pts, scene.shell.L_src, 5.0);
    return resolve_nodes("q_quadrature", omega, scene.shell.L_src, n_nodes, scene.background);
}

cplx q_quadrature(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene, std::size_t n_nodes,
                  unsigned workers)
{
    const double L = scene.shell.L_src;
    const std::size_t n = check_quadrature_regime(omega, xr, xrp, scene, n_nodes);
    const SourceShell shell = make_shell(L, n);
    const Background& bg = scene.background;

    std::vector<InclusionCache> cache;
    for (const auto& inc : scene.surface.inclusions) {
        InclusionCache c{inc.position, rho_of(inc.reflectivity, omega)};
        if (inc.polarization) {
            c.dipole = true;
            c.m = inc.polarization->at(omega);
        }
        cache.push_back(c);
    }
    std::vector<cplx> gr(cache.size()), grp(cache.size());
    std::vector<CVec3> ar(cache.size()), arp(cache.size());
    for (std::size_t j = 0; j < cache.size(); ++j) {
        gr[j] = green0(omega, xr, cache[j].z, bg);
        grp[j] = green0(omega, xrp, cache[j].z, bg);
        if (cache[j].dipole) {
            ar[j] = grad_green0(omega, xr, cache[j].z, bg);
            arp[j] = grad_green0(omega, xrp, cache[j].z, bg);
        }
    }

    const double w = shell.weights[0];
    const cplx sum = shell_sum(n, workers, [&](std::size_t i) {
        const Vec3& y = shell.nodes[i];
        cplx a = green0(omega, xr, y, bg);
        cplx b = green0(omega, xrp, y, bg);
        for (std::size_t j = 0; j < cache.size(); ++j) {
            const cplx gy = green0(omega, y, cache[j].z, bg);
            a += cache[j].rho * gr[j] * gy;
            b += cache[j].rho * grp[j] * gy;
            if (cache[j].dipole) {
                const CVec3 ay = grad_green0(omega, y, cache[j].z, bg);
                const CVec3 may = mat_vec(cache[j].m, ay);
                a += dot3(ar[j], may);
                b += dot3(arp[j], may);
            }
        }
        return std::conj(a) * b;
    });
    return w * sum;
}

double hk_residual_standard(double omega, const Vec3& x, const Vec3& y, double L_src, std::size_t n_nodes,
                            const Background& bg, unsigned workers)
{
    if (!(omega > 0.0)) fail(ErrorKind::domain, "hk_residual_standard: omega must be positive");
    check_shell("hk_residual_standard", {x, y}, L_src, 0.0);
    const std::size_t n = resolve_nodes("hk_residual_standard", omega, L_src, n_nodes, bg);
    const SourceShell shell = make_shell(L_src, n);
    const cplx sum = shell_sum(n, workers, [&](std::size_t i) {
        return std::conj(green0(omega, x, shell.nodes[i], bg)) * green0(omega, y, shell.nodes[i], bg);
    });
    const cplx lhs = (omega / bg.c0) * shell.weights[0] * sum;
    const double im = x == y ? green0_im_coincident(omega, bg) : green0(omega, x, y, bg).imag();
    return std::abs(lhs - im);
}

double hk_residual_generalized(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene,
                               std::size_t n_nodes, unsigned workers)
{
    const cplx quad = q_quadrature(omega, xr, xrp, scene, n_nodes, workers);
    const QTerms q = q_expansion(omega, xr, xrp, scene.surface.inclusions, scene.background);
    return std::abs(quad - q.total());
}

cplx q_hat(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene)
{
    if (omega > 0.0) return q_expansion(omega, xr, xrp, scene.surface.inclusions, scene.background).total();
    return std::conj(q_expansion(-omega, xr, xrp, scene.surface.inclusions, scene.background).total());
}

cplx mean_general(double omega, const Vec3& xr, const Vec3& xrp, const Scene& scene, const NoiseSpectrum& spectrum,
                  const WindowSpec& windows)
{
    const double h = spectrum.s_max();
    const double w0 = spectrum.omega0;
    const double B = spectrum.B;
    const cplx pos = gauss_legendre(
        [&](double s) {
            const double w1 = w0 + B * s;
            return q_hat(w1, xr, xrp, scene) * spectrum.F0(s) * windows.psi_hat(omega - w1);
        },
        -h, h, band_panels);
    const cplx neg = gauss_legendre(
        [&](double s) {
            const double w1 = -(w0 + B * s);
            const double weight = windows.psi_hat(omega - w1);
            if (weight == 0.0) return cplx(0.0);
            return q_hat(w1, xr, xrp, scene) * spectrum.F0(s) * weight;
        },
        -h, h, band_panels);
    return (pos + neg) / (2.0 * pi);
}

namespace {

const ReflectivityModel& shared_model(const Scene& scene)
{
    if (scene.surface.inclusions.empty()) fail(ErrorKind::domain, "closed-form mean needs a populated metasurface");
    return scene.surface.inclusions.front().reflectivity;
}

template <class F>
cplx band_integral(const NoiseSpectrum& spectrum, F&& f)
{
    const double h = spectrum.s_max();
    return gauss_legendre([&](double s) { return cplx(f(s)) * spectrum.F0(s); }, -h, h, 16);
}

}

cplx rho_B(const ReflectivityModel& model, const NoiseSpectrum& spectrum, const WindowSpec& windows)
{
    return band_integral(spectrum, [&](double s) {
        return rho_of(model, spectrum.omega0 + spectrum.B * s) * windows.psi_hat(spectrum.B * s);
    });
}

cplx r_B1(const Metasurface& surface, const Vec3& xr, double omega0, const Background& bg)
{
    if (surface.inclusions.empty()) fail(ErrorKind::domain, "r_B1: empty metasurface");
    const double k = omega0 / bg.c0;
    std::vector<cplx> terms;
    terms.reserve(surface.inclusions.size());
    for (const auto& inc : surface.inclusions) terms.push_back(std::polar(1.0, 2.0 * k * distance(xr, inc.position)));
    return pairwise_sum<cplx>(terms) / static_cast<double>(terms.size());
}

cplx r_B2(const ReflectivityModel& model, const NoiseSpectrum& spectrum, const WindowSpec& windows, double L,
          const Background& bg)
{
    const double B = spectrum.B;
    return band_integral(spectrum, [&](double s) {
        return rho_of(model, spectrum.omega0 + B * s) * std::polar(1.0, 2.0 * B * L * s / bg.c0) *
               windows.psi_hat(B * s);
    });
}

ClosedFormMean mean_closed_form(const Scene& scene, const NoiseSpectrum& spectrum, const WindowSpec& windows)
{
    const double lambda0 = spectrum.lambda0(scene.background.c0);
    const double sep = scene.receivers.separation();
    if (std::abs(sep - 0.5 * lambda0) > 1e-6 * 0.5 * lambda0) {
        std::ostringstream os;
        os << "closed-form mean: receiver spacing " << sep << " differs from lambda0/2 = " << 0.5 * lambda0;
        fail(ErrorKind::regime, os.str());
    }
    if (std::abs(windows.Tprime * spectrum.B - 1.0) > 1e-9) {
        fail(ErrorKind::regime, "closed-form mean: requires Tprime = 1/B");
    }
    ClosedFormMean r;
    r.L = scene.L();
    r.alpha = angle_of(scene);
    const double D = scene.surface.side;
    if (!(D >= 2.5 * lambda0)) r.warnings.push_back("paraxial: D is not much larger than lambda0");
    if (!(r.L >= 2.5 * D)) r.warnings.push_back("paraxial: L is not much larger than D");

    const ReflectivityModel& model = shared_model(scene);
    const double B = spectrum.B;
    const double w0 = spectrum.omega0;
    const double s2 = band_integral(spectrum, [&](double s) { return s * s * windows.psi_hat(B * s); }).real();
    r.mean_I = s2 * B * B / (8.0 * pi * pi * w0 * w0);

    r.rho_B = rho_B(model, spectrum, windows);
    r.R_B1 = r_B1(scene.surface, scene.receivers.xr, w0, scene.background);
    r.R_B2 = r_B2(model, spectrum, windows, r.L, scene.background);
    const double J = static_cast<double>(scene.surface.count());
    const double pref = J * lambda0 / (64.0 * std::pow(pi, 4) * r.L * r.L);
    const cplx phase = std::polar(1.0, -pi * std::cos(r.alpha));
    r.mean_II = pref * (r.R_B1 * r.R_B2 * phase).imag();
    r.mean_III = -pref * r.rho_B.imag() * phase;
    return r;
}

FresnelPair fresnel_cs(double d)
{
    if (d < 0.0) {
        const FresnelPair p = fresnel_cs(-d);
        return {-p.C, -p.S};
    }
    if (d == 0.0) return {};
    auto series = [](double x) {
        // sum_n (-1)^n x^(4n+1)/((2n)!(4n+1)) and x^(4n+3)/((2n+1)!(4n+3))
        const double x2 = x * x;
        const double x4 = x2 * x2;
        double c = 0.0, s = 0.0;
        double tc = x;            // x^(4n+1)/(2n)!
        double ts = x * x2;       // x^(4n+3)/(2n+1)!
        for (int n = 0; n < 60; ++n) {
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            c += sign * tc / (4.0 * n + 1.0);
            s += sign * ts / (4.0 * n + 3.0);
            tc *= x4 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
            ts *= x4 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
            if (std::abs(tc) < 1e-18 && std::abs(ts) < 1e-18) break;
        }
        return FresnelPair{c, s};
    };
    if (d < 1.5) return series(d);
    if (d < 6.0) {
        FresnelPair p = series(1.5);
        const std::size_t panels = static_cast<std::size_t>(std::ceil((d - 1.5) * d)) + 1;
        p.C += gauss_legendre([](double t) { return std::cos(t * t); }, 1.5, d, panels);
        p.S += gauss_legendre([](double t) { return std::sin(t * t); }, 1.5, d, panels);
        return p;
    }
    // Tail: int_d^inf e^{it^2} dt = (i/2) e^{ix} sum_k (-i)^k (1/2)_k x^{-1/2-k}, x = d^2
    const double x = d * d;
    cplx sum = 0.0;
    cplx term = 1.0 / std::sqrt(x);
    for (int k = 0; k < 200; ++k) {
        sum += term;
        const cplx next = term * cplx(0.0, -1.0) * (0.5 + k) / x;
        if (std::abs(next) > std::abs(term) || std::abs(next) < 1e-18) break;
        term = next;
    }
    const cplx tail = cplx(0.0, 0.5) * std::polar(1.0, x) * sum;
    const double limit = 0.5 * std::sqrt(pi / 2.0);
    return {limit - tail.real(), limit - tail.imag()};
}

FresnelCheck fresnel_bound_check(const Metasurface& surface, const Vec3& xr, double omega0, const Background& bg)
{
    FresnelCheck r;
    const double lambda0 = 2.0 * pi * bg.c0 / omega0;
    const double L = distance(xr, surface.center);
    const double D = surface.side;
    r.abs_R_B1 = std::abs(r_B1(surface, xr, omega0, bg));
    r.bound = 4.0 * lambda0 * L / (pi * D * D);
    r.estimate = fresnel_estimate(surface, xr, omega0, bg);
    if (L * L < 10.0 * D * D) {
        r.regime_ok = false;
        r.warnings.push_back("fresnel: L^2 < 10 D^2");
    }
    if (D * D < 10.0 * L * lambda0) {
        r.regime_ok = false;
        r.warnings.push_back("fresnel: D^2 < 10 L lambda0");
    }
    const Vec3 axis = xr - surface.center;
    const double c = std::abs(dot(axis, surface.normal)) / (norm(axis) * norm(surface.normal));
    if (c < std::cos(pi / 18.0)) {
        r.regime_ok = false;
        r.warnings.push_back("fresnel: incidence is not near normal");
    }
    return r;
}

double fresnel_estimate(const Metasurface& surface, const Vec3& xr, double omega0, const Background& bg)
{
    const double L = distance(xr, surface.center);
    const double D = surface.side;
    const Vec3 n = surface.normal * (1.0 / norm(surface.normal));
    Vec3 ref = std::abs(n.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    Vec3 e1 = ref - n * dot(ref, n);
    e1 = e1 * (1.0 / norm(e1));
    const Vec3 e2 = cross(n, e1);
    const Vec3 rel = xr - surface.center;
    const double scale = std::sqrt(omega0 / (bg.c0 * L));
    double prod = bg.c0 * L / (omega0 * D * D);
    for (const double xk : {dot(rel, e1), dot(rel, e2)}) {
        const FresnelPair p = fresnel_cs(scale * (0.5 * D - xk));
        const FresnelPair m = fresnel_cs(scale * (-0.5 * D - xk));
        prod *= std::abs(cplx(p.C - m.C, p.S - m.S));
    }
    return prod;
}

double var_closed_form(const NoiseSpectrum& spectrum, const WindowSpec& windows)
{
    const double B = spectrum.B;
    const double BT = B * windows.T;
    const double h = spectrum.s_max();
    const double integral = gauss_legendre(
        [&](double s) {
            const double f = spectrum.F0(s);
            const double p = windows.psi_hat(B * s);
            return f * f * p * p;
        },
        -h, h, 16);
    return windows.phi_norm2() * integral / (32.0 * pi * pi * pi * BT);
}

double measurement_noise_var(double sigma_meas, double t_meas, const WindowSpec& windows)
{
    if (!(t_meas > 0.0)) fail(ErrorKind::domain, "measurement noise: t_meas must be positive");
    if (t_meas > windows.Tprime / 10.0) {
        fail(ErrorKind::regime, "measurement noise: t_meas exceeds Tprime/10, small-coherence formula does not apply");
    }
    const double s2 = sigma_meas * sigma_meas;
    return windows.phi_norm2() * windows.psi_norm2() * s2 * s2 * t_meas * t_meas / (windows.T * windows.Tprime);
}

double measurement_noise_cross_var(double sigma_meas, double t_meas, const NoiseSpectrum& spectrum,
                                   const WindowSpec& windows)
{
    const double B = spectrum.B;
    const double h = spectrum.s_max();
    const double a = gauss_legendre(
        [&](double s) {
            const double p = windows.psi_hat(B * s);
            return spectrum.F0(s) * p * p;
        },
        -h, h, 16);
    return windows.phi_norm2() * sigma_meas * sigma_meas * t_meas * a / (4.0 * pi * pi * windows.T);
}

LinkBudget snr_budget(const Scene& scene, const NoiseSpectrum& spectrum, const WindowSpec& windows, double rho1)
{
    Scene on = scene;
    on.surface.tunable.rho1 = rho1;
    for (auto& inc : on.surface.inclusions)
        if (auto* t = std::get_if<Tunable>(&inc.reflectivity)) t->rho1 = rho1;
    on = on.with_state(true);

    const ClosedFormMean m = mean_closed_form(on, spectrum, windows);
    LinkBudget b;
    b.mean_I = m.mean_I;
    b.mean_II = m.mean_II;
    b.mean_III = m.mean_III;
    b.rho_B = m.rho_B;
    b.R_B1 = m.R_B1;
    b.R_B2 = m.R_B2;
    b.alpha = m.alpha;
    b.L = m.L;
    b.warnings = m.warnings;
    b.variance = var_closed_form(spectrum, windows);
    b.snr_ratio = std::abs(m.mean_III) / std::sqrt(b.variance);
    b.lambda0 = spectrum.lambda0(scene.background.c0);
    b.J = scene.surface.count();
    const double J = static_cast<double>(b.J);
    const double BT = spectrum.B * windows.T;
    const double strength = J * b.lambda0 * rho1 / (b.L * b.L);
    b.cond_ratio = strength * std::sqrt(BT);
    const FresnelCheck f = fresnel_bound_check(scene.surface, scene.receivers.xr, spectrum.omega0, scene.background);
    b.fresnel_bound = f.bound;
    for (const auto& w : f.warnings) b.warnings.push_back(w);
    b.rate = 1.0 / (4.0 * windows.T);
    b.implied_rate = spectrum.B * strength * strength / 10.0;
    if (b.snr_ratio > 0.0) {
        b.T_for_snr = windows.T * 10.0 / (b.snr_ratio * b.snr_ratio);
        b.rate_for_snr = 1.0 / (4.0 * b.T_for_snr);
    }
    if (BT < 100.0) b.warnings.push_back("long_window: BT below 100");
    return b;
}

}
