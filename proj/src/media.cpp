#include "ambientlink/media.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <sstream>

#include "ambientlink/error.hpp"

namespace ambientlink {

namespace {

double separation(const Vec3& x, const Vec3& y, const char* what)
{
    const double r = distance(x, y);
    if (!(r > 0.0)) fail(ErrorKind::domain, std::string(what) + ": coincident points");
    return r;
}

// a^T M b
cplx bilinear(const CVec3& a, const CMat3& m, const CVec3& b)
{
    cplx s = 0.0;
    for (int i = 0; i < 3; ++i) {
        cplx row = 0.0;
        for (int j = 0; j < 3; ++j) row += m[3 * i + j] * b[j];
        s += a[i] * row;
    }
    return s;
}

// 1 - a cot a
double one_minus_acot(double a)
{
    if (std::abs(a) < 1e-3) {
        const double a2 = a * a;
        return a2 / 3.0 + a2 * a2 / 45.0;
    }
    return 1.0 - a * std::cos(a) / std::sin(a);
}

}

Polarization Polarization::constant(const CMat3& m)
{
    return Polarization([m](double) { return m; });
}

CMat3 Polarization::at(double omega) const
{
    if (!fn_) return CMat3{};
    CMat3 m = fn_(omega);
    double scale = 0.0;
    for (const auto& v : m) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(m[3 * i + j] - m[3 * j + i]) > 1e-12 * scale)
                fail(ErrorKind::domain, "polarization tensor is not symmetric");
    return m;
}

Metasurface make_metasurface(std::size_t n_side, double side, const Vec3& center, const Vec3& normal,
                             const Tunable& tunable)
{
    if (n_side < 1) fail(ErrorKind::validation, "metasurface needs at least one element");
    if (!(side > 0.0) && n_side > 1) fail(ErrorKind::validation, "metasurface side must be positive");
    const double nn = norm(normal);
    if (!(nn > 0.0)) fail(ErrorKind::validation, "metasurface normal must be nonzero");
    const Vec3 n = normal * (1.0 / nn);

    // In-plane basis: e1 is the component of x (or y if n is parallel to x) orthogonal to n.
    Vec3 ref = std::abs(n.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    Vec3 e1 = ref - n * dot(ref, n);
    e1 = e1 * (1.0 / norm(e1));
    const Vec3 e2 = cross(n, e1);

    Metasurface s;
    s.n_side = n_side;
    s.side = side;
    s.center = center;
    s.normal = n;
    s.spacing = n_side > 0 ? side / static_cast<double>(n_side) : 0.0;
    s.tunable = tunable;
    s.inclusions.reserve(n_side * n_side);
    for (std::size_t i = 0; i < n_side; ++i) {
        for (std::size_t j = 0; j < n_side; ++j) {
            const double u = (static_cast<double>(i) + 0.5) * s.spacing - 0.5 * side;
            const double v = (static_cast<double>(j) + 0.5) * s.spacing - 0.5 * side;
            s.inclusions.push_back(Inclusion{center + e1 * u + e2 * v, tunable, std::nullopt});
        }
    }
    return s;
}

Metasurface with_state(const Metasurface& surface, bool on)
{
    Metasurface s = surface;
    s.tunable.on = on;
    for (auto& inc : s.inclusions) {
        if (auto* t = std::get_if<Tunable>(&inc.reflectivity)) t->on = on;
    }
    return s;
}

cplx green0(double omega, const Vec3& x, const Vec3& y, const Background& bg)
{
    const double r = separation(x, y, "green0");
    const double k = omega / bg.c0;
    return std::polar(1.0 / (4.0 * pi * r), k * r);
}

double green0_im_coincident(double omega, const Background& bg)
{
    return omega / (4.0 * pi * bg.c0);
}

CVec3 grad_green0(double omega, const Vec3& x, const Vec3& z, const Background& bg)
{
    const double r = separation(x, z, "grad_green0");
    const double k = omega / bg.c0;
    const cplx g = std::polar(1.0 / (4.0 * pi * r), k * r);
    const cplx f = g * cplx(-1.0 / r, k) / r;
    const Vec3 d = z - x;
    return {f * d.x, f * d.y, f * d.z};
}

cplx rho_of(const ReflectivityModel& model, double omega)
{
    if (!(omega > 0.0)) fail(ErrorKind::domain, "rho_of: omega must be positive");
    return std::visit(
        [omega](const auto& m) -> cplx {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Bubble>) {
                const double a = omega * m.R / m.c1;
                if (std::abs(a) >= 1e-3 && std::sin(a) == 0.0) {
                    std::ostringstream os;
                    os << "bubble reflectivity pole at alpha1 = " << a;
                    fail(ErrorKind::domain, os.str(), a);
                }
                const double num = one_minus_acot(a);
                const cplx den(-num + m.delta, -m.delta * (m.c1 / m.c0) * a);
                if (den == cplx(0.0)) {
                    std::ostringstream os;
                    os << "bubble reflectivity pole at alpha1 = " << a;
                    fail(ErrorKind::domain, os.str(), a);
                }
                if (num == 0.0) return cplx(0.0);
                return 4.0 * pi * m.R * num / den;
            } else if constexpr (std::is_same_v<M, Drude>) {
                const cplx eps = drude_epsilon(m, omega);
                return (omega * omega / (m.c0 * m.c0)) * (eps / m.eps0 - 1.0) * m.volume;
            } else {
                return cplx(m.re_rho, m.on ? m.rho1 : 0.0);
            }
        },
        model);
}

double minnaert_alpha(double delta)
{
    if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::domain, "minnaert: delta must lie in (0, 1)");
    // tan a = a/(1-delta)  <=>  (1-delta) sin(a)/a - cos(a) = 0, negative near 0, positive at pi/2.
    auto h = [delta](double a) { return (1.0 - delta) * std::sin(a) / a - std::cos(a); };
    const double lo = std::min(1e-3 * std::sqrt(3.0 * delta), 1e-8);
    const double hi = pi / 2.0;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::abs(b); };
    auto [a, b] = boost::math::tools::bisect(h, lo, hi, tol);
    return 0.5 * (a + b);
}

double minnaert_frequency(const Bubble& model)
{
    return model.c1 * minnaert_alpha(model.delta) / model.R;
}

cplx drude_epsilon(const Drude& m, double omega)
{
    const double damping = std::isinf(m.tau) ? 0.0 : 1.0 / m.tau;
    return m.eps0 * (1.0 - m.omega_p * m.omega_p / cplx(omega * omega, omega * damping));
}

cplx drude_mu(const Drude& m, double omega)
{
    const double damping = std::isinf(m.tau) ? 0.0 : 1.0 / m.tau;
    return m.mu0 * (1.0 - m.F_f * omega * omega / cplx(omega * omega - m.omega_r * m.omega_r, omega * damping));
}

cplx green_full(double omega, const Vec3& x, const Vec3& y, std::span<const Inclusion> inclusions,
                const Background& bg)
{
    cplx g = green0(omega, x, y, bg);
    for (const auto& inc : inclusions) {
        const cplx gx = green0(omega, x, inc.position, bg);
        const cplx gy = green0(omega, y, inc.position, bg);
        g += rho_of(inc.reflectivity, omega) * (gx * gy);
        if (inc.polarization) {
            const CMat3 m = inc.polarization->at(omega);
            const CVec3 ax = grad_green0(omega, x, inc.position, bg);
            const CVec3 ay = grad_green0(omega, y, inc.position, bg);
            // Symmetrised so that swapping x and y is bit-identical.
            g += 0.5 * (bilinear(ax, m, ay) + bilinear(ay, m, ax));
        }
    }
    return g;
}

void validate(const Background& bg)
{
    if (!(bg.c0 > 0.0) || !std::isfinite(bg.c0)) fail(ErrorKind::validation, "background: c0 must be positive");
}

void validate(const ReflectivityModel& model)
{
    std::visit(
        [](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Bubble>) {
                if (!(m.R > 0.0)) fail(ErrorKind::validation, "bubble: R must be positive");
                if (!(m.c1 > 0.0) || !(m.c0 > 0.0)) fail(ErrorKind::validation, "bubble: speeds must be positive");
                if (!(m.delta > 0.0 && m.delta < 1.0)) fail(ErrorKind::validation, "bubble: delta must lie in (0, 1)");
            } else if constexpr (std::is_same_v<M, Drude>) {
                if (!(m.tau > 0.0)) fail(ErrorKind::validation, "drude: tau must be positive");
                if (!(m.volume > 0.0)) fail(ErrorKind::validation, "drude: volume must be positive");
            } else {
                if (!(m.rho1 >= 0.0)) fail(ErrorKind::validation, "tunable: rho1 must be nonnegative");
            }
        },
        model);
}

}
