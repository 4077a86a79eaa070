#include "ambientlink/scene.hpp"

#include <algorithm>
#include <cmath>

#include "ambientlink/error.hpp"

namespace ambientlink {

double Scene::region_diameter() const
{
    std::vector<Vec3> pts{receivers.xr, receivers.xrp};
    for (const auto& inc : surface.inclusions) pts.push_back(inc.position);
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(pts[i], pts[j]));
    return d;
}

Scene Scene::with_state(bool on) const
{
    Scene s = *this;
    s.surface = ambientlink::with_state(surface, on);
    return s;
}

SourceShell make_shell(double L_src, std::size_t n_nodes)
{
    if (n_nodes < 100) fail(ErrorKind::argument, "make_shell: at least 100 nodes required");
    if (!(L_src > 0.0)) fail(ErrorKind::argument, "make_shell: radius must be positive");
    SourceShell s;
    s.radius = L_src;
    s.nodes.resize(n_nodes);
    s.weights.assign(n_nodes, 4.0 * pi * L_src * L_src / static_cast<double>(n_nodes));
    const double golden = pi * (1.0 + std::sqrt(5.0));
    const double n = static_cast<double>(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double fi = static_cast<double>(i);
        const double z = 1.0 - (2.0 * fi + 1.0) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = std::fmod(golden * fi, 2.0 * pi);
        s.nodes[i] = Vec3{L_src * rho * std::cos(phi), L_src * rho * std::sin(phi), L_src * z};
    }
    return s;
}

std::size_t nyquist_nodes(double L_src, double lambda)
{
    return static_cast<std::size_t>(std::ceil(4.0 * 4.0 * pi * L_src * L_src / (lambda * lambda)));
}

double angle_of(const Scene& scene)
{
    const Vec3 a = scene.receivers.xrp - scene.receivers.xr;
    const Vec3 b = scene.surface.center - scene.receivers.xr;
    const double na = norm(a);
    const double nb = norm(b);
    if (!(na > 0.0) || !(nb > 0.0)) fail(ErrorKind::domain, "angle_of: degenerate geometry");
    const double c = std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
    return std::acos(c);
}

}
