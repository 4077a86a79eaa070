#pragma once

#include <cstddef>
#include <vector>

#include "ambientlink/media.hpp"

namespace ambientlink {

struct ReceiverPair {
    Vec3 xr;
    Vec3 xrp;

    double separation() const { return distance(xr, xrp); }
};

struct SourceShellSpec {
    double L_src = 60.0;
    std::size_t n_nodes = 0;  // 0: Nyquist minimum for the carrier
};

struct Scene {
    Background background;
    SourceShellSpec shell;
    Metasurface surface;
    ReceiverPair receivers;

    // Receiver-to-PTA-centre distance.
    double L() const { return distance(receivers.xr, surface.center); }
    // Largest pairwise distance among receivers and inclusions.
    double region_diameter() const;
    Scene with_state(bool on) const;
};

struct SourceShell {
    double radius = 0.0;
    std::vector<Vec3> nodes;
    std::vector<double> weights;
};

SourceShell make_shell(double L_src, std::size_t n_nodes);
// Smallest node count with at least 4 nodes per wavelength squared of shell area.
std::size_t nyquist_nodes(double L_src, double lambda);

double angle_of(const Scene& scene);

}
