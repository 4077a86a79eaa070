#pragma once

#include <random>

#include "ambientlink/config.hpp"
#include "ambientlink/scene.hpp"

namespace testing {

using namespace ambientlink;

// Default dimensionless scene: 8x8 PTA of side 4 at (0, 0, 10), receivers at (+-0.25, 0, 0).
inline Scene default_scene(std::size_t n_side = 8, double rho1 = 0.1, double re_rho = 0.0)
{
    Scene s;
    s.surface = make_metasurface(n_side, 4.0, {0.0, 0.0, 10.0}, {0.0, 0.0, -1.0}, Tunable{re_rho, rho1, false});
    s.receivers = {{-0.25, 0.0, 0.0}, {0.25, 0.0, 0.0}};
    return s;
}

inline Vec3 random_point(std::mt19937_64& g, double scale)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(g), u(g), u(g)};
}

}
