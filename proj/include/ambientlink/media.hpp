#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ambientlink/vec3.hpp"

namespace ambientlink {

using cplx = std::complex<double>;
using CVec3 = std::array<cplx, 3>;
using CMat3 = std::array<cplx, 9>;  // row-major

inline constexpr double pi = 3.14159265358979323846;

struct Background {
    double c0 = 1.0;
};

struct Bubble {
    double R = 1.0;
    double c1 = 340.0;
    double delta = 1.29e-3;
    double c0 = 1482.0;
};

// tau = +inf is the lossless limit.
struct Drude {
    double eps0 = 1.0;
    double mu0 = 1.0;
    double omega_p = 1.0;
    double omega_r = 1.0;
    double tau = 1.0;
    double F_f = 0.0;
    double volume = 1.0;
    double c0 = 1.0;
};

struct Tunable {
    double re_rho = 0.0;
    double rho1 = 0.1;
    bool on = false;
};

using ReflectivityModel = std::variant<Bubble, Drude, Tunable>;

// Frequency-indexed symmetric polarization tensor.
class Polarization {
public:
    Polarization() = default;
    explicit Polarization(std::function<CMat3(double)> fn) : fn_(std::move(fn)) {}
    static Polarization constant(const CMat3& m);

    CMat3 at(double omega) const;

private:
    std::function<CMat3(double)> fn_;
};

struct Inclusion {
    Vec3 position;
    ReflectivityModel reflectivity = Tunable{};
    std::optional<Polarization> polarization;
};

struct Metasurface {
    std::vector<Inclusion> inclusions;
    std::size_t n_side = 0;
    double side = 0.0;
    Vec3 center;
    Vec3 normal{0.0, 0.0, -1.0};
    double spacing = 0.0;
    Tunable tunable;

    std::size_t count() const { return inclusions.size(); }
};

// Square n x n grid of side D, cell-centred, all elements sharing one Tunable.
Metasurface make_metasurface(std::size_t n_side, double side, const Vec3& center, const Vec3& normal,
                             const Tunable& tunable);
Metasurface with_state(const Metasurface& surface, bool on);

cplx green0(double omega, const Vec3& x, const Vec3& y, const Background& bg);
double green0_im_coincident(double omega, const Background& bg);
CVec3 grad_green0(double omega, const Vec3& x, const Vec3& z, const Background& bg);

cplx rho_of(const ReflectivityModel& model, double omega);
double minnaert_alpha(double delta);
double minnaert_frequency(const Bubble& model);
cplx drude_epsilon(const Drude& model, double omega);
cplx drude_mu(const Drude& model, double omega);

cplx green_full(double omega, const Vec3& x, const Vec3& y, std::span<const Inclusion> inclusions,
                const Background& bg);

void validate(const Background& bg);
void validate(const ReflectivityModel& model);

}
