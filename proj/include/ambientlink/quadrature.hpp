#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ambientlink {

// Composite Gauss-Legendre (20 points per panel) on [a, b].
template <class F>
auto gauss_legendre(F&& f, double a, double b, std::size_t panels = 1)
{
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    using R = decltype(f(a));
    R total{};
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h;
        const double half = 0.5 * h;
        R s{};
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0) {
                s += w[i] * f(mid);
            } else {
                s += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
            }
        }
        total += s * half;
    }
    return total;
}

// Nodes and weights of the same composite rule, for callers that reuse evaluations.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre_rule(double a, double b, std::size_t panels);

// Adaptive Gauss-Kronrod for smooth real integrands.
double adaptive_integral(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

template <class T>
T pairwise_sum(std::span<const T> v)
{
    if (v.size() <= 8) {
        T s{};
        for (const auto& x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

}
