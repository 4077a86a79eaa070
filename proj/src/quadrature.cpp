#include "ambientlink/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ambientlink {

QuadratureRule gauss_legendre_rule(double a, double b, std::size_t panels)
{
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    QuadratureRule q;
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + h * (static_cast<double>(p) + 0.5);
        const double half = 0.5 * h;
        for (std::size_t i = x.size(); i-- > 0;) {
            if (x[i] == 0.0) continue;
            q.nodes.push_back(mid - half * x[i]);
            q.weights.push_back(w[i] * half);
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            q.nodes.push_back(mid + half * x[i]);
            q.weights.push_back(w[i] * half);
        }
    }
    return q;
}

double adaptive_integral(const std::function<double(double)>& f, double a, double b, double tol)
{
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol);
}

}
