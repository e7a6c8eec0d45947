#include "sumrule/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sumrule {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    QuadratureRule rule;
    rule.points.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    const double eps = 1e-15;

    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= eps) break;
        }
        double w = 2.0 * half / ((1.0 - z * z) * pp * pp);
        rule.points[static_cast<size_t>(i)] = mid - half * z;
        rule.points[static_cast<size_t>(n - 1 - i)] = mid + half * z;
        rule.weights[static_cast<size_t>(i)] = w;
        rule.weights[static_cast<size_t>(n - 1 - i)] = w;
    }
    return rule;
}

} // namespace sumrule
