#ifndef SUMRULE_QUADRATURE_HPP
#define SUMRULE_QUADRATURE_HPP

#include <vector>

namespace sumrule {

struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]. Nodes by Newton iteration on the
/// Legendre recurrence, accurate to machine precision.
QuadratureRule gauss_legendre(int n, double a, double b);

} // namespace sumrule

#endif
