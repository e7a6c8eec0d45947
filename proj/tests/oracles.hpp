#ifndef SUMRULE_TEST_ORACLES_HPP
#define SUMRULE_TEST_ORACLES_HPP

// Independent reference computations for the test suites. Everything here is
// deliberately brute force and stays clear of the library's own code paths.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

// adaptive Simpson quadrature; the first `force` levels always subdivide so
// symmetric integrands cannot fool the error estimate at a coarse level
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth, int force) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (force <= 0 && std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, force - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, force - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 24, 6);
}

// moments of the arcsine law on [-2,2] via the substitution t = 2 sin(u);
// the integrand is normalized by 2^k so the tolerance stays relative
inline double arcsine_moment_quad(int k) {
    double scaled = integrate([k](double u) { return std::pow(std::sin(u), k) / M_PI; }, -M_PI / 2,
                              M_PI / 2, 1e-14);
    return std::ldexp(scaled, k);
}

// moments of the semicircle law via the same substitution
inline double sc_moment_quad(int k) {
    double scaled = integrate(
        [k](double u) {
            double c = std::cos(u);
            return std::pow(std::sin(u), k) * (2.0 / M_PI) * c * c;
        },
        -M_PI / 2, M_PI / 2, 1e-14);
    return std::ldexp(scaled, k);
}

// Int (Vp(x) - Vp(t))/(x - t) darcsine(t) at a fixed x, by direct quadrature
inline double v_to_a_quad(const std::function<double(double)>& vprime, double x) {
    return integrate(
        [&](double u) {
            double t = 2.0 * std::sin(u);
            double num;
            if (std::abs(x - t) > 1e-9)
                num = (vprime(x) - vprime(t)) / (x - t);
            else
                num = (vprime(x + 5e-7) - vprime(x - 5e-7)) / 1e-6; // symmetric difference
            return num / M_PI;
        },
        -M_PI / 2, M_PI / 2, 1e-11);
}

// semicircle density and its log-potential in closed form
inline double sc_density(double x) {
    double d = 4.0 - x * x;
    return d > 0.0 ? std::sqrt(d) / (2.0 * M_PI) : 0.0;
}

inline double sc_log_potential(double x) {
    double ax = std::abs(x);
    if (ax <= 2.0) return x * x / 4.0 - 0.5;
    double s = std::sqrt(ax * ax - 4.0);
    return x * x / 4.0 - 0.5 - (ax * s / 4.0 - std::log((ax + s) / 2.0));
}

// rate of an outlier of the Gaussian potential at x > 2:
// Int_2^x sqrt(t^2 - 4) dt, the derivative identity F' = A sqrt(x^2-4), A = 1
inline double gaussian_rate_quad(double x) {
    return integrate([](double t) { return std::sqrt(t * t - 4.0); }, 2.0, x, 1e-12);
}

} // namespace oracles

#endif
