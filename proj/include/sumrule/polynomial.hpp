#ifndef SUMRULE_POLYNOMIAL_HPP
#define SUMRULE_POLYNOMIAL_HPP

#include <vector>

namespace sumrule {

/// Real polynomial in the monomial basis, coeffs()[k] multiplying x^k.
/// The zero polynomial has degree -1; otherwise the trailing coefficient
/// is nonzero.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    /// c * x^k
    static Polynomial monomial(int k, double c = 1.0);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double coeff(int k) const;

    /// Horner evaluation.
    double operator()(double x) const;

    Polynomial derivative() const;

    /// p(center + scale * x), expanded in x.
    Polynomial compose_affine(double center, double scale) const;

    /// Even degree >= 2 with positive leading coefficient (the admissible
    /// class of confining potentials).
    bool is_valid_potential() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(double s) const;
    Polynomial operator*(const Polynomial& o) const;

private:
    void trim();
    std::vector<double> coeffs_;
};

/// k-th moment of the arcsine law dt / (pi sqrt(4 - t^2)) on [-2, 2]:
/// 0 for odd k, binomial(k, k/2) for even k. Rejects k < 0.
double arcsine_moment(int k);

/// k-th moment of the semicircle law (2 pi)^{-1} sqrt(4 - t^2) dt on [-2, 2]:
/// 0 for odd k, Catalan(k/2) for even k. Rejects k < 0.
double sc_moment(int k);

/// Density factor A of the equilibrium measure A(x) dSC(x) on the reference
/// interval [-2, 2] for the potential V:
///   A(x) = (1/pi) Int (V'(x) - V'(t)) / (x - t) dt / sqrt(4 - t^2).
/// The divided difference is expanded symbolically and integrated with
/// arcsine moments, so the result is exact up to rounding. deg A = deg V - 2.
/// Throws std::invalid_argument if V is not a valid potential.
Polynomial v_to_a(const Polynomial& V);

/// Inverse direction: V'(x) = x A(x) - 2 Int (A(x) - A(t)) / (x - t) dSC(t),
/// extended to all real x as a polynomial identity.
Polynomial a_to_v_prime(const Polynomial& A);

} // namespace sumrule

#endif
