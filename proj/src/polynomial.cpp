#include "sumrule/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace sumrule {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    trim();
}

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Polynomial Polynomial::monomial(int k, double c) {
    if (k < 0) throw std::invalid_argument("monomial: negative exponent");
    std::vector<double> v(static_cast<size_t>(k) + 1, 0.0);
    v.back() = c;
    return Polynomial(std::move(v));
}

double Polynomial::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0.0;
    return coeffs_[static_cast<size_t>(k)];
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return Polynomial();
    std::vector<double> d(coeffs_.size() - 1);
    for (size_t k = 1; k < coeffs_.size(); ++k)
        d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::compose_affine(double center, double scale) const {
    // Horner with the linear factor (center + scale x).
    Polynomial acc;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        std::vector<double> next(acc.coeffs_.size() + 1, 0.0);
        for (size_t i = 0; i < acc.coeffs_.size(); ++i) {
            next[i] += center * acc.coeffs_[i];
            next[i + 1] += scale * acc.coeffs_[i];
        }
        if (next.empty()) next.push_back(0.0);
        next[0] += *it;
        acc = Polynomial(std::move(next));
    }
    return acc;
}

bool Polynomial::is_valid_potential() const {
    int deg = degree();
    return deg >= 2 && deg % 2 == 0 && coeffs_.back() > 0.0;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<double> v(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
    for (size_t i = 0; i < coeffs_.size(); ++i) v[i] += coeffs_[i];
    for (size_t i = 0; i < o.coeffs_.size(); ++i) v[i] += o.coeffs_[i];
    return Polynomial(std::move(v));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    return *this + o * -1.0;
}

Polynomial Polynomial::operator*(double s) const {
    std::vector<double> v(coeffs_);
    for (double& c : v) c *= s;
    return Polynomial(std::move(v));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return Polynomial();
    std::vector<double> v(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
    for (size_t i = 0; i < coeffs_.size(); ++i)
        for (size_t j = 0; j < o.coeffs_.size(); ++j) v[i + j] += coeffs_[i] * o.coeffs_[j];
    return Polynomial(std::move(v));
}

double arcsine_moment(int k) {
    if (k < 0) throw std::invalid_argument("arcsine_moment: negative order");
    if (k % 2 == 1) return 0.0;
    // central binomial C(k, k/2)
    int m = k / 2;
    double c = 1.0;
    for (int i = 1; i <= m; ++i) c *= static_cast<double>(m + i) / static_cast<double>(i);
    return c;
}

double sc_moment(int k) {
    if (k < 0) throw std::invalid_argument("sc_moment: negative order");
    if (k % 2 == 1) return 0.0;
    int m = k / 2;
    // Catalan(m) = C(2m, m) / (m + 1)
    return arcsine_moment(k) / static_cast<double>(m + 1);
}

namespace {

// Int (p(x) - p(t)) / (x - t) dm(t) for a moment functional m, expanded via
// (x^j - t^j)/(x - t) = sum_{i<j} x^i t^{j-1-i}. Exact, no cancellation.
Polynomial divided_difference_integral(const Polynomial& p, double (*moment)(int)) {
    int deg = p.degree();
    if (deg < 1) return Polynomial();
    std::vector<double> out(static_cast<size_t>(deg), 0.0);
    for (int j = 1; j <= deg; ++j) {
        double cj = p.coeff(j);
        if (cj == 0.0) continue;
        for (int i = 0; i < j; ++i) out[static_cast<size_t>(i)] += cj * moment(j - 1 - i);
    }
    return Polynomial(std::move(out));
}

} // namespace

Polynomial v_to_a(const Polynomial& V) {
    if (!V.is_valid_potential())
        throw std::invalid_argument("v_to_a: potential must have even degree >= 2 and positive leading coefficient");
    return divided_difference_integral(V.derivative(), &arcsine_moment);
}

Polynomial a_to_v_prime(const Polynomial& A) {
    Polynomial xA = Polynomial::monomial(1) * A;
    return xA - divided_difference_integral(A, &sc_moment) * 2.0;
}

} // namespace sumrule
