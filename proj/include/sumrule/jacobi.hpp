#ifndef SUMRULE_JACOBI_HPP
#define SUMRULE_JACOBI_HPP

#include "sumrule/measure.hpp"
#include "sumrule/polynomial.hpp"

namespace sumrule {

/// Recursion coefficients of a measure: b[k-1] is the diagonal entry b_k,
/// a[k-1] the off-diagonal a_k >= 0 of the tridiagonal representation.
struct JacobiSequence {
    std::vector<double> b;
    std::vector<double> a;

    int length() const { return static_cast<int>(b.size()); }
    /// 1-based accessors matching the usual index convention.
    double bk(int k) const { return b.at(static_cast<size_t>(k) - 1); }
    double ak(int k) const { return a.at(static_cast<size_t>(k) - 1); }

    /// All b_k = 0, a_k = 1 (the coefficients of the semicircle law).
    static JacobiSequence free_sequence(int n);

    void validate() const; // sizes and a_k >= 0
};

/// Recursion coefficients b_1..b_N, a_1..a_{N-1} of mu by the discretized
/// Stieltjes procedure: per-interval Gauss-Legendre points weighted by the
/// density (quad_factor * N nodes per support interval), atoms verbatim,
/// then Lanczos with full reorthogonalization. On breakdown (a_k below
/// 1e-12 * support radius, i.e. the measure has fewer than N support
/// points), the achieved shorter sequence is returned.
JacobiSequence measure_to_jacobi(const MeasureModel& mu, int N, int quad_factor = 40);

/// Spectral measure of the tridiagonal matrix of r: implicit-shift QL with
/// Wilkinson shifts, accumulating only the first row of the eigenvector
/// matrix, so atoms are (eigenvalue, first-component^2) with weights summing
/// to 1. Atoms come back sorted ascending.
/// Throws NumericalFailure after 30 N rotations without deflation.
MeasureModel jacobi_to_measure(const JacobiSequence& r);

/// tr V(T_N) for the N-th principal submatrix, by banded powers of T_N
/// (bandwidth grows to deg V); never forms a dense matrix. O(N deg^2).
double trace_poly(const JacobiSequence& r, int N, const Polynomial& V);

/// tr V of the principal submatrix over 1-based index window [lo, hi] of the
/// full tridiagonal matrix given by (b, a) accessors.
double window_trace(const std::vector<double>& b, const std::vector<double>& a, int lo, int hi,
                    const Polynomial& V);

/// Exact seam term M of the trace decomposition
///   tr V(T_n) - tr V(T_n^V) = [tr V(T_N) - tr V(T_N^V)] + M + E_n,
/// i.e. the contribution of closed walks of length <= deg V through the cut
/// at index N, evaluated for the (A,B) and (Ahat,B) splittings on the window
/// [N-d, N+d] (d = deg V / 2) and subtracted. Requires both sequences
/// through index N+d.
double boundary_coupling(const JacobiSequence& r, const JacobiSequence& rV, int N,
                         const Polynomial& V);

/// M_+ window discrepancy: sum of |a_k - a^V_k| + |b_k - b^V_k| over
/// k in [N-d, N+d] (clipped below at 1).
double m_plus(const JacobiSequence& r, const JacobiSequence& rV, int N, int d);

/// Walk-counting constant C(K, V) = sum_j |c_j| j 3^j max(1,K)^{j-1}, an
/// explicit over-estimate making |boundary_coupling| <= C(K,V) * m_plus
/// testable for coefficient sequences bounded by K.
double coupling_constant(double K, const Polynomial& V);

/// Off-diagonal coefficients a_1..a_count of a symmetric measure (b_k = 0)
/// computed through its pushforward under x -> x^2; cheaper and more stable
/// than the direct recursion at large count. The measure must have an even
/// density with symmetric support.
std::vector<double> symmetric_offdiagonals(const GridMeasure& mu, int count, int quad_factor = 40);

} // namespace sumrule

#endif
