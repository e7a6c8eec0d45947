#include "sumrule/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <quadmath.h>

#include "sumrule/equilibrium.hpp"
#include "sumrule/quadrature.hpp"

namespace sumrule {

JacobiSequence JacobiSequence::free_sequence(int n) {
    JacobiSequence r;
    r.b.assign(static_cast<size_t>(n), 0.0);
    r.a.assign(n > 0 ? static_cast<size_t>(n) - 1 : 0, 1.0);
    return r;
}

void JacobiSequence::validate() const {
    if (!b.empty() && a.size() + 1 != b.size() && a.size() != b.size())
        throw std::invalid_argument("JacobiSequence: need len(a) in {len(b)-1, len(b)}");
    for (double x : a)
        if (x < 0.0) throw std::invalid_argument("JacobiSequence: negative off-diagonal");
}

namespace {

// scalar helpers shared by the double and extended-precision paths; the
// extended path exists because spectral weights of localized sequences
// span many more decades than double rounding noise can keep apart
template <typename T>
T num_abs(T x) {
    return x < T(0) ? -x : x;
}

template <typename T>
T num_sqrt(T x) {
    if constexpr (std::is_same_v<T, __float128>)
        return sqrtq(x);
    else
        return std::sqrt(x);
}

template <typename T>
T num_hypot(T a, T b) {
    a = num_abs(a);
    b = num_abs(b);
    if (a < b) std::swap(a, b);
    if (a == T(0)) return T(0);
    T r = b / a;
    return a * num_sqrt(T(1) + r * r);
}

template <typename T>
constexpr T num_eps() {
    if constexpr (std::is_same_v<T, __float128>)
        return FLT128_EPSILON;
    else
        return std::numeric_limits<double>::epsilon();
}

// Implicit-shift QL with Wilkinson shifts on (d, e), accumulating only the
// first eigenvector row in z; the classical EISPACK imtql2 scheme.
template <typename T>
void ql_first_row(std::vector<T>& d, std::vector<T>& e, std::vector<T>& z) {
    const int n = static_cast<int>(d.size());
    const T eps = num_eps<T>();
    long sweeps = 0;
    const long budget = 30L * n;
    for (int l = 0; l < n; ++l) {
        for (;;) {
            int mm = l;
            for (; mm < n - 1; ++mm) {
                T dd = num_abs(d[mm]) + num_abs(d[mm + 1]);
                if (num_abs(e[mm]) <= eps * dd) break;
            }
            if (mm == l) break;
            if (++sweeps > budget)
                throw NumericalFailure("jacobi_to_measure: QL iteration did not converge");

            T g = (d[l + 1] - d[l]) / (2 * e[l]);
            T rr = num_hypot(g, T(1));
            g = d[mm] - d[l] + e[l] / (g + (g >= T(0) ? num_abs(rr) : -num_abs(rr)));
            T s = 1, c = 1, p = 0;
            bool underflow = false;
            for (int i = mm - 1; i >= l; --i) {
                T f = s * e[i];
                T bb = c * e[i];
                rr = num_hypot(f, g);
                e[i + 1] = rr;
                if (rr == T(0)) { // deflate and retry the sweep
                    d[i + 1] -= p;
                    e[mm] = 0;
                    underflow = true;
                    break;
                }
                s = f / rr;
                c = g / rr;
                g = d[i + 1] - p;
                rr = (d[i] - g) * s + 2 * c * bb;
                p = s * rr;
                d[i + 1] = g + p;
                g = c * rr - bb;
                T zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[mm] = 0;
        }
    }
}

template <typename T>
MeasureModel ql_spectral_measure(const JacobiSequence& r) {
    const int n = r.length();
    std::vector<T> d(r.b.begin(), r.b.begin() + n);
    std::vector<T> e(static_cast<size_t>(n), T(0));
    for (int k = 0; k < n - 1; ++k) e[static_cast<size_t>(k)] = T(r.a[static_cast<size_t>(k)]);
    std::vector<T> z(static_cast<size_t>(n), T(0));
    z[0] = 1;
    ql_first_row(d, e, z);

    std::vector<Atom> atoms(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double w = static_cast<double>(z[static_cast<size_t>(k)] * z[static_cast<size_t>(k)]);
        if (w <= 0.0) w = std::numeric_limits<double>::min();
        atoms[static_cast<size_t>(k)] = {static_cast<double>(d[static_cast<size_t>(k)]), w};
    }
    MeasureModel out = MeasureModel::atomic(std::move(atoms));
    out.normalized = true;
    return out;
}

struct DiscreteMeasure {
    std::vector<double> x;
    std::vector<double> w; // > 0, sums to 1
    double radius = 1.0;   // support scale
    bool pure_atoms = true;
};

// Density evaluation for the quadrature: equilibrium densities vanish like
// sqrt(d(x, boundary)), so the smooth factor rho / sqrt((x-l)(r-x)) is what
// gets interpolated between nodes; the outermost cells, where that factor is
// unavailable, fall back to plain linear interpolation.
double edge_aware_density(const std::vector<double>& xs, const std::vector<double>& ds, double l,
                          double r, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t hi = static_cast<size_t>(it - xs.begin());
    if (hi == 0) return ds.front();
    if (hi >= xs.size()) return ds.back();
    size_t lo = hi - 1;
    double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    if (lo == 0 || hi + 1 == xs.size()) return (1.0 - t) * ds[lo] + t * ds[hi];
    auto edge = [&](double xx) { return std::sqrt(std::max(0.0, (xx - l) * (r - xx))); };
    double slo = edge(xs[lo]), shi = edge(xs[hi]);
    if (slo <= 0.0 || shi <= 0.0) return (1.0 - t) * ds[lo] + t * ds[hi];
    double qv = (1.0 - t) * ds[lo] / slo + t * ds[hi] / shi;
    return qv * edge(x);
}

DiscreteMeasure discretize(const MeasureModel& mu, int N, int quad_factor) {
    DiscreteMeasure d;
    for (size_t m = 0; m < mu.ac.nodes.size(); ++m) {
        const auto& [l, r] = mu.ac.support.intervals[m];
        const auto& xs = mu.ac.nodes[m];
        const auto& ds = mu.ac.densities[m];
        QuadratureRule q = gauss_legendre(std::max(quad_factor * N, 8), l, r);
        for (size_t i = 0; i < q.points.size(); ++i) {
            double w = q.weights[i] * edge_aware_density(xs, ds, l, r, q.points[i]);
            if (w > 0.0) {
                d.x.push_back(q.points[i]);
                d.w.push_back(w);
                d.pure_atoms = false;
            }
        }
    }
    for (const Atom& a : mu.atoms) {
        d.x.push_back(a.position);
        d.w.push_back(a.weight);
    }
    if (d.x.empty()) throw std::invalid_argument("measure_to_jacobi: measure has no mass");
    double total = 0.0;
    for (double w : d.w) total += w;
    for (double& w : d.w) w /= total;
    for (double x : d.x) d.radius = std::max(d.radius, std::abs(x));
    return d;
}

// Stieltjes/Lanczos with full reorthogonalization on a discrete measure.
template <typename T>
JacobiSequence lanczos_discrete(const DiscreteMeasure& d, int N) {
    const size_t m = d.x.size();
    const double breakdown = 1e-12 * d.radius;

    JacobiSequence r;
    std::vector<std::vector<T>> Q;
    Q.reserve(static_cast<size_t>(N));
    std::vector<T> q(m), v(m), x(m);
    T total = 0;
    for (size_t i = 0; i < m; ++i) total += T(d.w[i]);
    for (size_t i = 0; i < m; ++i) {
        q[i] = num_sqrt(T(d.w[i]) / total);
        x[i] = T(d.x[i]);
    }
    Q.push_back(q);

    for (int k = 1; k <= N; ++k) {
        const std::vector<T>& qk = Q.back();
        T bk = 0;
        for (size_t i = 0; i < m; ++i) bk += x[i] * qk[i] * qk[i];
        r.b.push_back(static_cast<double>(bk));
        if (k == N) break;

        for (size_t i = 0; i < m; ++i) v[i] = (x[i] - bk) * qk[i];
        if (Q.size() >= 2) {
            const std::vector<T>& qprev = Q[Q.size() - 2];
            T ak_prev = T(r.a.back());
            for (size_t i = 0; i < m; ++i) v[i] -= ak_prev * qprev[i];
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& qj : Q) {
                T dot = 0;
                for (size_t i = 0; i < m; ++i) dot += qj[i] * v[i];
                for (size_t i = 0; i < m; ++i) v[i] -= dot * qj[i];
            }
        }
        T ak = 0;
        for (T vi : v) ak += vi * vi;
        ak = num_sqrt(ak);
        if (!(static_cast<double>(ak) > breakdown)) break; // finite support reached
        r.a.push_back(static_cast<double>(ak));
        std::vector<T> qn(m);
        for (size_t i = 0; i < m; ++i) qn[i] = v[i] / ak;
        Q.push_back(std::move(qn));
    }
    return r;
}

// size limits under which the extended-precision path is cheap enough to be
// the default; beyond them double precision is quadrature-limited anyway
constexpr int kExactEigenLimit = 256;
constexpr int kExactLanczosLimit = 256;

} // namespace

JacobiSequence measure_to_jacobi(const MeasureModel& mu, int N, int quad_factor) {
    if (N < 1) throw std::invalid_argument("measure_to_jacobi: N >= 1 required");
    DiscreteMeasure d = discretize(mu, N, quad_factor);
    if (d.pure_atoms && static_cast<int>(d.x.size()) <= kExactLanczosLimit && N <= kExactLanczosLimit)
        return lanczos_discrete<__float128>(d, N);
    return lanczos_discrete<double>(d, N);
}

MeasureModel jacobi_to_measure(const JacobiSequence& r) {
    const int n = r.length();
    if (n < 1) throw std::invalid_argument("jacobi_to_measure: empty sequence");
    if (static_cast<int>(r.a.size()) < n - 1)
        throw std::invalid_argument("jacobi_to_measure: need a_1..a_{N-1}");
    for (int k = 0; k < n - 1; ++k)
        if (!(r.a[static_cast<size_t>(k)] > 0.0))
            throw std::invalid_argument("jacobi_to_measure: off-diagonals must be positive");
    if (n <= kExactEigenLimit) return ql_spectral_measure<__float128>(r);
    return ql_spectral_measure<double>(r);
}

namespace {

// Banded symmetric power accumulator: band[o][i] = P[i][i+o], offsets o >= 0.
struct Band {
    int n = 0;
    std::vector<std::vector<double>> diag; // diag[o], length n - o

    static Band identity(int n) {
        Band p;
        p.n = n;
        p.diag.push_back(std::vector<double>(static_cast<size_t>(n), 1.0));
        return p;
    }

    double at(int i, int j) const { // 0-based, symmetric storage
        int o = j - i;
        if (o < 0) {
            std::swap(i, j);
            o = -o;
        }
        if (o >= static_cast<int>(diag.size())) return 0.0;
        return diag[static_cast<size_t>(o)][static_cast<size_t>(i)];
    }

    double trace() const {
        double t = 0.0;
        for (double x : diag[0]) t += x;
        return t;
    }
};

// Q = T * P for tridiagonal symmetric T given by (b, a) over the first n rows.
Band tridiag_mul(const std::vector<double>& b, const std::vector<double>& a, const Band& p) {
    Band q;
    q.n = p.n;
    // bandwidth grows by one per multiplication, capped at the matrix size
    int w = std::min(static_cast<int>(p.diag.size()), p.n - 1);
    q.diag.assign(static_cast<size_t>(w) + 1, {});
    for (int o = 0; o <= w; ++o) q.diag[static_cast<size_t>(o)].assign(static_cast<size_t>(p.n - o), 0.0);
    for (int o = 0; o <= w; ++o) {
        auto& row = q.diag[static_cast<size_t>(o)];
        for (int i = 0; i + o < p.n; ++i) {
            double acc = b[static_cast<size_t>(i)] * p.at(i, i + o);
            if (i > 0) acc += a[static_cast<size_t>(i) - 1] * p.at(i - 1, i + o);
            if (i + 1 < p.n) acc += a[static_cast<size_t>(i)] * p.at(i + 1, i + o);
            row[static_cast<size_t>(i)] = acc;
        }
    }
    return q;
}

} // namespace

double trace_poly(const JacobiSequence& r, int N, const Polynomial& V) {
    if (N < 1) throw std::invalid_argument("trace_poly: N >= 1 required");
    if (r.length() < N || static_cast<int>(r.a.size()) < N - 1)
        throw std::invalid_argument("trace_poly: sequence shorter than N");
    std::vector<double> b(r.b.begin(), r.b.begin() + N);
    std::vector<double> a(r.a.begin(), r.a.begin() + std::max(0, N - 1));

    double acc = V.coeff(0) * static_cast<double>(N);
    Band p = Band::identity(N);
    for (int j = 1; j <= V.degree(); ++j) {
        p = tridiag_mul(b, a, p);
        double cj = V.coeff(j);
        if (cj != 0.0) acc += cj * p.trace();
    }
    return acc;
}

double window_trace(const std::vector<double>& b, const std::vector<double>& a, int lo, int hi,
                    const Polynomial& V) {
    const int n = hi - lo + 1;
    if (n < 1) throw std::invalid_argument("window_trace: empty window");
    std::vector<double> wb(static_cast<size_t>(n)), wa(static_cast<size_t>(n) - 1);
    for (int k = 0; k < n; ++k) wb[static_cast<size_t>(k)] = b.at(static_cast<size_t>(lo - 1 + k));
    for (int k = 0; k + 1 < n; ++k) wa[static_cast<size_t>(k)] = a.at(static_cast<size_t>(lo - 1 + k));
    JacobiSequence w{std::move(wb), std::move(wa)};
    return trace_poly(w, n, V);
}

namespace {

double small_trace(int n, const std::vector<double>& b, const std::vector<double>& a,
                   const Polynomial& V) {
    JacobiSequence w{b, a};
    return trace_poly(w, n, V);
}

} // namespace

double boundary_coupling(const JacobiSequence& r, const JacobiSequence& rV, int N,
                         const Polynomial& V) {
    if (!V.is_valid_potential()) throw std::invalid_argument("boundary_coupling: invalid potential");
    const int d = V.degree() / 2;
    const int wlo = std::max(1, N - d), whi = N + d;
    auto need = [&](const JacobiSequence& s) {
        if (s.length() < whi || static_cast<int>(s.a.size()) < whi - 1)
            throw std::out_of_range("boundary_coupling: window extends beyond available sequence");
    };
    need(r);
    need(rV);

    const int n = whi - wlo + 1;
    // entry selectors for the four splittings; k is the 1-based global index
    auto bsel = [&](const JacobiSequence& low, bool zero_tail, int k) {
        if (k <= N) return low.bk(k);
        return zero_tail ? 0.0 : r.bk(k);
    };
    auto asel = [&](const JacobiSequence& low, bool zero_tail, int k) {
        if (k <= N - 1) return low.ak(k);
        return zero_tail ? 0.0 : r.ak(k); // a_N and beyond come from r's tail
    };

    auto build = [&](const JacobiSequence& low, bool zero_tail) {
        std::vector<double> wb(static_cast<size_t>(n)), wa(static_cast<size_t>(n) - 1);
        for (int i = 0; i < n; ++i) wb[static_cast<size_t>(i)] = bsel(low, zero_tail, wlo + i);
        for (int i = 0; i + 1 < n; ++i) wa[static_cast<size_t>(i)] = asel(low, zero_tail, wlo + i);
        return std::make_pair(wb, wa);
    };

    auto [b1, a1] = build(r, false);   // full T(r) window
    auto [b2, a2] = build(r, true);    // A(r): r up to the cut, zeros beyond
    auto [b3, a3] = build(rV, false);  // hybrid: rV up to the cut, r tail
    auto [b4, a4] = build(rV, true);   // A(rV)

    return small_trace(n, b1, a1, V) - small_trace(n, b2, a2, V) - small_trace(n, b3, a3, V) +
           small_trace(n, b4, a4, V);
}

double m_plus(const JacobiSequence& r, const JacobiSequence& rV, int N, int d) {
    const int lo = std::max(1, N - d), hi = N + d;
    if (r.length() < hi || rV.length() < hi || static_cast<int>(r.a.size()) < hi ||
        static_cast<int>(rV.a.size()) < hi)
        throw std::out_of_range("m_plus: window out of range");
    double s = 0.0;
    for (int k = lo; k <= hi; ++k)
        s += std::abs(r.ak(k) - rV.ak(k)) + std::abs(r.bk(k) - rV.bk(k));
    return s;
}

double coupling_constant(double K, const Polynomial& V) {
    double c = 0.0;
    double kk = std::max(1.0, K);
    for (int j = 1; j <= V.degree(); ++j)
        c += std::abs(V.coeff(j)) * j * std::pow(3.0, j) * std::pow(kk, j - 1);
    return c;
}

std::vector<double> symmetric_offdiagonals(const GridMeasure& mu, int count, int quad_factor) {
    // pushforward under t = x^2 of an even measure: density rho(sqrt t)/sqrt t
    if (mu.empty()) throw std::invalid_argument("symmetric_offdiagonals: empty measure");
    SupportSet sup;
    for (const auto& [l, r] : mu.support.intervals)
        if (r > 0.0) sup.intervals.emplace_back(std::max(0.0, l) * std::max(0.0, l), r * r);
    // guard the integrable 1/sqrt(t) factor when the support reaches 0
    for (auto& [l, r] : sup.intervals) l = std::max(l, 1e-12);

    GridMeasure even = GridMeasure::sampled(sup, 8001, [&](double t) {
        double x = std::sqrt(t);
        return mu.density_at(x) / x;
    });
    even.normalize();

    int half = count / 2 + 2;
    JacobiSequence rv = measure_to_jacobi(MeasureModel::from_ac(even), half, quad_factor);
    if (rv.length() < half)
        throw NumericalFailure("symmetric_offdiagonals: breakdown in the even-part recursion");

    // recover a_k of the symmetric measure:
    //   a_1^2 = btilde_1,  a_{2n}^2 = atilde_n^2 / a_{2n-1}^2,
    //   a_{2n+1}^2 = btilde_{n+1} - a_{2n}^2
    std::vector<double> asq;
    asq.push_back(rv.bk(1));
    for (int nn = 1; static_cast<int>(asq.size()) < count; ++nn) {
        double a_even = rv.ak(nn) * rv.ak(nn) / asq.back();
        asq.push_back(a_even);
        if (static_cast<int>(asq.size()) >= count) break;
        double a_odd = rv.bk(nn + 1) - a_even;
        if (a_odd <= 0.0)
            throw NumericalFailure("symmetric_offdiagonals: lost positivity in the recovery recursion");
        asq.push_back(a_odd);
    }
    asq.resize(static_cast<size_t>(count));
    std::vector<double> a(asq.size());
    for (size_t i = 0; i < asq.size(); ++i) a[i] = std::sqrt(asq[i]);
    return a;
}

} // namespace sumrule
