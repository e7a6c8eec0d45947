#include "sumrule/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace sumrule {

PotentialReport validate_potential(const Polynomial& V) {
    PotentialReport rep;
    int deg = V.degree();
    rep.degree = deg;
    if (deg <= 0) {
        rep.message = "potential must be nonconstant";
        return rep;
    }
    if (deg % 2 != 0) {
        rep.message = "potential must have even degree";
        return rep;
    }
    if (V.coeffs().back() <= 0.0) {
        rep.message = "potential must have positive leading coefficient";
        return rep;
    }
    rep.valid = true;
    rep.half_degree = deg / 2;
    rep.message = "ok";
    return rep;
}

namespace {

void require_potential(const Polynomial& V) {
    PotentialReport rep = validate_potential(V);
    if (!rep.valid) throw std::invalid_argument(rep.message);
}

// Residuals of the one-cut endpoint conditions for the pullback
// Vhat(s) = V(c + h s), s in [-2, 2]:
//   G1 = Int Vhat'(s) dArc(s)        = 0
//   G2 = Int s Vhat'(s) dArc(s) - 2  = 0
// with dArc the arcsine law on [-2, 2]. Both are exact moment sums.
struct EndpointSystem {
    const Polynomial& V;

    std::pair<double, double> residual(double c, double h) const {
        Polynomial vp = V.derivative().compose_affine(c, h) * h;
        double g1 = 0.0, g2 = 0.0;
        for (int k = 0; k <= vp.degree(); ++k) {
            g1 += vp.coeff(k) * arcsine_moment(k);
            g2 += vp.coeff(k) * arcsine_moment(k + 1);
        }
        return {g1, g2 - 2.0};
    }

    // Analytic Jacobian via the second derivative.
    std::array<double, 4> jacobian(double c, double h) const {
        Polynomial vp = V.derivative().compose_affine(c, h);
        Polynomial vpp = V.derivative().derivative().compose_affine(c, h);
        double d1c = 0.0, d1h = 0.0, d2c = 0.0, d2h = 0.0;
        for (int k = 0; k <= vpp.degree(); ++k) {
            double w = vpp.coeff(k);
            d1c += h * w * arcsine_moment(k);
            d1h += h * w * arcsine_moment(k + 1);
            d2c += h * w * arcsine_moment(k + 1);
            d2h += h * w * arcsine_moment(k + 2);
        }
        for (int k = 0; k <= vp.degree(); ++k) {
            double w = vp.coeff(k);
            d1h += w * arcsine_moment(k);
            d2h += w * arcsine_moment(k + 1);
        }
        return {d1c, d1h, d2c, d2h};
    }
};

} // namespace

OneCutResult solve_one_cut(const Polynomial& V, int grid_size, double neg_tol) {
    require_potential(V);
    EndpointSystem sys{V};

    double c = 0.0, h = 1.0;
    auto [f1, f2] = sys.residual(c, h);
    double res = std::hypot(f1, f2);
    const double tol = 1e-12;
    const int max_iter = 60;
    int iter = 0;
    for (; iter < max_iter && res > tol; ++iter) {
        auto J = sys.jacobian(c, h);
        double det = J[0] * J[3] - J[1] * J[2];
        if (det == 0.0 || !std::isfinite(det))
            throw NumericalFailure("solve_one_cut: singular Newton system");
        double dc = (J[3] * f1 - J[1] * f2) / det;
        double dh = (-J[2] * f1 + J[0] * f2) / det;
        // step halving until the residual decreases and h stays positive
        double step = 1.0;
        bool accepted = false;
        for (int half = 0; half < 50; ++half, step *= 0.5) {
            double c2 = c - step * dc, h2 = h - step * dh;
            if (h2 <= 0.0) continue;
            auto [g1, g2] = sys.residual(c2, h2);
            double res2 = std::hypot(g1, g2);
            if (res2 < res) {
                c = c2;
                h = h2;
                f1 = g1;
                f2 = g2;
                res = res2;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (res > tol) throw NumericalFailure("solve_one_cut: Newton did not converge");

    OneCutResult out;
    out.center = c;
    out.half = h;
    out.newton_iterations = iter;
    out.A = v_to_a(V.compose_affine(c, h));

    double min_A = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) {
        double s = -2.0 + 4.0 * i / 400.0;
        min_A = std::min(min_A, out.A(s));
    }
    out.min_A = min_A;
    out.one_cut = min_A >= -neg_tol;
    out.support.intervals = {{c - 2.0 * h, c + 2.0 * h}};
    if (out.one_cut) {
        const Polynomial A = out.A;
        const double twopi = 2.0 * M_PI;
        out.measure = GridMeasure::sampled(out.support, grid_size, [&](double x) {
            double s = (x - c) / h;
            double disc = 4.0 - s * s;
            if (disc <= 0.0) return 0.0;
            return A(s) * std::sqrt(disc) / (twopi * h);
        });
        out.measure.normalize();
    }
    return out;
}

double grid_energy(const Polynomial& V, const std::vector<double>& grid,
                   const std::vector<double>& weights) {
    size_t n = grid.size();
    double h = grid[1] - grid[0];
    double diag = std::log(h) - 1.5;
    double e = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (weights[i] == 0.0) continue;
        e += V(grid[i]) * weights[i];
        double row = diag * weights[i];
        for (size_t j = 0; j < n; ++j) {
            if (j == i || weights[j] == 0.0) continue;
            row += std::log(std::abs(grid[i] - grid[j])) * weights[j];
        }
        e -= weights[i] * row;
    }
    return e;
}

namespace {

// Euclidean projection onto the probability simplex (sort-based).
void project_simplex(std::vector<double>& w) {
    std::vector<double> u(w);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double acc = 0.0, tau = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        acc += u[i];
        double t = (acc - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) tau = t;
    }
    for (double& x : w) x = std::max(0.0, x - tau);
}

} // namespace

GridSolveResult solve_grid(const Polynomial& V, double lo, double hi, int grid_size,
                           const GridSolveOptions& opts) {
    require_potential(V);
    if (!(lo < hi)) throw std::invalid_argument("solve_grid: degenerate domain");
    if (grid_size < 200) throw std::invalid_argument("solve_grid: gridsize must be >= 200");

    const size_t n = static_cast<size_t>(grid_size);
    GridSolveResult out;
    out.grid.resize(n);
    const double h = (hi - lo) / static_cast<double>(grid_size - 1);
    for (size_t i = 0; i < n; ++i) out.grid[i] = lo + h * static_cast<double>(i);

    // interaction kernel; diagonal = exact cell average of log|x - y|
    std::vector<double> K(n * n);
    for (size_t i = 0; i < n; ++i) {
        K[i * n + i] = std::log(h) - 1.5;
        for (size_t j = i + 1; j < n; ++j) {
            double v = std::log((j - i) * h);
            K[i * n + j] = v;
            K[j * n + i] = v;
        }
    }
    std::vector<double> pot(n);
    for (size_t i = 0; i < n; ++i) pot[i] = V(out.grid[i]);

    auto kmul = [&](const std::vector<double>& w, std::vector<double>& kw) {
        for (size_t i = 0; i < n; ++i) {
            const double* row = &K[i * n];
            double acc = 0.0;
            for (size_t j = 0; j < n; ++j) acc += row[j] * w[j];
            kw[i] = acc;
        }
    };
    auto energy_of = [&](const std::vector<double>& w, const std::vector<double>& kw) {
        double e = 0.0;
        for (size_t i = 0; i < n; ++i) e += w[i] * (pot[i] - kw[i]);
        return e;
    };

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<double> kw(n), grad(n), trial(n), kw_trial(n), grad_prev(n), w_prev(n);

    kmul(w, kw);
    double energy = energy_of(w, kw);
    for (size_t i = 0; i < n; ++i) grad[i] = pot[i] - 2.0 * kw[i];
    out.energy_trace.push_back(energy);

    double step = 1.0;
    const double armijo = 1e-4;
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        // Barzilai-Borwein step from the previous accepted move
        if (it > 0) {
            double sty = 0.0, yty = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double s = w[i] - w_prev[i];
                double y = grad[i] - grad_prev[i];
                sty += s * y;
                yty += y * y;
            }
            step = (yty > 0.0 && sty > 0.0) ? sty / yty : 1.0;
            step = std::clamp(step, 1e-12, 1e6);
        }

        bool accepted = false;
        double trial_energy = 0.0;
        for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
            for (size_t i = 0; i < n; ++i) trial[i] = w[i] - step * grad[i];
            project_simplex(trial);
            double gdot = 0.0;
            for (size_t i = 0; i < n; ++i) gdot += grad[i] * (trial[i] - w[i]);
            kmul(trial, kw_trial);
            trial_energy = energy_of(trial, kw_trial);
            if (trial_energy <= energy + armijo * gdot) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        w_prev = w;
        grad_prev = grad;
        w = trial;
        kw = kw_trial;
        energy = trial_energy;
        for (size_t i = 0; i < n; ++i) grad[i] = pot[i] - 2.0 * kw[i];
        out.energy_trace.push_back(energy);

        // residual: projected-gradient displacement at unit step
        for (size_t i = 0; i < n; ++i) trial[i] = w[i] - grad[i];
        project_simplex(trial);
        residual = 0.0;
        for (size_t i = 0; i < n; ++i) residual += (trial[i] - w[i]) * (trial[i] - w[i]);
        residual = std::sqrt(residual);
        if (residual <= opts.tolerance) {
            ++it;
            break;
        }
    }

    out.iterations = it;
    out.residual = residual;
    out.converged = residual <= opts.tolerance;
    out.energy = energy;
    out.weights = w;
    if (!out.converged)
        throw NumericalFailure("solve_grid: projected gradient did not converge");

    // support extraction: maximal runs of cells above threshold
    double wmax = *std::max_element(w.begin(), w.end());
    double thresh = wmax * opts.support_threshold;
    GridMeasure& gm = out.measure;
    size_t i = 0;
    while (i < n) {
        if (w[i] <= thresh) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < n && w[j] > thresh) ++j;
        if (static_cast<int>(j - i) >= opts.min_run_cells) {
            std::vector<double> xs(out.grid.begin() + static_cast<long>(i),
                                   out.grid.begin() + static_cast<long>(j));
            std::vector<double> ds(j - i);
            for (size_t k2 = i; k2 < j; ++k2) ds[k2 - i] = w[k2] / h;
            gm.support.intervals.emplace_back(xs.front(), xs.back());
            gm.nodes.push_back(std::move(xs));
            gm.densities.push_back(std::move(ds));
        }
        i = j;
    }
    if (gm.nodes.empty()) throw NumericalFailure("solve_grid: no support extracted");
    gm.set_mass_from_trapezoid();
    gm.normalize();
    return out;
}

Polynomial quartic_potential(double v) {
    return Polynomial({0.0, 0.0, -v / 2.0, 0.0, 0.25});
}

QuarticEquilibrium quartic_equilibrium(double v, int nodes_per_interval) {
    if (!(v > 2.0))
        throw std::invalid_argument("quartic_equilibrium: need v > 2 (one-cut regime otherwise)");
    QuarticEquilibrium q;
    q.alpha_minus = std::sqrt(v - 2.0);
    q.alpha_plus = std::sqrt(v + 2.0);
    double disc = std::sqrt(v * v - 4.0);
    q.ell1 = (v - disc) / 2.0;
    q.ell2 = (v + disc) / 2.0;
    q.support.intervals = {{-q.alpha_plus, -q.alpha_minus}, {q.alpha_minus, q.alpha_plus}};

    const double am2 = q.alpha_minus * q.alpha_minus;
    const double ap2 = q.alpha_plus * q.alpha_plus;
    q.measure = GridMeasure::sampled(q.support, nodes_per_interval, [&](double x) {
        double u = x * x;
        double disc2 = (u - am2) * (ap2 - u);
        if (disc2 <= 0.0) return 0.0;
        return std::abs(x) * std::sqrt(disc2) / (2.0 * M_PI);
    });
    q.measure.normalize();
    return q;
}

double confinement_radius(const Polynomial& V) {
    double vmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) vmin = std::min(vmin, V(-8.0 + 16.0 * i / 400.0));
    double R = 2.0;
    while (R < 256.0) {
        if (V(R) - 2.0 * std::log(2.0 * R) > vmin + 10.0 &&
            V(-R) - 2.0 * std::log(2.0 * R) > vmin + 10.0)
            break;
        R *= 1.5;
    }
    return R;
}

GridMeasure equilibrium_measure(const Polynomial& V, int grid_size) {
    OneCutResult oc = solve_one_cut(V);
    if (oc.one_cut) return oc.measure;
    double R = confinement_radius(V);
    return solve_grid(V, -R, R, grid_size).measure;
}

double log_potential(const GridMeasure& mu, double x) {
    // Int over each cell of (linear density) * log|x - t|, closed form:
    //   Int log|u| du        = u log|u| - u
    //   Int u log|u| du      = u^2/2 log|u| - u^2/4
    auto I0 = [](double u) { return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u; };
    auto I1 = [](double u) { return u == 0.0 ? 0.0 : 0.5 * u * u * std::log(std::abs(u)) - 0.25 * u * u; };

    double acc = 0.0;
    for (size_t m = 0; m < mu.nodes.size(); ++m) {
        const auto& xs = mu.nodes[m];
        const auto& ds = mu.densities[m];
        for (size_t i = 0; i + 1 < xs.size(); ++i) {
            double p = xs[i], qq = xs[i + 1];
            double width = qq - p;
            if (width <= 0.0) continue;
            double slope = (ds[i + 1] - ds[i]) / width;
            double a = p - x, b = qq - x;
            double alpha = ds[i] + slope * (x - p); // density extrapolated to t = x
            acc += alpha * (I0(b) - I0(a)) + slope * (I1(b) - I1(a));
        }
    }
    return acc;
}

double effective_potential(const Polynomial& V, const GridMeasure& mu_V, double x) {
    return V(x) - 2.0 * log_potential(mu_V, x);
}

namespace {

// golden-section minimization of a unimodal-ish function on [a, b]
template <typename F>
std::pair<double, double> golden_min(F&& f, double a, double b, int iters = 80) {
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && b - a > 1e-13 * (1.0 + std::abs(a)); ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

} // namespace

EffectivePotential::EffectivePotential(Polynomial V, GridMeasure mu_V)
    : V_(std::move(V)), mu_(std::move(mu_V)) {
    if (mu_.empty()) throw std::invalid_argument("EffectivePotential: empty measure");
    // locate inf J_V: scan [l1 - 2, rM + 2] plus golden refinement around the
    // best scan cells; J_V grows at infinity by confinement
    double lo = mu_.support.left() - 2.0, hi = mu_.support.right() + 2.0;
    const int n = 2000;
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    std::vector<double> vals(static_cast<size_t>(n + 1));
    for (int i = 0; i <= n; ++i) {
        double x = lo + (hi - lo) * i / n;
        vals[static_cast<size_t>(i)] = (*this)(x);
        if (vals[static_cast<size_t>(i)] < best) {
            best = vals[static_cast<size_t>(i)];
            best_i = i;
        }
    }
    double step = (hi - lo) / n;
    double a = lo + step * std::max(0, best_i - 1);
    double b = lo + step * std::min(n, best_i + 1);
    double refined = golden_min([this](double x) { return (*this)(x); }, a, b).second;
    infimum_ = std::min(best, refined);
}

double EffectivePotential::operator()(double x) const {
    return V_(x) - 2.0 * log_potential(mu_, x);
}

ExtReal EffectivePotential::rate(double x) const {
    if (mu_.support.contains_interior(x)) return ExtReal::infinity();
    return ExtReal((*this)(x) - infimum_);
}

ExtReal rate_F(const Polynomial& V, const GridMeasure& mu_V, double x) {
    return EffectivePotential(V, mu_V).rate(x);
}

A2Report check_A2(const Polynomial& V, const GridMeasure& mu_V, int scan_points, double value_tol) {
    A2Report rep;
    const SupportSet& I = mu_V.support;
    auto J = [&](double x) { return effective_potential(V, mu_V, x); };

    rep.boundary_value = std::numeric_limits<double>::infinity();
    for (const auto& [l, r] : I.intervals)
        rep.boundary_value = std::min({rep.boundary_value, J(l), J(r)});

    // complement of Int(I) within [l1 - 2, rM + 2]: outer tails plus gaps
    std::vector<std::pair<double, double>> pieces;
    pieces.emplace_back(I.left() - 2.0, I.left());
    for (int m = 0; m + 1 < I.cut_count(); ++m)
        pieces.emplace_back(I.intervals[static_cast<size_t>(m)].second,
                            I.intervals[static_cast<size_t>(m) + 1].first);
    pieces.emplace_back(I.right(), I.right() + 2.0);

    double total_len = 0.0;
    for (auto& [a, b] : pieces) total_len += b - a;

    rep.complement_min = std::numeric_limits<double>::infinity();
    double scan_step = total_len / scan_points;
    for (auto& [a, b] : pieces) {
        int n = std::max(8, static_cast<int>(std::ceil((b - a) / scan_step)));
        for (int i = 0; i <= n; ++i) {
            double x = a + (b - a) * i / n;
            double f = J(x);
            if (f < rep.complement_min) {
                rep.complement_min = f;
                rep.complement_argmin = x;
            }
        }
        auto [xr, fr] = golden_min(J, a, b, 60);
        if (fr < rep.complement_min) {
            rep.complement_min = fr;
            rep.complement_argmin = xr;
        }
    }

    // min of J over the support itself (detects inconsistent (V, mu) input)
    rep.interior_min = std::numeric_limits<double>::infinity();
    for (const auto& [l, r] : I.intervals) {
        int n = std::max(16, scan_points / (4 * I.cut_count()));
        for (int i = 0; i <= n; ++i) {
            rep.interior_min = std::min(rep.interior_min, J(l + (r - l) * i / n));
        }
    }

    double pos_tol = 4.0 * scan_step;
    bool min_on_boundary = I.distance(rep.complement_argmin) <= pos_tol &&
                           rep.complement_min >= rep.boundary_value - value_tol;
    bool consistent_pair = rep.interior_min >= rep.complement_min - value_tol;
    rep.pass = min_on_boundary && consistent_pair;
    if (!consistent_pair)
        rep.message = "effective potential dips below its boundary value inside the support";
    else if (!min_on_boundary)
        rep.message = "effective potential attains its complement minimum away from the boundary";
    else
        rep.message = "ok";
    return rep;
}

} // namespace sumrule
