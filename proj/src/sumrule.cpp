#include "sumrule/sumrule.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

namespace sumrule {

ExtReal coefficient_side(const JacobiSequence& r, const JacobiSequence& rV, const Polynomial& V,
                         int N) {
    if (N < 1) throw std::invalid_argument("coefficient_side: N >= 1 required");
    if (r.length() < N || rV.length() < N)
        throw std::invalid_argument("coefficient_side: sequences shorter than N");
    for (int k = 1; k <= N - 1; ++k) {
        if (!(rV.ak(k) > 0.0))
            throw std::invalid_argument("coefficient_side: reference sequence must have a_k > 0");
        if (!(r.ak(k) > 0.0)) return ExtReal::infinity();
    }
    double logs = 0.0;
    for (int k = 1; k <= N - 1; ++k) logs += std::log(r.ak(k) / rV.ak(k));
    return trace_poly(r, N, V) - trace_poly(rV, N, V) - 2.0 * logs;
}

ExtReal kl_reversed(const GridMeasure& mu_V, const MeasureModel& mu) {
    if (std::abs(mu.total_mass() - 1.0) > 1e-6)
        throw std::invalid_argument("kl_reversed: mu must be normalized");
    const double clip = 1e-300;
    double acc = 0.0;
    for (size_t m = 0; m < mu_V.nodes.size(); ++m) {
        const auto& xs = mu_V.nodes[m];
        const auto& ds = mu_V.densities[m];
        for (size_t i = 0; i + 1 < xs.size(); ++i) {
            double dx = xs[i + 1] - xs[i];
            for (size_t e = 0; e < 2; ++e) {
                double rho_v = ds[i + e];
                if (rho_v <= 0.0) continue;
                double f = mu.ac.density_at(xs[i + e]) / rho_v;
                if (f <= clip) return ExtReal::infinity();
                acc -= 0.5 * dx * rho_v * std::log(f);
            }
        }
    }
    // Jensen gives K >= 0 exactly; clear quadrature dust
    if (acc < 0.0 && acc > -1e-8) acc = 0.0;
    return acc;
}

namespace {

// 0-based row of an outlier position; rows alternate
// [left of l_1], [r_1, theta_1], (theta_1, l_2], ..., [right of r_M].
int outlier_row(const SupportSet& I, double x) {
    if (x < I.left()) return 0;
    if (x > I.right()) return 2 * I.cut_count() - 1;
    for (int m = 0; m + 1 < I.cut_count(); ++m) {
        double r = I.intervals[static_cast<size_t>(m)].second;
        double l = I.intervals[static_cast<size_t>(m) + 1].first;
        if (x > r && x < l) return x <= I.midpoint(m) ? 2 * m + 1 : 2 * m + 2;
    }
    throw std::logic_error("outlier_row: position not outside the support");
}

// padding element of a 0-based row: l_m for odd 1-based rows, r_m for even.
double row_padding(const SupportSet& I, int row) {
    if (row % 2 == 0) return I.intervals[static_cast<size_t>(row) / 2].first;
    return I.intervals[static_cast<size_t>(row - 1) / 2].second;
}

} // namespace

OutlierEncoding encode_outliers(const MeasureModel& mu, const SupportSet& I, int depth) {
    if (depth < 1) throw std::invalid_argument("encode_outliers: depth >= 1 required");
    I.validate();
    OutlierEncoding enc;
    enc.rows = 2 * I.cut_count();
    enc.depth = depth;
    std::vector<std::vector<Atom>> rows(static_cast<size_t>(enc.rows));
    for (const Atom& a : mu.outliers(I))
        rows[static_cast<size_t>(outlier_row(I, a.position))].push_back(a);

    for (int i = 0; i < enc.rows; ++i) {
        auto& row = rows[static_cast<size_t>(i)];
        std::sort(row.begin(), row.end(), [&](const Atom& x, const Atom& y) {
            return I.distance(x.position) > I.distance(y.position);
        });
        if (static_cast<int>(row.size()) > depth) {
            enc.truncated = true;
            row.resize(static_cast<size_t>(depth));
        }
        std::vector<double> zeta(static_cast<size_t>(depth), row_padding(I, i));
        std::vector<double> gamma(static_cast<size_t>(depth), 0.0);
        for (size_t j = 0; j < row.size(); ++j) {
            zeta[j] = row[j].position;
            gamma[j] = row[j].weight;
        }
        enc.zeta.push_back(std::move(zeta));
        enc.gamma.push_back(std::move(gamma));
    }
    return enc;
}

void OutlierEncoding::validate(const SupportSet& I) const {
    if (rows != 2 * I.cut_count() || static_cast<int>(zeta.size()) != rows)
        throw std::invalid_argument("OutlierEncoding: row count mismatch");
    for (int i = 0; i < rows; ++i) {
        const auto& z = zeta[static_cast<size_t>(i)];
        const auto& g = gamma[static_cast<size_t>(i)];
        if (static_cast<int>(z.size()) != depth || g.size() != z.size())
            throw std::invalid_argument("OutlierEncoding: bad row length");
        for (int j = 0; j < depth; ++j) {
            double x = z[static_cast<size_t>(j)];
            // row membership
            bool ok;
            if (i == 0) {
                ok = x <= I.left();
            } else if (i == rows - 1) {
                ok = x >= I.right();
            } else if (i % 2 == 1) {
                int m = (i - 1) / 2;
                ok = x >= I.intervals[static_cast<size_t>(m)].second && x <= I.midpoint(m);
            } else {
                int m = i / 2 - 1;
                ok = x > I.midpoint(m) && x <= I.intervals[static_cast<size_t>(m) + 1].first;
            }
            if (!ok) throw std::invalid_argument("OutlierEncoding: row membership violated");
            // weights vanish exactly on the boundary padding
            bool on_boundary = I.distance(x) == 0.0;
            if (on_boundary != (g[static_cast<size_t>(j)] == 0.0))
                throw std::invalid_argument("OutlierEncoding: zero-weight rule violated");
            if (j + 1 < depth) {
                double d0 = I.distance(x), d1 = I.distance(z[static_cast<size_t>(j) + 1]);
                if (d0 < d1 || (d0 == d1 && d0 > 0.0))
                    throw std::invalid_argument("OutlierEncoding: ordering violated");
            }
        }
    }
}

MeasureModel decode_theta(const GridMeasure& mu_I, const OutlierEncoding& enc) {
    MeasureModel out = MeasureModel::from_ac(mu_I);
    for (int i = 0; i < enc.rows; ++i)
        for (int j = 0; j < enc.depth; ++j) {
            double g = enc.gamma[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (g > 0.0) out.atoms.push_back({enc.zeta[static_cast<size_t>(i)][static_cast<size_t>(j)], g});
        }
    out.tidy_atoms();
    out.normalized = std::abs(out.total_mass() - 1.0) <= 1e-9;
    return out;
}

namespace {

// coarsest edge cell of a reference grid measure: support endpoints located
// from sampled data are only trustworthy to this resolution
double support_resolution(const GridMeasure& g) {
    double res = 0.0;
    for (const auto& xs : g.nodes) {
        if (xs.size() < 2) continue;
        res = std::max({res, xs[1] - xs[0], xs[xs.size() - 1] - xs[xs.size() - 2]});
    }
    return res;
}

// absolutely continuous mass of mu lying outside I, ignoring a slack set by
// the grid resolutions of both measures
double ac_mass_outside(const MeasureModel& mu, const SupportSet& I, double reference_resolution) {
    double mass = 0.0;
    for (size_t m = 0; m < mu.ac.nodes.size(); ++m) {
        const auto& xs = mu.ac.nodes[m];
        const auto& ds = mu.ac.densities[m];
        double cell = xs.size() > 1 ? (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1) : 0.0;
        double slack = 2.0 * cell + 2.0 * reference_resolution + 1e-9;
        for (size_t i = 0; i + 1 < xs.size(); ++i) {
            double xmid = 0.5 * (xs[i] + xs[i + 1]);
            if (I.distance(xmid) > slack)
                mass += 0.5 * (ds[i] + ds[i + 1]) * (xs[i + 1] - xs[i]);
        }
    }
    return mass;
}

} // namespace

ExtReal spectral_side(const MeasureModel& mu, const EffectivePotential& JV) {
    if (std::abs(mu.total_mass() - 1.0) > 1e-6)
        throw std::invalid_argument("spectral_side: mu must be normalized");
    const SupportSet& I = JV.support();
    if (ac_mass_outside(mu, I, support_resolution(JV.measure())) > 1e-9) return ExtReal::infinity();
    ExtReal total = kl_reversed(JV.measure(), mu);
    for (const Atom& a : mu.outliers(I)) total += JV.rate(a.position);
    return total;
}

ExtReal spectral_side(const MeasureModel& mu, const Polynomial& V, const GridMeasure& mu_V,
                      const SupportSet& I) {
    if (std::abs(mu.total_mass() - 1.0) > 1e-6)
        throw std::invalid_argument("spectral_side: mu must be normalized");
    if (ac_mass_outside(mu, I, support_resolution(mu_V)) > 1e-9) return ExtReal::infinity();
    ExtReal total = kl_reversed(mu_V, mu);
    EffectivePotential JV(V, mu_V);
    for (const Atom& a : mu.outliers(I)) total += JV.rate(a.position);
    return total;
}

double lieb_thirring_sum(const MeasureModel& mu, const SupportSet& I) {
    double s = 0.0;
    for (const Atom& a : mu.outliers(I)) s += std::pow(I.distance(a.position), 1.5);
    return s;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::converged_equal: return "converged-equal";
        case Verdict::corridor_consistent: return "corridor-consistent";
        case Verdict::diverged: return "diverged";
        case Verdict::spectral_infinite: return "spectral-infinite";
    }
    return "unknown";
}

std::string SumRuleReport::to_csv() const {
    std::ostringstream os;
    os << "N,U_N,M,M_plus,corridor\n";
    char buf[160];
    for (size_t i = 0; i < U.size(); ++i) {
        if (U_finite[i])
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", i + 1, U[i],
                          boundary_terms[i], m_plus_terms[i], corridor[i]);
        else
            std::snprintf(buf, sizeof buf, "%zu,inf,%.17g,%.17g,%.17g\n", i + 1, boundary_terms[i],
                          m_plus_terms[i], corridor[i]);
        os << buf;
    }
    return os.str();
}

SumRuleReport verify_sum_rule(const MeasureModel& mu, const Polynomial& V, int N_max, double K,
                              const VerifyOptions& opts) {
    PotentialReport pv = validate_potential(V);
    if (!pv.valid) throw std::invalid_argument("verify_sum_rule: " + pv.message);
    if (N_max < 2) throw std::invalid_argument("verify_sum_rule: N_max >= 2 required");
    const int d = pv.half_degree;

    SumRuleReport rep;
    rep.tol_eq = opts.tol_eq;
    rep.C_KV = coupling_constant(K, V);

    GridMeasure muV = opts.equilibrium ? *opts.equilibrium : equilibrium_measure(V, opts.grid_size);
    rep.cut_count = muV.support.cut_count();

    const int L = N_max + d + 1;
    JacobiSequence r = measure_to_jacobi(mu, L);
    JacobiSequence rV = measure_to_jacobi(MeasureModel::from_ac(muV), L);
    if (r.length() < N_max || rV.length() < N_max)
        throw NumericalFailure("verify_sum_rule: coefficient computation broke down before N_max");
    const int L_eff = std::min(r.length(), rV.length());

    rep.U.assign(static_cast<size_t>(N_max), 0.0);
    rep.U_finite.assign(static_cast<size_t>(N_max), true);
    rep.boundary_terms.assign(static_cast<size_t>(N_max), 0.0);
    rep.m_plus_terms.assign(static_cast<size_t>(N_max), 0.0);
    rep.corridor.assign(static_cast<size_t>(N_max), 0.0);
    auto fill = [&](int N) {
        ExtReal u = coefficient_side(r, rV, V, N);
        rep.U_finite[static_cast<size_t>(N) - 1] = u.is_finite();
        rep.U[static_cast<size_t>(N) - 1] = u.value_or(std::numeric_limits<double>::quiet_NaN());
        if (N + d <= L_eff && N + d <= static_cast<int>(std::min(r.a.size(), rV.a.size()))) {
            rep.boundary_terms[static_cast<size_t>(N) - 1] = boundary_coupling(r, rV, N, V);
            rep.m_plus_terms[static_cast<size_t>(N) - 1] = m_plus(r, rV, N, d);
            rep.corridor[static_cast<size_t>(N) - 1] =
                rep.C_KV * rep.m_plus_terms[static_cast<size_t>(N) - 1];
        }
    };
    if (opts.jobs > 1) {
        // each N is an independent pure reduction into its own slot
        std::atomic<int> next{1};
        auto worker = [&]() {
            for (int N = next.fetch_add(1); N <= N_max; N = next.fetch_add(1)) fill(N);
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < opts.jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    } else {
        for (int N = 1; N <= N_max; ++N) fill(N);
    }

    rep.spectral_kl = kl_reversed(muV, mu);
    EffectivePotential JV(V, muV);
    ExtReal outliers(0.0);
    for (const Atom& a : mu.outliers(muV.support)) outliers += JV.rate(a.position);
    rep.outlier_sum = outliers;
    if (ac_mass_outside(mu, muV.support, support_resolution(muV)) > 1e-9)
        rep.spectral_total = ExtReal::infinity();
    else
        rep.spectral_total = rep.spectral_kl + rep.outlier_sum;

    // verdict over the trailing window
    const int W = std::max(3, static_cast<int>(opts.tail_fraction * N_max));
    double tail_min = std::numeric_limits<double>::infinity();
    double tail_max = -std::numeric_limits<double>::infinity();
    double tail_mplus = 0.0;
    bool tail_all_finite = true;
    for (int N = std::max(1, N_max - W + 1); N <= N_max; ++N) {
        size_t i = static_cast<size_t>(N) - 1;
        if (!rep.U_finite[i]) {
            tail_all_finite = false;
            continue;
        }
        tail_min = std::min(tail_min, rep.U[i]);
        tail_max = std::max(tail_max, rep.U[i]);
        tail_mplus = std::max(tail_mplus, rep.m_plus_terms[i]);
    }

    if (rep.spectral_total.is_infinite()) {
        bool u_diverges = !tail_all_finite || tail_max > opts.divergence_threshold;
        rep.verdict = u_diverges ? Verdict::spectral_infinite : Verdict::diverged;
    } else if (!tail_all_finite) {
        rep.verdict = Verdict::diverged;
    } else if (rep.cut_count == 1) {
        double sp = rep.spectral_total.value();
        double u_last = rep.U[static_cast<size_t>(N_max) - 1];
        bool cauchy = tail_max - tail_min <= opts.tol_eq;
        rep.verdict = (std::abs(u_last - sp) <= opts.tol_eq && cauchy) ? Verdict::converged_equal
                                                                       : Verdict::diverged;
    } else {
        double sp = rep.spectral_total.value();
        double corr = rep.C_KV * tail_mplus;
        rep.verdict = (sp >= tail_min - corr && sp <= tail_max + corr)
                          ? Verdict::corridor_consistent
                          : Verdict::diverged;
    }
    return rep;
}

GemReport gem_check(const MeasureModel& mu, const Polynomial& V, const GemThresholds& thr) {
    PotentialReport pv = validate_potential(V);
    if (!pv.valid) throw std::invalid_argument("gem_check: " + pv.message);
    GemReport rep;

    GridMeasure muV = equilibrium_measure(V, 800);
    const SupportSet& I = muV.support;

    rep.in_S1 =
        std::abs(mu.total_mass() - 1.0) <= 1e-6 && ac_mass_outside(mu, I, support_resolution(muV)) <= 1e-9;

    EffectivePotential JV(V, muV);
    ExtReal osum(0.0);
    for (const Atom& a : mu.outliers(I)) osum += JV.rate(a.position);
    rep.outlier_sum = osum.value_or(std::numeric_limits<double>::infinity());
    rep.outlier_sum_finite = osum.is_finite() && rep.outlier_sum < thr.rate_bound;

    ExtReal kl = kl_reversed(muV, mu);
    rep.szego_integral = kl.is_finite() ? -kl.value() : -std::numeric_limits<double>::infinity();
    rep.szego_finite = kl.is_finite() && kl.value() < thr.rate_bound;

    JacobiSequence r = measure_to_jacobi(mu, thr.N_max + 1);
    JacobiSequence rV = measure_to_jacobi(MeasureModel::from_ac(muV), thr.N_max + 1);
    bool ok = r.length() >= thr.N_max && rV.length() >= thr.N_max;
    double sup_u = -std::numeric_limits<double>::infinity();
    if (ok) {
        for (int N = 1; N <= thr.N_max; ++N) {
            ExtReal u = coefficient_side(r, rV, V, N);
            if (u.is_infinite()) {
                ok = false;
                break;
            }
            sup_u = std::max(sup_u, u.value());
        }
    }
    rep.sup_U = ok ? sup_u : std::numeric_limits<double>::infinity();
    rep.coefficient_bounded = ok && sup_u < thr.rate_bound;

    rep.consistent =
        rep.coefficient_bounded == (rep.in_S1 && rep.outlier_sum_finite && rep.szego_finite);
    return rep;
}

double pseudorate_gap(double v) {
    if (!(v > 2.0)) throw std::invalid_argument("pseudorate_gap: need v > 2");
    double disc = std::sqrt(v * v - 4.0);
    double l1 = (v - disc) / 2.0, l2 = (v + disc) / 2.0; // a^2 = l1, abar^2 = l2
    return 0.5 * (l2 * l2 - l1 * l1) - v * (l2 - l1) - std::log(l2 / l1);
}

JacobiSequence swap_offdiagonal_pairs(const JacobiSequence& r) {
    JacobiSequence s = r;
    for (size_t i = 0; i + 1 < s.a.size(); i += 2) std::swap(s.a[i], s.a[i + 1]);
    return s;
}

QuarticGapEstimate quartic_gap_estimate(double v, int N) {
    QuarticGapEstimate est;
    est.N = N;
    est.analytic = pseudorate_gap(v);

    QuarticEquilibrium q = quartic_equilibrium(v);
    const int count = 2 * N + 4;
    std::vector<double> a = symmetric_offdiagonals(q.measure, count);
    JacobiSequence rV;
    rV.b.assign(static_cast<size_t>(count) + 1, 0.0);
    rV.a = a;
    JacobiSequence swapped = swap_offdiagonal_pairs(rV);

    Polynomial Vq = quartic_potential(v);
    est.U.resize(static_cast<size_t>(2 * N) + 1);
    for (int n = 1; n <= 2 * N + 1; ++n)
        est.U[static_cast<size_t>(n) - 1] = coefficient_side(swapped, rV, Vq, n).value();
    // the consecutive differences alternate between +gap and -gap; which
    // phase lands on the documented labeling (abar = larger limit) depends
    // on the parity the equilibrium sequence realizes, so both are taken and
    // the aligned one reported
    double d_even = est.U[static_cast<size_t>(2 * N) - 1] - est.U[static_cast<size_t>(2 * N) - 2];
    double d_odd = est.U[static_cast<size_t>(2 * N)] - est.U[static_cast<size_t>(2 * N) - 1];
    est.finite_n =
        std::abs(d_even - est.analytic) <= std::abs(d_odd - est.analytic) ? d_even : d_odd;
    return est;
}

MeasureModel smooth_spectral_measure(const MeasureModel& atomic, const SupportSet& I,
                                     double edge_tol) {
    std::vector<Atom> atoms = atomic.atoms;
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.position < b.position; });

    MeasureModel out;
    double ac_mass = 0.0;
    std::vector<Atom> far;
    // exclusive ownership: nearest interval, or outlier when beyond edge_tol
    std::vector<std::vector<Atom>> buckets(I.intervals.size());
    for (const Atom& a : atoms) {
        if (I.distance(a.position) > edge_tol) {
            far.push_back(a);
            continue;
        }
        size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t m = 0; m < I.intervals.size(); ++m) {
            const auto& [l, r] = I.intervals[m];
            double d = std::abs(a.position - std::clamp(a.position, l, r));
            if (d < best_d) {
                best_d = d;
                best = m;
            }
        }
        buckets[best].push_back(a);
    }
    for (size_t m = 0; m < I.intervals.size(); ++m) {
        std::vector<Atom>& in = buckets[m];
        if (in.size() < 3) {
            for (const Atom& a : in) far.push_back(a);
            continue;
        }
        size_t K = in.size();
        std::vector<double> xs, ds;
        xs.reserve(K + 2);
        ds.reserve(K + 2);
        auto cell_lo = [&](size_t k) {
            return k == 0 ? in[0].position - 0.5 * (in[1].position - in[0].position)
                          : 0.5 * (in[k - 1].position + in[k].position);
        };
        auto cell_hi = [&](size_t k) {
            return k + 1 == K
                       ? in[K - 1].position + 0.5 * (in[K - 1].position - in[K - 2].position)
                       : 0.5 * (in[k].position + in[k + 1].position);
        };
        // a truncated spectrum never quite reaches the band edge; pin the
        // density to zero at the reference edge so the grid covers all of I
        const auto& [il, ir] = I.intervals[m];
        if (in.front().position > il) {
            xs.push_back(il);
            ds.push_back(0.0);
        }
        for (size_t k = 0; k < K; ++k) {
            xs.push_back(in[k].position);
            double w = cell_hi(k) - cell_lo(k);
            ds.push_back(w > 0.0 ? in[k].weight / w : 0.0);
            ac_mass += in[k].weight;
        }
        if (in.back().position < ir) {
            xs.push_back(ir);
            ds.push_back(0.0);
        }
        out.ac.support.intervals.emplace_back(xs.front(), xs.back());
        out.ac.nodes.push_back(std::move(xs));
        out.ac.densities.push_back(std::move(ds));
    }

    if (out.ac.nodes.empty()) throw std::invalid_argument("smooth_spectral_measure: too few atoms on I");
    double far_mass = 0.0;
    for (const Atom& a : far) far_mass += a.weight;
    out.ac.set_mass_from_trapezoid();
    if (ac_mass > 0.0) out.ac.normalize(std::max(1e-12, 1.0 - far_mass));
    out.atoms = far;
    out.tidy_atoms();
    out.normalized = true;
    return out;
}

} // namespace sumrule
