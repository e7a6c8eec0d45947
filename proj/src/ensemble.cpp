#include "sumrule/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sumrule/equilibrium.hpp"
#include "sumrule/rng.hpp"

namespace sumrule {

SamplerKind sampler_from_string(const std::string& s) {
    if (s == "eigen-mcmc") return SamplerKind::eigen_mcmc;
    if (s == "jacobi-mcmc") return SamplerKind::jacobi_mcmc;
    if (s == "gaussian-exact") return SamplerKind::gaussian_exact;
    throw std::invalid_argument("unknown sampler: " + s);
}

std::string to_string(SamplerKind k) {
    switch (k) {
        case SamplerKind::eigen_mcmc: return "eigen-mcmc";
        case SamplerKind::jacobi_mcmc: return "jacobi-mcmc";
        case SamplerKind::gaussian_exact: return "gaussian-exact";
    }
    return "unknown";
}

void EnsembleConfig::validate() const {
    if (n < 2) throw std::invalid_argument("EnsembleConfig: n >= 2 required");
    if (!(beta > 0.0)) throw std::invalid_argument("EnsembleConfig: beta > 0 required");
    if (!(steps > burn_in) || burn_in < 0)
        throw std::invalid_argument("EnsembleConfig: need steps > burn_in >= 0");
    if (!(step_scale > 0.0)) throw std::invalid_argument("EnsembleConfig: step_scale > 0 required");
    if (!V.is_valid_potential()) throw std::invalid_argument("EnsembleConfig: invalid potential");
}

double metropolis_log_accept(double lp_x, double lp_y, double proposal_correction) {
    return std::min(0.0, lp_y - lp_x + proposal_correction);
}

namespace {

// starting box covering the equilibrium support comfortably
double init_radius(const Polynomial& V) {
    double vmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) vmin = std::min(vmin, V(-8.0 + 16.0 * i / 400.0));
    double R = 2.0;
    while (R < 64.0 && (V(R) - 2.0 * std::log(2.0 * R) < vmin + 8.0 ||
                        V(-R) - 2.0 * std::log(2.0 * R) < vmin + 8.0))
        R *= 1.5;
    return R;
}

struct Adaptation {
    double step;
    long accepted = 0;
    long proposed = 0;

    // stochastic-approximation nudge toward 30-40% acceptance, burn-in only
    void record(bool accept, bool adapting) {
        ++proposed;
        if (accept) ++accepted;
        if (adapting && proposed % 200 == 0) {
            double rate = static_cast<double>(accepted) / static_cast<double>(proposed);
            if (rate < 0.30)
                step *= 0.85;
            else if (rate > 0.40)
                step *= 1.15;
            accepted = 0;
            proposed = 0;
        }
    }
};

} // namespace

std::vector<std::vector<double>> sample_eigenvalues(const EnsembleConfig& cfg, ChainStats* stats) {
    cfg.validate();
    if (cfg.sampler != SamplerKind::eigen_mcmc)
        throw std::invalid_argument("sample_eigenvalues: sampler must be eigen-mcmc");
    Rng rng(cfg.seed);
    const int n = cfg.n;
    const double bp = cfg.beta_prime();

    std::vector<double> lam(static_cast<size_t>(n));
    double R0 = init_radius(cfg.V);
    for (int i = 0; i < n; ++i)
        lam[static_cast<size_t>(i)] = -R0 + 2.0 * R0 * (i + 0.5) / n;

    // single-site conditional: -n beta' V(x) + beta sum_j log|x - lam_j|
    auto site_logdensity = [&](int k, double x) {
        double acc = -static_cast<double>(n) * bp * cfg.V(x);
        for (int j = 0; j < n; ++j) {
            if (j == k) continue;
            double d = std::abs(x - lam[static_cast<size_t>(j)]);
            if (d == 0.0) return -std::numeric_limits<double>::infinity();
            acc += cfg.beta * std::log(d);
        }
        return acc;
    };

    Adaptation adapt{cfg.step_scale / std::sqrt(static_cast<double>(n))};
    long accepted_total = 0;
    const long thin = 10L * n;
    std::vector<std::vector<double>> out;
    for (long t = 0; t < cfg.steps; ++t) {
        int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        double old = lam[static_cast<size_t>(k)];
        double prop = old + adapt.step * rng.normal();
        double la = metropolis_log_accept(site_logdensity(k, old), site_logdensity(k, prop));
        bool acc = std::log(rng.uniform_pos()) < la;
        if (acc) {
            lam[static_cast<size_t>(k)] = prop;
            ++accepted_total;
        }
        adapt.record(acc, t < cfg.burn_in);
        if (t >= cfg.burn_in && (t - cfg.burn_in) % thin == 0) out.push_back(lam);
    }

    double rate = static_cast<double>(accepted_total) / static_cast<double>(cfg.steps);
    if (rate < 0.01) throw NumericalFailure("sample_eigenvalues: proposal collapse (acceptance < 1%)");
    if (stats) {
        stats->acceptance_rate = rate;
        stats->adapted_step = adapt.step;
        stats->retained = static_cast<long>(out.size());
    }
    return out;
}

std::vector<JacobiSequence> sample_jacobi(const EnsembleConfig& cfg, ChainStats* stats) {
    cfg.validate();
    if (cfg.sampler != SamplerKind::jacobi_mcmc)
        throw std::invalid_argument("sample_jacobi: sampler must be jacobi-mcmc");
    Rng rng(cfg.seed);
    const int n = cfg.n;
    const double bp = cfg.beta_prime();
    const int d = cfg.V.degree() / 2;

    JacobiSequence r = JacobiSequence::free_sequence(n);
    double trace = trace_poly(r, n, cfg.V);

    // log-density exponent (up to the normalizing constant):
    //   -n beta' tr V(T_n) + 2 n beta' sum_k (1 - k/n - 1/(n beta)) log a_k
    auto log_weight_a = [&](int k1based, double a) {
        double coef = 2.0 * n * bp *
                      (1.0 - static_cast<double>(k1based) / n - 1.0 / (n * cfg.beta));
        return coef * std::log(a);
    };

    auto windowed = [&](int k1based) {
        int lo = std::max(1, k1based - d), hi = std::min(n, k1based + d);
        return window_trace(r.b, r.a, lo, hi, cfg.V);
    };

    Adaptation adapt{cfg.step_scale / std::sqrt(static_cast<double>(n))};
    long accepted_total = 0;
    const long thin = 10L * n;
    double max_check = 0.0;
    std::vector<JacobiSequence> out;

    for (long t = 0; t < cfg.steps; ++t) {
        // one coordinate of (b_1..b_n, a_1..a_{n-1}) per step
        int idx = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * n - 1)));
        bool is_b = idx < n;
        bool acc = false;
        if (is_b) {
            int k = idx + 1;
            double old = r.bk(k);
            double before = windowed(k);
            double prop = old + adapt.step * rng.normal();
            r.b[static_cast<size_t>(k) - 1] = prop;
            double after = windowed(k);
            double la = metropolis_log_accept(0.0, -n * bp * (after - before));
            acc = std::log(rng.uniform_pos()) < la;
            if (acc)
                trace += after - before;
            else
                r.b[static_cast<size_t>(k) - 1] = old;
        } else {
            int k = idx - n + 1; // a_k
            double old = r.ak(k);
            double before = windowed(k);
            double prop = old * std::exp(adapt.step * rng.normal());
            r.a[static_cast<size_t>(k) - 1] = prop;
            double after = windowed(k);
            // log-scale proposal: Lebesgue target needs the log(prop/old) Jacobian
            double la = metropolis_log_accept(
                0.0, -n * bp * (after - before) + log_weight_a(k, prop) - log_weight_a(k, old) +
                         std::log(prop / old));
            acc = std::log(rng.uniform_pos()) < la;
            if (acc)
                trace += after - before;
            else
                r.a[static_cast<size_t>(k) - 1] = old;
        }
        if (acc) ++accepted_total;
        adapt.record(acc, t < cfg.burn_in);

        if (cfg.self_check && t % 1000 == 999) {
            double full = trace_poly(r, n, cfg.V);
            max_check = std::max(max_check, std::abs(full - trace));
            trace = full;
        }
        if (t >= cfg.burn_in && (t - cfg.burn_in) % thin == 0) out.push_back(r);
    }

    double rate = static_cast<double>(accepted_total) / static_cast<double>(cfg.steps);
    if (rate < 0.01) throw NumericalFailure("sample_jacobi: proposal collapse (acceptance < 1%)");
    if (stats) {
        stats->acceptance_rate = rate;
        stats->adapted_step = adapt.step;
        stats->retained = static_cast<long>(out.size());
        stats->max_self_check_error = max_check;
    }
    return out;
}

std::vector<JacobiSequence> sample_gaussian_exact(const EnsembleConfig& cfg) {
    cfg.validate();
    if (cfg.sampler != SamplerKind::gaussian_exact)
        throw std::invalid_argument("sample_gaussian_exact: sampler must be gaussian-exact");
    Rng rng(cfg.seed);
    const int n = cfg.n;
    const double bp = cfg.beta_prime();
    const double sigma_b = 1.0 / std::sqrt(n * bp);
    long count = (cfg.steps - cfg.burn_in) / (10L * n) + 1;

    std::vector<JacobiSequence> out;
    out.reserve(static_cast<size_t>(count));
    for (long s = 0; s < count; ++s) {
        JacobiSequence r;
        r.b.resize(static_cast<size_t>(n));
        r.a.resize(static_cast<size_t>(n) - 1);
        for (int k = 0; k < n; ++k) r.b[static_cast<size_t>(k)] = sigma_b * rng.normal();
        for (int k = 1; k < n; ++k) {
            // chi_m = sqrt(2 Gamma(m/2)), m = beta (n - k)
            double m = cfg.beta * (n - k);
            double chi = std::sqrt(2.0 * rng.gamma(m / 2.0, 1.0));
            r.a[static_cast<size_t>(k) - 1] = chi / std::sqrt(2.0 * n * bp);
        }
        out.push_back(std::move(r));
    }
    return out;
}

WeightSample sample_weights(int n, double beta, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_weights: n >= 1 required");
    if (!(beta > 0.0)) throw std::invalid_argument("sample_weights: beta > 0 required");
    double bp = beta / 2.0;
    WeightSample s;
    s.raw.resize(static_cast<size_t>(n));
    s.normalized.resize(static_cast<size_t>(n));
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        s.raw[static_cast<size_t>(i)] = rng.gamma(bp, 1.0 / (bp * n));
        total += s.raw[static_cast<size_t>(i)];
    }
    for (int i = 0; i < n; ++i) s.normalized[static_cast<size_t>(i)] = s.raw[static_cast<size_t>(i)] / total;
    return s;
}

WeightSample sample_weights(int n, double beta, std::uint64_t seed) {
    Rng rng(seed);
    return sample_weights(n, beta, rng);
}

MeasureModel assemble_spectral(const std::vector<double>& lambda, const std::vector<double>& w) {
    if (lambda.size() != w.size()) throw std::invalid_argument("assemble_spectral: length mismatch");
    std::vector<Atom> atoms;
    atoms.reserve(lambda.size());
    for (size_t i = 0; i < lambda.size(); ++i) {
        if (w[i] < 0.0) throw std::invalid_argument("assemble_spectral: negative weight");
        atoms.push_back({lambda[i], w[i]});
    }
    return MeasureModel::atomic(std::move(atoms));
}

DiagnosticsReport empirical_diagnostics(const std::vector<MeasureModel>& samples,
                                        const GridMeasure& mu_V) {
    if (samples.size() < 10)
        throw std::invalid_argument("empirical_diagnostics: need at least 10 samples");
    DiagnosticsReport rep;
    rep.sample_count = static_cast<int>(samples.size());
    const SupportSet& I = mu_V.support;
    rep.gap_applicable = I.cut_count() > 1;

    std::vector<double> pooled;
    long in_gap = 0, total = 0;
    for (const MeasureModel& s : samples) {
        double rightmost = -std::numeric_limits<double>::infinity();
        for (const Atom& a : s.atoms) {
            pooled.push_back(a.position);
            rightmost = std::max(rightmost, a.position);
            ++total;
            if (rep.gap_applicable) {
                for (int m = 0; m + 1 < I.cut_count(); ++m) {
                    double gl = I.intervals[static_cast<size_t>(m)].second;
                    double gr = I.intervals[static_cast<size_t>(m) + 1].first;
                    if (a.position > gl + 0.1 && a.position < gr - 0.1) ++in_gap;
                }
            }
        }
        rep.rightmost.push_back(rightmost);
    }
    std::sort(pooled.begin(), pooled.end());
    double ks = 0.0;
    for (size_t i = 0; i < pooled.size(); ++i) {
        double f = mu_V.cdf(pooled[i]) / mu_V.mass;
        double lo = static_cast<double>(i) / pooled.size();
        double hi = static_cast<double>(i + 1) / pooled.size();
        ks = std::max({ks, std::abs(f - lo), std::abs(f - hi)});
    }
    rep.kolmogorov_distance = ks;
    rep.gap_fraction = total > 0 ? static_cast<double>(in_gap) / static_cast<double>(total) : 0.0;

    double mean = 0.0;
    long near = 0;
    for (double x : rep.rightmost) {
        mean += x;
        if (std::abs(x - I.right()) <= 0.15) ++near;
    }
    rep.rightmost_mean = mean / static_cast<double>(rep.rightmost.size());
    rep.rightmost_near_edge_fraction =
        static_cast<double>(near) / static_cast<double>(rep.rightmost.size());
    return rep;
}

} // namespace sumrule
