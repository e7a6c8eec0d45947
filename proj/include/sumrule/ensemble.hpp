#ifndef SUMRULE_ENSEMBLE_HPP
#define SUMRULE_ENSEMBLE_HPP

#include <cstdint>
#include <string>

#include "sumrule/jacobi.hpp"
#include "sumrule/measure.hpp"
#include "sumrule/polynomial.hpp"

namespace sumrule {

enum class SamplerKind { eigen_mcmc, jacobi_mcmc, gaussian_exact };

SamplerKind sampler_from_string(const std::string& s);
std::string to_string(SamplerKind k);

struct EnsembleConfig {
    int n = 2;                 // matrix size
    double beta = 2.0;         // = 2 beta'
    Polynomial V;
    SamplerKind sampler = SamplerKind::eigen_mcmc;
    long steps = 100000;       // single-site proposals
    long burn_in = 20000;
    double step_scale = 1.0;   // proposal scale before the 1/sqrt(n) factor
    std::uint64_t seed = 1;
    bool self_check = false;   // cross-check incremental traces in jacobi-mcmc

    void validate() const;
    double beta_prime() const { return beta / 2.0; }
};

struct ChainStats {
    double acceptance_rate = 0.0;
    double adapted_step = 0.0;
    long retained = 0;
    double max_self_check_error = 0.0; // jacobi-mcmc only
};

/// Metropolis random walk targeting the eigenvalue log-gas
///   exp( -n beta' sum V(lambda_k) ) prod_{i<j} |lambda_i - lambda_j|^beta.
/// Single-site Gaussian proposals of scale step_scale/sqrt(n), step size
/// adapted toward 30-40% acceptance during burn-in only, thinning 10 n.
/// Deterministic given the seed. Throws NumericalFailure on proposal
/// collapse (acceptance under 1% after adaptation).
std::vector<std::vector<double>> sample_eigenvalues(const EnsembleConfig& cfg,
                                                    ChainStats* stats = nullptr);

/// Metropolis chain on Jacobi coefficients (b_1..b_n, a_1..a_{n-1}) with the
/// coefficient density exponent
///   -n beta' [ tr V(T_n) - 2 sum_k (1 - k/n - 1/(n beta)) log a_k ].
/// a-moves are proposed in log scale (positivity preserved, Jacobian folded
/// into the acceptance ratio); tr V(T_n) is updated incrementally through
/// the 2d-window around the touched entry.
std::vector<JacobiSequence> sample_jacobi(const EnsembleConfig& cfg, ChainStats* stats = nullptr);

/// Exact Gaussian-potential coefficient model (V = x^2/2):
///   b_k ~ N(0, 1/(n beta')),  a_k ~ chi_{beta (n-k)} / sqrt(2 n beta'),
/// scaled so the spectra concentrate on [-2, 2] with a_k -> 1.
std::vector<JacobiSequence> sample_gaussian_exact(const EnsembleConfig& cfg);

struct WeightSample {
    std::vector<double> normalized; // Dirichlet_n(beta') point on the simplex
    std::vector<double> raw;        // the Gamma(beta', 1/(beta' n)) variables
};

/// Weight decoupling: independent Gamma(beta', (beta' n)^{-1}) draws with
/// mean 1/n, returned raw and normalized.
WeightSample sample_weights(int n, double beta, std::uint64_t seed);
WeightSample sample_weights(int n, double beta, class Rng& rng);

/// Atomic spectral measure sum w_k delta_{lambda_k}; duplicate positions
/// merge by weight summation.
MeasureModel assemble_spectral(const std::vector<double>& lambda, const std::vector<double>& w);

/// log of the Metropolis acceptance probability for a move with target
/// log-densities lp_x -> lp_y and proposal asymmetry correction
/// log q(y->x) - log q(x->y).
double metropolis_log_accept(double lp_x, double lp_y, double proposal_correction = 0.0);

struct DiagnosticsReport {
    double kolmogorov_distance = 0.0; // pooled eigenvalue CDF vs mu_V CDF
    double gap_fraction = 0.0;        // eigenvalues deep inside spectral gaps
    bool gap_applicable = false;      // false for one-cut mu_V
    std::vector<double> rightmost;    // rightmost support point per sample
    double rightmost_mean = 0.0;
    double rightmost_near_edge_fraction = 0.0; // within 0.15 of r_M
    int sample_count = 0;
};

/// Concentration diagnostics of sampled spectral measures against mu_V:
/// Kolmogorov distance of the pooled unweighted eigenvalue CDF, rightmost
/// support point histogram, and the fraction of eigenvalues lying in gaps
/// more than 0.1 away from the gap edges.
DiagnosticsReport empirical_diagnostics(const std::vector<MeasureModel>& samples,
                                        const GridMeasure& mu_V);

} // namespace sumrule

#endif
