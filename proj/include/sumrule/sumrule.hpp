#ifndef SUMRULE_SUMRULE_HPP
#define SUMRULE_SUMRULE_HPP

#include <string>

#include "sumrule/equilibrium.hpp"
#include "sumrule/extreal.hpp"
#include "sumrule/jacobi.hpp"
#include "sumrule/measure.hpp"
#include "sumrule/polynomial.hpp"

namespace sumrule {

/// Coefficient-side partial sum
///   U_N = tr V(T_N) - tr V(T_N^V) - 2 sum_{k<N} log(a_k / a_k^V).
/// +inf when any a_k <= 0 for k < N (the measure behind r has finite
/// support). The reference sequence must have strictly positive a_k.
ExtReal coefficient_side(const JacobiSequence& r, const JacobiSequence& rV, const Polynomial& V,
                         int N);

/// Reversed Kullback-Leibler divergence K(mu_V | mu) = -Int_I log f dmu_V,
/// where f is the density of mu's absolutely continuous part relative to
/// mu_V. Atoms of mu never contribute. +inf when f vanishes (below the
/// 1e-300 clip floor) on a set of positive mu_V mass, in particular when
/// mu's grid does not cover the support of mu_V.
ExtReal kl_reversed(const GridMeasure& mu_V, const MeasureModel& mu);

/// Out-of-support atoms arranged into 2M rows keyed to the nearest stretch
/// of the support boundary, each row ordered by decreasing distance to I and
/// padded with the adjacent boundary point (weight 0) up to depth J.
struct OutlierEncoding {
    int rows = 0;  // 2M
    int depth = 0; // J
    std::vector<std::vector<double>> zeta;  // rows x depth positions
    std::vector<std::vector<double>> gamma; // matching weights, 0 on padding
    bool truncated = false;                 // some row exceeded the depth

    void validate(const SupportSet& I) const; // row membership + ordering + zero rule
};

OutlierEncoding encode_outliers(const MeasureModel& mu, const SupportSet& I, int depth);

/// Reconstruction map: mu_I plus an atom at every entry with positive
/// weight; duplicate positions merge by weight summation.
MeasureModel decode_theta(const GridMeasure& mu_I, const OutlierEncoding& enc);

/// Spectral side K(mu_V | mu) + sum of F_V over the outliers of mu; +inf
/// when mu carries absolutely continuous mass outside I.
ExtReal spectral_side(const MeasureModel& mu, const Polynomial& V, const GridMeasure& mu_V,
                      const SupportSet& I);
ExtReal spectral_side(const MeasureModel& mu, const EffectivePotential& JV);

/// sum over outliers of d(lambda, I)^{3/2}.
double lieb_thirring_sum(const MeasureModel& mu, const SupportSet& I);

enum class Verdict { converged_equal, corridor_consistent, diverged, spectral_infinite };
std::string to_string(Verdict v);

struct SumRuleReport {
    std::vector<double> U;              // U_N, N = 1..N_max (finite entries)
    std::vector<bool> U_finite;         // false where the sentinel fired
    std::vector<double> boundary_terms; // seam term M per N
    std::vector<double> m_plus_terms;   // M_+ per N
    std::vector<double> corridor;       // C(K,V) * M_+ per N
    double C_KV = 0.0;
    int cut_count = 0;
    ExtReal spectral_kl;
    ExtReal outlier_sum;
    ExtReal spectral_total;
    Verdict verdict = Verdict::diverged;
    double tol_eq = 0.0;

    std::string to_csv() const; // columns N, U_N, M, M_plus, corridor
};

struct VerifyOptions {
    double tol_eq = 5e-3;              // equality tolerance at desk scale
    double divergence_threshold = 20.0; // U_N beyond this counts as divergent
    double tail_fraction = 0.25;        // window of N used for lim inf/sup
    int grid_size = 800;                // fallback multi-cut equilibrium grid
    int jobs = 1;                       // fan the independent per-N sums out over threads
    const GridMeasure* equilibrium = nullptr; // caller-supplied mu_V, skips the solve
};

/// Runs the whole pipeline for a measure with compact support in [-K, K]:
/// equilibrium data for V, coefficients of mu and mu_V through N_max + d,
/// U_N with seam terms and the xi corridor, the spectral side, and a verdict.
SumRuleReport verify_sum_rule(const MeasureModel& mu, const Polynomial& V, int N_max, double K,
                              const VerifyOptions& opts = {});

struct GemThresholds {
    double rate_bound = 10.0; // finiteness proxy for both sides
    int N_max = 240;
};

struct GemReport {
    bool in_S1 = false;             // condition 1: support shape
    bool outlier_sum_finite = false; // condition 2
    bool szego_finite = false;       // condition 3 (quasi-Szego integral)
    bool coefficient_bounded = false;
    bool consistent = false; // coefficient flag == (1 and 2 and 3)
    double outlier_sum = 0.0;
    double szego_integral = 0.0; // Int_I log f dmu_V (finite part)
    double sup_U = 0.0;
};

GemReport gem_check(const MeasureModel& mu, const Polynomial& V, const GemThresholds& thr = {});

/// Alternation amplitude of the quartic two-cut pseudo-rate:
///   (1/2)(abar^4 - a^4) - v(abar^2 - a^2) - 2 log(abar / a),
/// with a^2, abar^2 the two roots of l^2 - v l + 1 = 0 and abar the larger.
double pseudorate_gap(double v);

struct QuarticGapEstimate {
    double analytic = 0.0; // pseudorate_gap(v)
    double finite_n = 0.0; // consecutive U difference on the swapped
                           // sequences, phase aligned with the labeling
                           // behind pseudorate_gap
    int N = 0;
    std::vector<double> U; // the oscillating partial sums, n = 1..2N+1
};

/// Finite-N check of the alternating behavior on the even/odd swapped
/// quartic coefficients. The two consecutive-difference phases converge to
/// +-pseudorate_gap; the equilibrium sequence fixes which parity is which
/// (the computed coefficients carry the larger root on odd indices), and the
/// phase matching the documented labeling is the one reported.
QuarticGapEstimate quartic_gap_estimate(double v, int N = 300);

/// Even/odd swap of the off-diagonals: pairs (a_1, a_2), (a_3, a_4), ...
/// exchange places.
JacobiSequence swap_offdiagonal_pairs(const JacobiSequence& r);

/// Turns a purely atomic spectral measure (e.g. a truncated eigenproblem)
/// into a density on I by the local-spacing estimate rho(x_k) = w_k / gap_k.
/// Atoms farther than edge_tol outside I stay atoms (outliers); the default
/// keeps every strictly-outside eigenvalue an outlier, which costs next to
/// nothing near the support edge where the rate vanishes.
MeasureModel smooth_spectral_measure(const MeasureModel& atomic, const SupportSet& I,
                                     double edge_tol = 0.0);

} // namespace sumrule

#endif
