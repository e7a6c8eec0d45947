#ifndef SUMRULE_EQUILIBRIUM_HPP
#define SUMRULE_EQUILIBRIUM_HPP

#include <string>

#include "sumrule/extreal.hpp"
#include "sumrule/measure.hpp"
#include "sumrule/polynomial.hpp"

namespace sumrule {

/// Thrown when an iterative solver fails to meet its convergence criterion.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PotentialReport {
    bool valid = false;
    int degree = 0;   // 2d when valid
    int half_degree = 0; // d, which bounds the number of support cuts
    std::string message;
};

/// Admissibility check: even degree >= 2 and positive leading coefficient,
/// which gives superlogarithmic confinement.
PotentialReport validate_potential(const Polynomial& V);

struct OneCutResult {
    bool one_cut = false;  // false when the density factor dips negative
    double center = 0.0;   // support = [center - 2*half, center + 2*half]
    double half = 0.0;
    Polynomial A;          // density factor on the reference interval [-2, 2]
    double min_A = 0.0;    // min of A over [-2, 2]
    SupportSet support;
    GridMeasure measure;   // density sampled on the physical axis (mass 1)
    int newton_iterations = 0;
};

/// Analytic one-cut path: finds the support [b-, b+] from the two endpoint
/// conditions for the potential pulled back to [-2, 2] (damped Newton on
/// center/half-width), then builds the density A(s) sqrt(4 - s^2) / (2 pi).
/// `one_cut` is false if A drops below -tol anywhere on [-2, 2]; the caller
/// should fall back to solve_grid.
/// Throws NumericalFailure if Newton does not converge.
OneCutResult solve_one_cut(const Polynomial& V, int grid_size = 4001, double neg_tol = 1e-9);

struct GridSolveOptions {
    int max_iterations = 4000;
    double tolerance = 1e-5;         // projected-gradient residual at unit step;
                                     // the float noise floor sits near 3e-6
    double support_threshold = 1e-3; // fraction of max density defining support
    int min_run_cells = 3;           // discard shorter support runs
};

struct GridSolveResult {
    GridMeasure measure;            // extracted support, density = weight/cell
    std::vector<double> grid;       // full domain grid
    std::vector<double> weights;    // optimal simplex weights on the grid
    double energy = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> energy_trace; // per accepted iteration, non-increasing
};

/// Discretized energy minimization over the probability simplex on a uniform
/// grid of the domain: projected gradient descent with Armijo backtracking
/// (Barzilai-Borwein initial step). The self-interaction term uses the exact
/// cell-average of log|x - y|, i.e. log h - 3/2.
/// Throws NumericalFailure when the residual criterion is not met and
/// std::invalid_argument for a degenerate domain or gridsize < 200.
GridSolveResult solve_grid(const Polynomial& V, double lo, double hi, int grid_size,
                           const GridSolveOptions& opts = {});

/// Discrete energy of a weight vector on the same grid/regularization as
/// solve_grid (for cross-checks against closed-form minimizers).
double grid_energy(const Polynomial& V, const std::vector<double>& grid,
                   const std::vector<double>& weights);

struct QuarticEquilibrium {
    SupportSet support;       // [-a+, -a-] u [a-, a+]
    double alpha_minus = 0.0; // sqrt(v - 2)
    double alpha_plus = 0.0;  // sqrt(v + 2)
    double ell1 = 0.0;        // smaller root of l^2 - v l + 1 = 0
    double ell2 = 0.0;        // larger root; squared limits of the off-diagonals
    GridMeasure measure;      // closed-form two-cut density, mass 1
};

/// Two-cut equilibrium data for V(x) = x^4/4 - v x^2/2, v > 2.
/// Rejects v <= 2 (one-cut regime) with std::invalid_argument.
QuarticEquilibrium quartic_equilibrium(double v, int nodes_per_interval = 8001);

/// Confinement-based radius comfortably containing the equilibrium support.
double confinement_radius(const Polynomial& V);

/// One-cut solver with grid fallback: the everyday way to get mu_V.
GridMeasure equilibrium_measure(const Polynomial& V, int grid_size = 800);

/// The quartic potential x^4/4 - v x^2/2 itself.
Polynomial quartic_potential(double v);

/// Int log|x - t| dmu(t). Piecewise-linear density with the log kernel
/// integrated in closed form per cell, so the singularity at x inside the
/// support needs no special casing. Atoms are not part of GridMeasure;
/// a zero measure gives 0.
double log_potential(const GridMeasure& mu, double x);

/// Effective potential J_V and the outlier rate F_V = J_V - inf J_V,
/// with the infimum located once by grid scan plus golden-section refinement.
class EffectivePotential {
public:
    EffectivePotential(Polynomial V, GridMeasure mu_V);

    /// J_V(x) = V(x) - 2 Int log|x - xi| dmu_V(xi)
    double operator()(double x) const;
    double infimum() const { return infimum_; }

    /// F_V: J_V - inf J_V off the interior of the support, +inf inside.
    ExtReal rate(double x) const;

    const SupportSet& support() const { return mu_.support; }
    const GridMeasure& measure() const { return mu_; }
    const Polynomial& potential() const { return V_; }

private:
    Polynomial V_;
    GridMeasure mu_;
    double infimum_ = 0.0;
};

double effective_potential(const Polynomial& V, const GridMeasure& mu_V, double x);
ExtReal rate_F(const Polynomial& V, const GridMeasure& mu_V, double x);

struct A2Report {
    bool pass = false;
    double complement_min = 0.0;   // min of J_V off the support interior
    double complement_argmin = 0.0;
    double boundary_value = 0.0;   // min of J_V over the support boundary
    double interior_min = 0.0;     // min of J_V over the support itself
    std::string message;
};

/// Scans J_V over the gaps and the exterior: passes iff the minimum there is
/// attained only within grid resolution of the support boundary, and no point
/// of the support itself lies strictly below it (the latter catches a
/// mismatched (V, mu) pair).
A2Report check_A2(const Polynomial& V, const GridMeasure& mu_V, int scan_points = 4000,
                  double value_tol = 2e-2);

} // namespace sumrule

#endif
