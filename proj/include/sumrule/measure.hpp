#ifndef SUMRULE_MEASURE_HPP
#define SUMRULE_MEASURE_HPP

#include <cmath>
#include <utility>
#include <vector>

namespace sumrule {

/// Union of ordered disjoint closed intervals I = I_1 u ... u I_M with
/// nonempty interiors.
struct SupportSet {
    std::vector<std::pair<double, double>> intervals; // (l_m, r_m), ascending

    int cut_count() const { return static_cast<int>(intervals.size()); }
    double left() const { return intervals.front().first; }
    double right() const { return intervals.back().second; }

    /// Midpoint between I_{m+1} and I_{m+2} (0-based gap index m < M-1).
    double midpoint(int m) const;

    bool contains(double x) const;
    bool contains_interior(double x) const;
    /// Distance d(x, I); zero on I.
    double distance(double x) const;
    /// Nearest boundary point of I (ties resolved to the left).
    double nearest_boundary(double x) const;

    /// Checks l_m < r_m and r_m < l_{m+1}; throws std::invalid_argument.
    void validate() const;
};

/// Finite nonnegative measure with a piecewise density: per-interval node
/// grids carrying pointwise Lebesgue densities. `mass` is the trapezoid mass
/// of the stored samples.
struct GridMeasure {
    SupportSet support;                         // may be empty for the zero measure
    std::vector<std::vector<double>> nodes;     // per interval, ascending
    std::vector<std::vector<double>> densities; // per node, >= 0
    double mass = 0.0;

    bool empty() const { return nodes.empty(); }
    double trapezoid_mass() const;
    void set_mass_from_trapezoid() { mass = trapezoid_mass(); }
    /// Scales densities so the trapezoid mass is `target`.
    void normalize(double target = 1.0);

    /// Piecewise-linear density; 0 outside the support (values within one
    /// cell of an interval end are clamped to the edge sample).
    double density_at(double x) const;
    /// Cumulative distribution by node-wise trapezoid accumulation.
    double cdf(double x) const;

    void validate() const;

    /// Sample a density onto cosine-clustered nodes over the given intervals.
    template <typename F>
    static GridMeasure sampled(const SupportSet& support, int nodes_per_interval, F&& density);
};

struct Atom {
    double position = 0.0;
    double weight = 0.0;
};

/// Absolutely continuous part plus finitely many atoms. Atoms lying outside
/// a reference support I are "outliers"; atoms on or inside I belong to the
/// singular part of the measure restricted to I.
struct MeasureModel {
    GridMeasure ac;
    std::vector<Atom> atoms; // pairwise distinct positions, weights > 0
    bool normalized = false;

    double total_mass() const;
    /// Atoms with position strictly outside I.
    std::vector<Atom> outliers(const SupportSet& I) const;
    /// Merges duplicate positions (weights add), drops zero weights, sorts.
    void tidy_atoms();
    void validate() const;

    static MeasureModel from_ac(GridMeasure g);
    static MeasureModel atomic(std::vector<Atom> atoms);
};

// --- inline template ------------------------------------------------------

template <typename F>
GridMeasure GridMeasure::sampled(const SupportSet& support, int nodes_per_interval, F&& density) {
    GridMeasure g;
    g.support = support;
    for (const auto& [l, r] : support.intervals) {
        std::vector<double> xs(static_cast<size_t>(nodes_per_interval));
        std::vector<double> ds(xs.size());
        const double mid = 0.5 * (l + r), half = 0.5 * (r - l);
        for (int i = 0; i < nodes_per_interval; ++i) {
            // clustered toward the edges, where equilibrium densities vanish
            // like a square root
            double theta = 3.14159265358979323846 * i / (nodes_per_interval - 1);
            double x = mid - half * std::cos(theta);
            if (i == 0) x = l;
            if (i == nodes_per_interval - 1) x = r;
            xs[static_cast<size_t>(i)] = x;
            double d = density(x);
            ds[static_cast<size_t>(i)] = d > 0.0 ? d : 0.0;
        }
        g.nodes.push_back(std::move(xs));
        g.densities.push_back(std::move(ds));
    }
    g.set_mass_from_trapezoid();
    return g;
}

} // namespace sumrule

#endif
