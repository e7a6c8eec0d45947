#include "sumrule/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sumrule {

double SupportSet::midpoint(int m) const {
    if (m < 0 || m + 1 >= cut_count()) throw std::out_of_range("SupportSet::midpoint");
    return 0.5 * (intervals[static_cast<size_t>(m)].second + intervals[static_cast<size_t>(m) + 1].first);
}

bool SupportSet::contains(double x) const {
    for (const auto& [l, r] : intervals)
        if (x >= l && x <= r) return true;
    return false;
}

bool SupportSet::contains_interior(double x) const {
    for (const auto& [l, r] : intervals)
        if (x > l && x < r) return true;
    return false;
}

double SupportSet::distance(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [l, r] : intervals) {
        if (x >= l && x <= r) return 0.0;
        best = std::min(best, std::min(std::abs(x - l), std::abs(x - r)));
    }
    return best;
}

double SupportSet::nearest_boundary(double x) const {
    double best = std::numeric_limits<double>::infinity();
    double point = 0.0;
    for (const auto& [l, r] : intervals) {
        for (double e : {l, r}) {
            double d = std::abs(x - e);
            if (d < best) {
                best = d;
                point = e;
            }
        }
    }
    return point;
}

void SupportSet::validate() const {
    if (intervals.empty()) throw std::invalid_argument("SupportSet: empty");
    for (size_t m = 0; m < intervals.size(); ++m) {
        if (!(intervals[m].first < intervals[m].second))
            throw std::invalid_argument("SupportSet: interval with empty interior");
        if (m + 1 < intervals.size() && !(intervals[m].second < intervals[m + 1].first))
            throw std::invalid_argument("SupportSet: intervals overlap or touch");
    }
}

double GridMeasure::trapezoid_mass() const {
    double total = 0.0;
    for (size_t m = 0; m < nodes.size(); ++m) {
        const auto& xs = nodes[m];
        const auto& ds = densities[m];
        for (size_t i = 0; i + 1 < xs.size(); ++i)
            total += 0.5 * (ds[i] + ds[i + 1]) * (xs[i + 1] - xs[i]);
    }
    return total;
}

void GridMeasure::normalize(double target) {
    double m = trapezoid_mass();
    if (m <= 0.0) throw std::invalid_argument("GridMeasure::normalize: zero mass");
    double s = target / m;
    for (auto& ds : densities)
        for (double& d : ds) d *= s;
    mass = target;
}

double GridMeasure::density_at(double x) const {
    for (size_t m = 0; m < nodes.size(); ++m) {
        const auto& xs = nodes[m];
        if (xs.size() < 2) continue;
        double cell = xs[1] - xs[0];
        if (x < xs.front() - cell || x > xs.back() + (xs.back() - xs[xs.size() - 2])) continue;
        const auto& ds = densities[m];
        if (x <= xs.front()) return ds.front();
        if (x >= xs.back()) return ds.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        size_t i = static_cast<size_t>(it - xs.begin()) - 1;
        double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return (1.0 - t) * ds[i] + t * ds[i + 1];
    }
    return 0.0;
}

double GridMeasure::cdf(double x) const {
    double acc = 0.0;
    for (size_t m = 0; m < nodes.size(); ++m) {
        const auto& xs = nodes[m];
        const auto& ds = densities[m];
        if (x <= xs.front()) break;
        for (size_t i = 0; i + 1 < xs.size(); ++i) {
            if (x >= xs[i + 1]) {
                acc += 0.5 * (ds[i] + ds[i + 1]) * (xs[i + 1] - xs[i]);
            } else {
                double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                double dx_mid = (1.0 - t) * ds[i] + t * ds[i + 1];
                acc += 0.5 * (ds[i] + dx_mid) * (x - xs[i]);
                return acc;
            }
        }
    }
    return acc;
}

void GridMeasure::validate() const {
    if (nodes.size() != densities.size())
        throw std::invalid_argument("GridMeasure: nodes/densities shape mismatch");
    if (!empty()) {
        support.validate();
        if (nodes.size() != support.intervals.size())
            throw std::invalid_argument("GridMeasure: one grid per support interval required");
    }
    for (size_t m = 0; m < nodes.size(); ++m) {
        if (nodes[m].size() != densities[m].size() || nodes[m].size() < 2)
            throw std::invalid_argument("GridMeasure: bad grid");
        if (!std::is_sorted(nodes[m].begin(), nodes[m].end()))
            throw std::invalid_argument("GridMeasure: nodes not ascending");
        for (double d : densities[m])
            if (d < 0.0 || !std::isfinite(d)) throw std::invalid_argument("GridMeasure: negative density");
    }
    if (std::abs(trapezoid_mass() - mass) > 1e-9 * std::max(1.0, std::abs(mass)))
        throw std::invalid_argument("GridMeasure: mass field inconsistent with trapezoid mass");
}

double MeasureModel::total_mass() const {
    double t = ac.mass;
    for (const Atom& a : atoms) t += a.weight;
    return t;
}

std::vector<Atom> MeasureModel::outliers(const SupportSet& I) const {
    std::vector<Atom> out;
    for (const Atom& a : atoms)
        if (!I.contains(a.position)) out.push_back(a);
    return out;
}

void MeasureModel::tidy_atoms() {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.position < b.position; });
    std::vector<Atom> merged;
    for (const Atom& a : atoms) {
        if (a.weight == 0.0) continue;
        if (!merged.empty() && merged.back().position == a.position)
            merged.back().weight += a.weight;
        else
            merged.push_back(a);
    }
    atoms = std::move(merged);
}

void MeasureModel::validate() const {
    if (!ac.empty()) ac.validate();
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (!(atoms[i].weight > 0.0)) throw std::invalid_argument("MeasureModel: atom with nonpositive weight");
        if (i > 0 && atoms[i - 1].position == atoms[i].position)
            throw std::invalid_argument("MeasureModel: duplicate atom positions");
    }
    if (normalized && std::abs(total_mass() - 1.0) > 1e-9)
        throw std::invalid_argument("MeasureModel: normalized flag but mass != 1");
}

MeasureModel MeasureModel::from_ac(GridMeasure g) {
    MeasureModel m;
    m.ac = std::move(g);
    m.normalized = std::abs(m.ac.mass - 1.0) <= 1e-9;
    return m;
}

MeasureModel MeasureModel::atomic(std::vector<Atom> atoms) {
    MeasureModel m;
    m.atoms = std::move(atoms);
    m.tidy_atoms();
    m.normalized = std::abs(m.total_mass() - 1.0) <= 1e-9;
    return m;
}

} // namespace sumrule
