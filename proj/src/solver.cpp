#include "exmax/solver.hpp"

#include <algorithm>
#include <cmath>

namespace exmax {

namespace {

double clamp_weight(double w) { return (w < 0.0 && w > -1e-12) ? 0.0 : w; }

// Largest index m with grid[m] <= ratio.
std::size_t pivot_index_for(const std::vector<double>& grid, double ratio) {
    auto it = std::upper_bound(grid.begin(), grid.end(), ratio);
    if (it == grid.begin()) return 0;
    return static_cast<std::size_t>(it - grid.begin()) - 1;
}

}  // namespace

WeightedDistribution interior_two_point(const MomentProblem& problem) {
    const auto& x = problem.grid;
    const double ratio = problem.n_bar / problem.p_bar;
    std::size_t m = pivot_index_for(x, ratio);
    WeightedDistribution out;
    if (x[m] == ratio || m + 1 == x.size()) {
        out.add(x[m], problem.p_bar);
        return out;
    }
    const double dx = x[m + 1] - x[m];
    out.add(x[m], clamp_weight((x[m + 1] * problem.p_bar - problem.n_bar) / dx));
    out.add(x[m + 1], clamp_weight((problem.n_bar - x[m] * problem.p_bar) / dx));
    return out;
}

WeightedDistribution endpoint_two_point(const MomentProblem& problem) {
    const auto& x = problem.grid;
    WeightedDistribution out;
    if (x.size() == 1) {
        out.add(x.front(), problem.p_bar);
        return out;
    }
    const double dx = x.back() - x.front();
    out.add(x.front(), clamp_weight((x.back() * problem.p_bar - problem.n_bar) / dx));
    out.add(x.back(), clamp_weight((problem.n_bar - x.front() * problem.p_bar) / dx));
    return out;
}

ExtremalResult extremal_expectation(const MomentProblem& problem, const ObjectiveSpec& obj,
                                    Direction direction) {
    SlopeClass cls = classify_slope(obj, problem.grid);
    if (cls.kind == SlopeClass::Mixed) {
        throw Error(Errc::MixedSlopeRequiresSegmentation,
                    "objective has mixed slope; use the segmented solver");
    }
    const bool interior = (cls.kind == SlopeClass::DecreasingSlope) == (direction == Direction::Max);
    WeightedDistribution dist = interior ? interior_two_point(problem) : endpoint_two_point(problem);
    double value = 0.0;
    for (const auto& [x, w] : dist.weights()) value += w * evaluate(obj, x);
    Branch branch = dist.size() == 1 ? Branch::Singleton
                    : interior       ? Branch::InteriorTwoPoint
                                     : Branch::EndpointTwoPoint;
    return ExtremalResult{std::move(dist), value, branch, direction};
}

WeightedDistribution adjacent_fock_distribution(double n_bar) {
    if (n_bar < 0.0 || !std::isfinite(n_bar))
        throw Error(Errc::NegativeMean, "mean photon number must be nonnegative");
    const double lo = std::floor(n_bar);
    const double frac = n_bar - lo;
    WeightedDistribution out;
    if (frac == 0.0) {
        out.add(lo, 1.0);
    } else {
        out.add(lo, 1.0 - frac);
        out.add(lo + 1.0, frac);
    }
    return out;
}

SplitFamily split_distribution(const WeightedDistribution& p, const MomentProblem& problem) {
    const auto& x = problem.grid;
    const double ratio = problem.n_bar / problem.p_bar;
    if (!(ratio < x.back()))
        throw Error(Errc::DegenerateSplit, "n_bar/p_bar must lie strictly below the top grid point");
    const std::size_t m = pivot_index_for(x, ratio);
    const bool exact = (x[m] == ratio);

    SplitFamily fam;
    fam.pivot_index = m;
    fam.pivot_lo = x[m];
    fam.pivot_hi = x[m + 1];
    fam.exact_pivot = exact;

    auto weight_at = [&](double xi) {
        auto it = p.weights().find(xi);
        return it == p.weights().end() ? 0.0 : it->second;
    };

    // Upper-region normalizer S = sum_j (x_{m+j} - x_m) p(x_{m+j}).
    double S = 0.0;
    for (std::size_t j = m + 1; j < x.size(); ++j) S += (x[j] - x[m]) * weight_at(x[j]);
    if (S == 0.0)
        throw Error(Errc::DegenerateSplit, "no probability mass above the pivot");

    // In the exact-pivot case the pivot's own mass stays aside as the trivial
    // (d+1)-th share and the lower region is strictly below x_m; otherwise
    // the lower region includes x_m and the pivot shares spread over the
    // straddling pair (x_m, x_{m+1}).
    const std::size_t lower_end = exact ? m : m + 1;  // one past the last lower index
    double lower_total = 0.0, excess = 0.0;
    for (std::size_t i = 0; i < lower_end; ++i) lower_total += weight_at(x[i]);
    if (!exact) excess = (problem.n_bar - x[m] * problem.p_bar) / (x[m + 1] - x[m]);
    fam.residual_pivot_mass = exact ? weight_at(x[m]) : 0.0;

    for (std::size_t j = m + 1; j < x.size(); ++j) {
        const double wj = weight_at(x[j]);
        if (wj == 0.0) continue;  // empty groups are skipped
        const double rj = (x[j] - x[m]) * wj / S;
        SplitGroup g;
        g.upper_point = x[j];
        g.upper_weight = wj;
        for (std::size_t i = 0; i < lower_end; ++i) {
            const double wi = weight_at(x[i]);
            if (wi > 0.0) g.lower.add(x[i], rj * wi);
        }
        if (exact) {
            g.pivot_mass_lo = rj * lower_total + wj;
            g.pivot_mass_hi = 0.0;
        } else {
            g.pivot_mass_hi = rj * excess;
            g.pivot_mass_lo = rj * (lower_total - excess) + wj;
        }
        g.budget = g.pivot_mass_lo + g.pivot_mass_hi;
        fam.groups.push_back(std::move(g));
    }
    return fam;
}

}  // namespace exmax
