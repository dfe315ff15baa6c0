#pragma once

#include <vector>

#include "exmax/core.hpp"
#include "exmax/objective.hpp"

namespace exmax {

/// Two-point distribution on the adjacent grid pair straddling n_bar/p_bar.
/// Degenerates to a point mass when the ratio lands exactly on a grid point.
WeightedDistribution interior_two_point(const MomentProblem& problem);

/// Two-point distribution on the grid extremes x_1 and x_K.
WeightedDistribution endpoint_two_point(const MomentProblem& problem);

/// Theorem dispatch for slope-monotone objectives:
///   decreasing slope: Max -> interior, Min -> endpoint;
///   increasing slope: Max -> endpoint, Min -> interior.
/// Throws MixedSlopeRequiresSegmentation otherwise.
ExtremalResult extremal_expectation(const MomentProblem& problem, const ObjectiveSpec& obj,
                                    Direction direction);

/// Unit-budget distribution on the integer pair {floor(n_bar), floor(n_bar)+1}
/// (a point mass when n_bar is an integer).
WeightedDistribution adjacent_fock_distribution(double n_bar);

/// One group of the equal-probability / equal-expected-value decomposition.
/// lower holds the split weights over the region at or below the pivot;
/// upper_point/upper_weight is the untouched upper-region entry. budget and
/// pivot_mass_lo/hi are the matching shares of the interior two-point
/// distribution; the group identities equate the two sides.
struct SplitGroup {
    WeightedDistribution lower;
    double upper_point = 0.0;
    double upper_weight = 0.0;
    double budget = 0.0;         // total probability of the group
    double pivot_mass_lo = 0.0;  // share at x_m
    double pivot_mass_hi = 0.0;  // share at x_{m+1}; zero when the pivot is exact
};

struct SplitFamily {
    std::vector<SplitGroup> groups;
    std::size_t pivot_index = 0;  // m, 0-based into the grid
    double pivot_lo = 0.0;        // x_m
    double pivot_hi = 0.0;        // x_{m+1}
    bool exact_pivot = false;     // n_bar/p_bar landed exactly on x_m
    double residual_pivot_mass = 0.0;  // p(x_m) kept aside in the exact case
};

/// Decomposes a feasible distribution into groups that match the interior
/// two-point distribution in both probability and first moment, group by
/// group. Requires mass strictly above the pivot (DegenerateSplit otherwise).
SplitFamily split_distribution(const WeightedDistribution& p, const MomentProblem& problem);

}  // namespace exmax
