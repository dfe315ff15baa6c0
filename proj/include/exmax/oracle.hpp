#pragma once

#include <cstdint>

#include "exmax/core.hpp"
#include "exmax/objective.hpp"

namespace exmax {

struct OracleReport {
    double best_value = 0.0;
    WeightedDistribution best_support;  // at most two points
    std::size_t candidates_examined = 0;
};

/// Exact brute force over the vertices of the two-constraint moment
/// polytope: all feasible singletons plus all nonnegative pair solutions of
/// w_i + w_j = p_bar, x_i w_i + x_j w_j = n_bar. The objective is linear in
/// the weights, so the extremum over vertices is the extremum over the
/// whole polytope, for any objective.
OracleReport lp_extremal(const MomentProblem& problem, const ObjectiveSpec& obj,
                         Direction direction);

/// Seeded convex combination of 3..K polytope vertices; the output has the
/// problem's exact (p_bar, n_bar) moments. Deterministic in seed.
WeightedDistribution random_feasible(const MomentProblem& problem, std::uint64_t seed);

}  // namespace exmax
