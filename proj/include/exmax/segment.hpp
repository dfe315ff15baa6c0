#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exmax/core.hpp"
#include "exmax/objective.hpp"

namespace exmax {

struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    SlopeClass::Kind cls = SlopeClass::IncreasingSlope;
};

/// Monotone-slope intervals covering the domain, classes alternating.
struct SegmentPlan {
    std::vector<Segment> intervals;
    ObjectiveSpec objective;
    /// Non-empty for discrete problems; fragments are then realized on grid
    /// points. Empty means the interior point n_bar_i/p_i itself is a valid
    /// support point (continuous interval context).
    std::vector<double> grid;
};

/// Discrete segmentation over a grid: boundaries at the grid endpoints plus
/// the sign-change breakpoints of the second divided difference.
SegmentPlan segment_domain(const ObjectiveSpec& obj, const std::vector<double>& grid);

/// Continuous segmentation over [lo, hi] at second-derivative roots.
SegmentPlan segment_domain_continuous(const ObjectiveSpec& obj, double lo, double hi);

/// How the "peak" term p_i * H(n_bar_i / p_i) is valued during the outer
/// search on discrete grids: AdjacentPair uses the expectation of the
/// realizable two-point distribution (exact for the discrete problem);
/// ContinuousRatio evaluates H at the ratio itself.
enum class RatioMode { AdjacentPair, ContinuousRatio };

struct Fragment {
    WeightedDistribution dist;
    double value = 0.0;  // expectation of the objective under dist
};

/// Per-interval extremal fragment for a fixed (p_i, n_bar_i) share.
/// Decreasing slope + Max and increasing slope + Min take the interior
/// (peak) rule; the other two cases take the endpoint mixture.
Fragment inner_extremal(const Segment& seg, double p_i, double n_bar_i, const ObjectiveSpec& obj,
                        Direction direction, const std::vector<double>* grid,
                        RatioMode mode = RatioMode::AdjacentPair);

struct AllocateOptions {
    int resolution = 200;  // coarse-sweep resolution per free axis
    RatioMode ratio_mode = RatioMode::AdjacentPair;
    std::uint64_t seed = 0x5eed5eedULL;  // for coarse sampling beyond two intervals
    double p_bar = 1.0;                  // total probability budget
};

struct AllocationResult {
    std::vector<double> p;      // per-interval probability shares
    std::vector<double> n_bar;  // per-interval un-normalized means
    std::vector<Fragment> fragments;
    WeightedDistribution distribution;  // assembled from the fragments
    double value = 0.0;                 // expectation under `distribution`
    Direction direction = Direction::Max;
    struct Trace {
        std::size_t evaluations = 0;
        std::size_t refine_steps = 0;
        std::vector<std::string> notes;
    } trace;
};

/// Outer optimization of the (p_i, n_bar_i) allocation across intervals:
/// discrete vertex seeding (when a grid is present), a coarse sweep over the
/// free variables, boundary-line sweeps, then compass refinement with
/// shrinking step down to 1e-6.
AllocationResult allocate_optimize(const SegmentPlan& plan, double N_bar, Direction direction,
                                   const AllocateOptions& options = {});

/// Concatenates the per-interval fragments (merging shared boundary points).
WeightedDistribution assemble(const AllocationResult& result);

}  // namespace exmax
