#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace exmax {

enum class Errc {
    NonMonotonicGrid,
    BudgetOutOfRange,
    InfeasibleMean,
    EmptyDistribution,
    OutOfDomain,
    ExpressionDomain,
    MixedSlopeRequiresSegmentation,
    NegativeMean,
    DegenerateSplit,
    RatioOutsideInterval,
    NoFeasibleAllocation,
    CapBelowMean,
    CapBelowSupport,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

const char* errc_name(Errc code);

enum class Direction { Max, Min };

/// Sparse distribution: support point -> nonnegative weight.
/// Weights need not sum to 1; the budget p_bar is part of the problem, not
/// the distribution.
class WeightedDistribution {
  public:
    WeightedDistribution() = default;
    explicit WeightedDistribution(std::map<double, double> weights)
        : weights_(std::move(weights)) {}

    /// Adds mass at x, merging with any existing weight there. Zero
    /// increments are dropped so outputs stay sparse.
    void add(double x, double w);

    const std::map<double, double>& weights() const noexcept { return weights_; }
    bool empty() const noexcept { return weights_.empty(); }
    std::size_t size() const noexcept { return weights_.size(); }

    double total() const;
    /// Un-normalized first moment, sum of x * w(x).
    double mean() const;

  private:
    std::map<double, double> weights_;
};

struct Moments {
    double p_total;
    double mean;
};

/// (sum of weights, sum of x*weight). Throws EmptyDistribution on {}.
Moments moments(const WeightedDistribution& dist);

/// Support grid with a total-probability budget and a fixed (un-normalized)
/// first moment.
struct MomentProblem {
    std::vector<double> grid;  // strictly increasing, size >= 1
    double p_bar;              // in (0, 1]
    double n_bar;              // in [grid.front()*p_bar, grid.back()*p_bar]
};

/// Validates grid monotonicity, budget range, and mean feasibility.
/// Boundary means n_bar = x1*p_bar or x_K*p_bar are valid (forced point mass).
MomentProblem validate_problem(std::vector<double> grid, double p_bar, double n_bar);

enum class Branch { InteriorTwoPoint, EndpointTwoPoint, Singleton, Segmented };

struct ExtremalResult {
    WeightedDistribution distribution;
    double value;
    Branch branch;
    Direction direction;
};

}  // namespace exmax
