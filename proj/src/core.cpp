#include "exmax/core.hpp"

#include <cmath>
#include <sstream>

namespace exmax {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::NonMonotonicGrid: return "NonMonotonicGrid";
        case Errc::BudgetOutOfRange: return "BudgetOutOfRange";
        case Errc::InfeasibleMean: return "InfeasibleMean";
        case Errc::EmptyDistribution: return "EmptyDistribution";
        case Errc::OutOfDomain: return "OutOfDomain";
        case Errc::ExpressionDomain: return "ExpressionDomain";
        case Errc::MixedSlopeRequiresSegmentation: return "MixedSlopeRequiresSegmentation";
        case Errc::NegativeMean: return "NegativeMean";
        case Errc::DegenerateSplit: return "DegenerateSplit";
        case Errc::RatioOutsideInterval: return "RatioOutsideInterval";
        case Errc::NoFeasibleAllocation: return "NoFeasibleAllocation";
        case Errc::CapBelowMean: return "CapBelowMean";
        case Errc::CapBelowSupport: return "CapBelowSupport";
    }
    return "UnknownError";
}

void WeightedDistribution::add(double x, double w) {
    if (w == 0.0) return;
    auto [it, inserted] = weights_.try_emplace(x, w);
    if (!inserted) {
        it->second += w;
        if (it->second == 0.0) weights_.erase(it);
    }
}

double WeightedDistribution::total() const {
    double s = 0.0;
    for (const auto& [x, w] : weights_) s += w;
    return s;
}

double WeightedDistribution::mean() const {
    double s = 0.0;
    for (const auto& [x, w] : weights_) s += x * w;
    return s;
}

Moments moments(const WeightedDistribution& dist) {
    if (dist.empty()) throw Error(Errc::EmptyDistribution, "moments of an empty distribution");
    return {dist.total(), dist.mean()};
}

MomentProblem validate_problem(std::vector<double> grid, double p_bar, double n_bar) {
    if (grid.empty()) throw Error(Errc::NonMonotonicGrid, "grid is empty");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1])) {
            std::ostringstream msg;
            msg << "grid not strictly increasing at index " << i + 1;
            throw Error(Errc::NonMonotonicGrid, msg.str());
        }
    }
    for (double x : grid) {
        if (!std::isfinite(x)) throw Error(Errc::NonMonotonicGrid, "grid contains a non-finite point");
    }
    if (!(p_bar > 0.0) || !(p_bar <= 1.0) || !std::isfinite(p_bar)) {
        throw Error(Errc::BudgetOutOfRange, "p_bar must lie in (0, 1]");
    }
    if (!std::isfinite(n_bar) || n_bar < grid.front() * p_bar || n_bar > grid.back() * p_bar) {
        std::ostringstream msg;
        msg << "n_bar = " << n_bar << " outside [" << grid.front() * p_bar << ", "
            << grid.back() * p_bar << "]";
        throw Error(Errc::InfeasibleMean, msg.str());
    }
    return MomentProblem{std::move(grid), p_bar, n_bar};
}

}  // namespace exmax
