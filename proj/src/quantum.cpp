#include "exmax/quantum.hpp"

#include <cmath>

#include "exmax/objective.hpp"
#include "exmax/solver.hpp"

namespace exmax {

double PathSymmetricState::p0() const {
    auto it = fock_weights.find(0);
    return it == fock_weights.end() ? 0.0 : it->second;
}

double PathSymmetricState::n_bar_total() const {
    const double denom = 1.0 + p0();
    double total = 0.0;
    for (const auto& [n, w] : fock_weights) total += w * n / denom;
    return total;
}

PathSymmetricState make_path_symmetric(std::map<int, double> fock_weights) {
    double total = 0.0;
    for (const auto& [n, w] : fock_weights) {
        if (n < 0) throw Error(Errc::NegativeMean, "Fock levels must be nonnegative");
        if (w < 0.0) throw Error(Errc::OutOfDomain, "Fock weights must be nonnegative");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw Error(Errc::OutOfDomain, "Fock weights must sum to 1");
    return PathSymmetricState{std::move(fock_weights)};
}

namespace {

QfiReport report_for(double fisher, double n_bar) {
    QfiReport r;
    r.fisher_information = fisher;
    r.crb = fisher > 0.0 ? 1.0 / fisher : 0.0;
    r.n_bar = n_bar;
    r.beats_sql = fisher > n_bar;
    r.beats_heisenberg = fisher > n_bar * n_bar;
    return r;
}

}  // namespace

QfiReport mzi_qfi(const PathSymmetricState& state) {
    const double denom = 1.0 + state.p0();
    double fisher = 0.0;
    for (const auto& [n, w] : state.fock_weights) fisher += w * static_cast<double>(n) * n / denom;
    return report_for(fisher, state.n_bar_total());
}

std::pair<PathSymmetricState, QfiReport> mzi_optimal_state(double n_bar, int cap) {
    if (!(n_bar > 0.0)) throw Error(Errc::NegativeMean, "mean photon number must be positive");
    if (cap < n_bar) throw Error(Errc::CapBelowMean, "cap must be at least the mean photon number");
    std::map<int, double> w;
    if (cap > n_bar) w[0] = (cap - n_bar) / (cap + n_bar);
    w[cap] = 2.0 * n_bar / (cap + n_bar);  // cap == n_bar collapses to the NOON point mass
    PathSymmetricState state{std::move(w)};
    return {state, mzi_qfi(state)};
}

double mzi_noon_gap(const PathSymmetricState& state) {
    const double n_bar = state.n_bar_total();
    return n_bar * n_bar - mzi_qfi(state).fisher_information;
}

double mzi_gap_to_optimal(const PathSymmetricState& state, int cap) {
    const double denom = 1.0 + state.p0();
    double gap = 0.0;
    for (const auto& [n, w] : state.fock_weights) {
        if (n > cap) throw Error(Errc::CapBelowSupport, "cap below the state's top Fock level");
        gap += w * (n / denom) * (cap - n);
    }
    if (cap < state.n_bar_total())
        throw Error(Errc::CapBelowMean, "cap must be at least the mean photon number");
    return gap;
}

LzjcModel make_lzjc_model(double v, double delta, int truncation) {
    if (!(v > 0.0)) throw Error(Errc::OutOfDomain, "sweep speed v must be positive");
    if (delta == 0.0) throw Error(Errc::OutOfDomain, "level splitting delta must be nonzero");
    if (truncation < 1) throw Error(Errc::OutOfDomain, "truncation must be at least 1");
    return LzjcModel{v, delta, truncation};
}

double lzjc_f(int n, const LzjcModel& model) {
    if (n < 0 || n > model.truncation)
        throw Error(Errc::OutOfDomain, "Fock level outside the truncated space");
    return evaluate(make_lzjc_f(model.v, model.delta), static_cast<double>(n));
}

LzjcResult lzjc_optimal(const LzjcModel& model, double N_bar, const LzjcOptions& options) {
    if (N_bar < 0.0 || N_bar > model.truncation)
        throw Error(Errc::InfeasibleMean, "mean photon number outside [0, truncation]");
    std::vector<double> grid(model.truncation + 1);
    for (int n = 0; n <= model.truncation; ++n) grid[n] = n;
    ObjectiveSpec obj = make_lzjc_f(model.v, model.delta);

    SegmentPlan plan;
    if (options.breakpoint == BreakpointMode::Discrete) {
        plan = segment_domain(obj, grid);
    } else {
        plan = segment_domain_continuous(obj, 0.0, model.truncation);
        plan.grid = grid;
    }
    AllocateOptions alloc_opts;
    alloc_opts.ratio_mode = options.ratio_mode;
    alloc_opts.resolution = options.resolution;
    AllocationResult alloc = allocate_optimize(plan, N_bar, Direction::Max, alloc_opts);

    LzjcResult result;
    result.weights = alloc.distribution;
    result.report = report_for(alloc.value, N_bar);
    result.allocation = std::move(alloc);
    return result;
}

std::vector<LzjcSweepRow> lzjc_sweep(const LzjcModel& model, const std::vector<double>& n_bars,
                                     const LzjcOptions& options) {
    std::vector<LzjcSweepRow> rows;
    rows.reserve(n_bars.size());
    for (double nb : n_bars) {
        LzjcResult r = lzjc_optimal(model, nb, options);
        rows.push_back({nb, r.report.fisher_information, r.report.beats_sql,
                        r.report.beats_heisenberg});
    }
    return rows;
}

WeightedDistribution battery_optimal_state(double n_bar) { return adjacent_fock_distribution(n_bar); }

}  // namespace exmax
