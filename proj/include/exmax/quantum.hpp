#pragma once

#include <map>
#include <vector>

#include "exmax/core.hpp"
#include "exmax/segment.hpp"

namespace exmax {

/// Two-mode path-symmetric input characterized by its Fock weights
/// p(n) = |<n|phi>|^2, which sum to 1.
struct PathSymmetricState {
    std::map<int, double> fock_weights;

    double p0() const;
    /// Total input photon number, sum of p(n) * n / (1 + p(0)).
    double n_bar_total() const;
};

/// Validates nonnegativity and unit normalization (1e-12).
PathSymmetricState make_path_symmetric(std::map<int, double> fock_weights);

struct QfiReport {
    double fisher_information = 0.0;
    double crb = 0.0;  // 1 / fisher_information
    double n_bar = 0.0;
    bool beats_sql = false;        // fisher > n_bar
    bool beats_heisenberg = false;  // fisher > n_bar^2
};

/// Interferometer phase QFI: sum of p(n) * n^2 / (1 + p(0)).
QfiReport mzi_qfi(const PathSymmetricState& state);

/// Vacuum/cap superposition with weights (cap - n_bar)/(cap + n_bar) and
/// 2 n_bar/(cap + n_bar); its QFI is cap * n_bar.
std::pair<PathSymmetricState, QfiReport> mzi_optimal_state(double n_bar, int cap);

/// n_bar^2 - F(state) with n_bar the state's own total photon number;
/// nonpositive for every path-symmetric state.
double mzi_noon_gap(const PathSymmetricState& state);

/// cap * n_bar - F(state), computed as sum of p(n) * (n/(1+p0)) * (cap - n);
/// nonnegative whenever cap covers the state's support.
double mzi_gap_to_optimal(const PathSymmetricState& state, int cap);

struct LzjcModel {
    double v = 1.0;       // sweep speed, > 0
    double delta = 0.3;   // level splitting, != 0
    int truncation = 100; // top Fock level kept
};

LzjcModel make_lzjc_model(double v, double delta, int truncation = 100);

/// Transition weight of Fock level n under the swept coupling.
double lzjc_f(int n, const LzjcModel& model);

enum class BreakpointMode { Discrete, Continuous };

struct LzjcOptions {
    BreakpointMode breakpoint = BreakpointMode::Discrete;
    /// AdjacentPair reproduces the exact discrete optimum; ContinuousRatio
    /// follows the continuous-ratio search procedure instead.
    RatioMode ratio_mode = RatioMode::AdjacentPair;
    int resolution = 200;
};

struct LzjcResult {
    WeightedDistribution weights;  // optimal |C_n|^2
    QfiReport report;
    AllocationResult allocation;
};

/// Optimal cavity-field weights maximizing the QFI at fixed mean photon
/// number N_bar.
LzjcResult lzjc_optimal(const LzjcModel& model, double N_bar, const LzjcOptions& options = {});

struct LzjcSweepRow {
    double n_bar;
    double f_max;
    bool beats_sql;
    bool beats_heisenberg;
};

std::vector<LzjcSweepRow> lzjc_sweep(const LzjcModel& model, const std::vector<double>& n_bars,
                                     const LzjcOptions& options = {});

/// Squared amplitudes of the cavity state maximizing stored energy and
/// charging power at fixed mean photon number: the adjacent Fock pair.
WeightedDistribution battery_optimal_state(double n_bar);

}  // namespace exmax
