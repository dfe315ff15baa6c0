#include "exmax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace exmax {

namespace {

struct Vertex {
    double xa, wa;
    double xb, wb;  // wb == 0 for singletons
};

// Deterministic tie-break: by value, then lexicographic support.
bool better(const Vertex& cand, double cv, const Vertex& best, double bv, Direction dir) {
    if (dir == Direction::Max ? cv > bv : cv < bv) return true;
    if (cv != bv) return false;
    if (cand.xa != best.xa) return cand.xa < best.xa;
    return cand.xb < best.xb;
}

std::vector<Vertex> enumerate_vertices(const MomentProblem& problem,
                                       std::size_t* examined = nullptr) {
    const auto& x = problem.grid;
    const double pb = problem.p_bar, nb = problem.n_bar;
    std::vector<Vertex> verts;
    std::size_t count = 0;
    const double singleton_tol = 1e-12 * std::max(1.0, std::fabs(nb));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::fabs(x[i] * pb - nb) <= singleton_tol) {
            verts.push_back({x[i], pb, x[i], 0.0});
            ++count;
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            ++count;
            const double dx = x[j] - x[i];
            if (dx < 1e-12) continue;  // grid validation already forbids duplicates
            const double wi = (x[j] * pb - nb) / dx;
            const double wj = (nb - x[i] * pb) / dx;
            if (wi < -1e-12 || wj < -1e-12) continue;
            verts.push_back({x[i], std::max(wi, 0.0), x[j], std::max(wj, 0.0)});
        }
    }
    if (examined) *examined = count;
    return verts;
}

}  // namespace

OracleReport lp_extremal(const MomentProblem& problem, const ObjectiveSpec& obj,
                         Direction direction) {
    std::size_t examined = 0;
    std::vector<Vertex> verts = enumerate_vertices(problem, &examined);
    OracleReport report;
    report.candidates_examined = examined;
    bool have = false;
    Vertex best{};
    double best_value = 0.0;
    for (const Vertex& v : verts) {
        double value = v.wa * evaluate(obj, v.xa);
        if (v.wb != 0.0) value += v.wb * evaluate(obj, v.xb);
        if (!have || better(v, value, best, best_value, direction)) {
            have = true;
            best = v;
            best_value = value;
        }
    }
    if (!have) throw Error(Errc::InfeasibleMean, "no polytope vertex found");
    report.best_value = best_value;
    report.best_support.add(best.xa, best.wa);
    if (best.wb != 0.0) report.best_support.add(best.xb, best.wb);
    return report;
}

WeightedDistribution random_feasible(const MomentProblem& problem, std::uint64_t seed) {
    std::vector<Vertex> verts = enumerate_vertices(problem);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const std::size_t lo = std::min<std::size_t>(3, verts.size());
    const std::size_t hi = std::min(problem.grid.size(), verts.size());
    std::size_t count = lo;
    if (hi > lo) count = lo + rng() % (hi - lo + 1);

    std::vector<std::size_t> idx(verts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<double> mix(count);
    double mix_total = 0.0;
    for (double& m : mix) {
        m = unif(rng) + 1e-3;  // bounded away from zero so supports stay spread
        mix_total += m;
    }
    WeightedDistribution out;
    for (std::size_t k = 0; k < count; ++k) {
        const Vertex& v = verts[idx[k]];
        const double c = mix[k] / mix_total;
        out.add(v.xa, c * v.wa);
        if (v.wb != 0.0) out.add(v.xb, c * v.wb);
    }
    return out;
}

}  // namespace exmax
