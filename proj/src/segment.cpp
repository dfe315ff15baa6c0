#include "exmax/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "exmax/solver.hpp"

namespace exmax {

namespace {

std::vector<double> subgrid(const std::vector<double>& grid, double lo, double hi) {
    std::vector<double> sub;
    for (double x : grid)
        if (x >= lo && x <= hi) sub.push_back(x);
    return sub;
}

SlopeClass::Kind flip(SlopeClass::Kind k) {
    return k == SlopeClass::IncreasingSlope ? SlopeClass::DecreasingSlope
                                            : SlopeClass::IncreasingSlope;
}

}  // namespace

SegmentPlan segment_domain(const ObjectiveSpec& obj, const std::vector<double>& grid) {
    if (grid.empty()) throw Error(Errc::OutOfDomain, "segmentation needs a non-empty grid");
    SegmentPlan plan;
    plan.objective = obj;
    plan.grid = grid;
    SlopeClass cls = classify_slope(obj, grid);
    if (cls.kind != SlopeClass::Mixed) {
        plan.intervals.push_back({grid.front(), grid.back(), cls.kind});
        return plan;
    }
    std::vector<double> bounds;
    bounds.push_back(grid.front());
    bounds.insert(bounds.end(), cls.breakpoints.begin(), cls.breakpoints.end());
    bounds.push_back(grid.back());
    SlopeClass::Kind k = cls.first;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        plan.intervals.push_back({bounds[i], bounds[i + 1], k});
        k = flip(k);
    }
    return plan;
}

SegmentPlan segment_domain_continuous(const ObjectiveSpec& obj, double lo, double hi) {
    if (!(lo < hi)) throw Error(Errc::OutOfDomain, "segmentation requires lo < hi");
    SegmentPlan plan;
    plan.objective = obj;
    std::vector<double> bounds;
    bounds.push_back(lo);
    for (double r : find_inflections(obj, lo, hi, InflectionMode::Continuous))
        bounds.push_back(r);
    bounds.push_back(hi);

    // First interval's class from the central second difference at its
    // midpoint; classes alternate across inflection points.
    const double h = (hi - lo) * 1e-5;
    const double mid = 0.5 * (bounds[0] + bounds[1]);
    const double curv = evaluate(obj, mid - h) - 2.0 * evaluate(obj, mid) + evaluate(obj, mid + h);
    SlopeClass::Kind k = curv < 0.0 ? SlopeClass::DecreasingSlope : SlopeClass::IncreasingSlope;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        plan.intervals.push_back({bounds[i], bounds[i + 1], k});
        k = flip(k);
    }
    return plan;
}

Fragment inner_extremal(const Segment& seg, double p_i, double n_bar_i, const ObjectiveSpec& obj,
                        Direction direction, const std::vector<double>* grid, RatioMode mode) {
    const double scale = std::max({1.0, std::fabs(seg.lo), std::fabs(seg.hi)});
    const double tol = 1e-9 * scale;
    Fragment frag;
    if (p_i <= 0.0) {
        if (p_i < -tol || std::fabs(n_bar_i) > tol)
            throw Error(Errc::RatioOutsideInterval, "zero-probability interval with nonzero mean");
        return frag;
    }
    double ratio = n_bar_i / p_i;
    if (ratio < seg.lo - tol || ratio > seg.hi + tol)
        throw Error(Errc::RatioOutsideInterval, "n_bar_i/p_i outside its interval");
    ratio = std::clamp(ratio, seg.lo, seg.hi);

    const bool peak = (seg.cls == SlopeClass::DecreasingSlope) == (direction == Direction::Max);
    if (peak) {
        const bool on_grid = grid != nullptr && !grid->empty();
        if (on_grid && (mode == RatioMode::AdjacentPair || !obj.continuous())) {
            std::vector<double> sub = subgrid(*grid, seg.lo, seg.hi);
            const double n_lo = sub.front() * p_i, n_hi = sub.back() * p_i;
            MomentProblem local{std::move(sub), p_i, std::clamp(n_bar_i, n_lo, n_hi)};
            frag.dist = interior_two_point(local);
            for (const auto& [x, w] : frag.dist.weights()) frag.value += w * evaluate(obj, x);
        } else {
            if (!obj.continuous())
                throw Error(Errc::OutOfDomain, "tabulated objective needs a grid to realize");
            frag.dist.add(ratio, p_i);
            frag.value = p_i * evaluate(obj, ratio);
        }
    } else {
        const double dx = seg.hi - seg.lo;
        double w_lo = (seg.hi * p_i - n_bar_i) / dx;
        double w_hi = (n_bar_i - seg.lo * p_i) / dx;
        w_lo = std::max(w_lo, 0.0);
        w_hi = std::max(w_hi, 0.0);
        frag.dist.add(seg.lo, w_lo);
        frag.dist.add(seg.hi, w_hi);
        frag.value = w_lo * evaluate(obj, seg.lo) + w_hi * evaluate(obj, seg.hi);
    }
    return frag;
}

namespace {

struct Alloc {
    std::vector<double> p;
    std::vector<double> n;
};

class Optimizer {
  public:
    Optimizer(const SegmentPlan& plan, double N_bar, Direction dir, const AllocateOptions& opt)
        : plan_(plan), N_(N_bar), dir_(dir), opt_(opt), M_(plan.intervals.size()) {
        grid_ = plan_.grid.empty() ? nullptr : &plan_.grid;
        search_mode_ = opt_.ratio_mode;
        if (!plan_.objective.continuous()) search_mode_ = RatioMode::AdjacentPair;
    }

    AllocationResult run() {
        const double pb = opt_.p_bar;
        const double X0 = plan_.intervals.front().lo, XK = plan_.intervals.back().hi;
        const double tol = 1e-9 * std::max({1.0, std::fabs(X0), std::fabs(XK)});
        if (!(pb > 0.0) || pb > 1.0)
            throw Error(Errc::BudgetOutOfRange, "allocation budget must lie in (0, 1]");
        if (N_ < X0 * pb - tol || N_ > XK * pb + tol)
            throw Error(Errc::NoFeasibleAllocation, "target mean outside the domain");

        Alloc best = initial_candidate();
        double best_v = value(best);
        auto consider = [&](const Alloc& a) {
            double v = value(a);
            if (better(v, a, best_v, best)) {
                best_v = v;
                best = a;
            }
        };

        if (M_ > 1) {
            if (grid_ && search_mode_ == RatioMode::AdjacentPair) seed_from_vertices(consider);
            if (M_ == 2) {
                coarse_sweep_two(consider);
                boundary_sweeps_two(consider);
            } else {
                coarse_sample(consider);
            }
            refine(best, best_v);
        }
        if (std::isinf(best_v))
            throw Error(Errc::NoFeasibleAllocation, "no feasible allocation found");
        return finalize(best);
    }

  private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    bool better(double v, const Alloc& a, double best_v, const Alloc& best) const {
        if (std::isinf(v)) return false;
        if (std::isinf(best_v)) return true;
        const double eps = 1e-12 * std::max(1.0, std::fabs(best_v));
        if (dir_ == Direction::Max ? v > best_v + eps : v < best_v - eps) return true;
        if (std::fabs(v - best_v) <= eps) return a.p.back() < best.p.back() - 1e-15;
        return false;
    }

    // Search objective; +-inf marks an infeasible allocation.
    double value(const Alloc& a) {
        ++trace_evals_;
        double total = 0.0;
        for (std::size_t i = 0; i < M_; ++i) {
            if (a.p[i] < -1e-12) return dir_ == Direction::Max ? -kInf : kInf;
            try {
                Fragment f = inner_extremal(plan_.intervals[i], std::max(a.p[i], 0.0), a.n[i],
                                            plan_.objective, dir_, grid_, search_mode_);
                total += f.value;
            } catch (const Error&) {
                return dir_ == Direction::Max ? -kInf : kInf;
            }
        }
        return total;
    }

    // All budget in the interval containing the overall ratio.
    Alloc initial_candidate() const {
        const double r = N_ / opt_.p_bar;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < M_; ++i)
            if (plan_.intervals[i].lo <= r) idx = i;
        Alloc a{std::vector<double>(M_, 0.0), std::vector<double>(M_, 0.0)};
        a.p[idx] = opt_.p_bar;
        a.n[idx] = N_;
        return a;
    }

    std::size_t interval_of(double x) const {
        // boundary points belong to the left interval that ends there
        for (std::size_t i = 0; i < M_; ++i)
            if (x <= plan_.intervals[i].hi) return i;
        return M_ - 1;
    }

    // The discrete optimum is a vertex of the two-constraint polytope, so
    // allocations induced by support pairs seed the search with every
    // candidate the exact problem can produce.
    template <typename Fn>
    void seed_from_vertices(Fn&& consider) {
        const auto& x = *grid_;
        const double pb = opt_.p_bar;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t j = i + 1; j < x.size(); ++j) {
                const double dx = x[j] - x[i];
                const double wi = (x[j] * pb - N_) / dx;
                const double wj = (N_ - x[i] * pb) / dx;
                if (wi < -1e-12 || wj < -1e-12) continue;
                Alloc a{std::vector<double>(M_, 0.0), std::vector<double>(M_, 0.0)};
                a.p[interval_of(x[i])] += std::max(wi, 0.0);
                a.n[interval_of(x[i])] += std::max(wi, 0.0) * x[i];
                a.p[interval_of(x[j])] += std::max(wj, 0.0);
                a.n[interval_of(x[j])] += std::max(wj, 0.0) * x[j];
                consider(a);
            }
        }
        seeded_ = true;
    }

    template <typename Fn>
    void coarse_sweep_two(Fn&& consider) {
        const double pb = opt_.p_bar;
        const auto& s1 = plan_.intervals[0];
        const auto& s2 = plan_.intervals[1];
        const int R = std::max(opt_.resolution, 8);
        for (int a = 0; a <= R; ++a) {
            const double p2 = pb * a / R;
            const double p1 = pb - p2;
            const double n2_lo = std::max(s2.lo * p2, N_ - s1.hi * p1);
            const double n2_hi = std::min(s2.hi * p2, N_ - s1.lo * p1);
            if (n2_lo > n2_hi) continue;
            for (int b = 0; b <= R; ++b) {
                const double n2 = n2_lo + (n2_hi - n2_lo) * b / R;
                consider(Alloc{{p1, p2}, {N_ - n2, n2}});
            }
        }
    }

    template <typename Fn>
    void boundary_sweeps_two(Fn&& consider) {
        const double pb = opt_.p_bar;
        const auto& s1 = plan_.intervals[0];
        const auto& s2 = plan_.intervals[1];
        const int R = std::max(opt_.resolution, 8) * 4;
        auto run_line = [&](auto n2_of_p2) {
            for (int a = 0; a <= R; ++a) {
                const double p2 = pb * a / R;
                const double n2 = n2_of_p2(p2);
                consider(Alloc{{pb - p2, p2}, {N_ - n2, n2}});
            }
        };
        run_line([&](double p2) { return s2.lo * p2; });
        run_line([&](double p2) { return s2.hi * p2; });
        run_line([&](double p2) { return N_ - s1.lo * (pb - p2); });
        run_line([&](double p2) { return N_ - s1.hi * (pb - p2); });
    }

    template <typename Fn>
    void coarse_sample(Fn&& consider) {
        std::mt19937_64 rng(opt_.seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::exponential_distribution<double> expo(1.0);
        const int samples = std::max(opt_.resolution, 8) * std::max(opt_.resolution, 8);
        for (int s = 0; s < samples; ++s) {
            Alloc a{std::vector<double>(M_, 0.0), std::vector<double>(M_, 0.0)};
            double total = 0.0;
            for (double& p : a.p) {
                p = expo(rng);
                total += p;
            }
            for (double& p : a.p) p *= opt_.p_bar / total;
            double n_total = 0.0;
            for (std::size_t i = 0; i < M_; ++i) {
                const auto& seg = plan_.intervals[i];
                a.n[i] = (seg.lo + unif(rng) * (seg.hi - seg.lo)) * a.p[i];
                n_total += a.n[i];
            }
            // push the mean onto the target hyperplane within the box
            double deficit = N_ - n_total;
            for (int pass = 0; pass < 4 && std::fabs(deficit) > 1e-14; ++pass) {
                double slack = 0.0;
                for (std::size_t i = 0; i < M_; ++i) {
                    const auto& seg = plan_.intervals[i];
                    slack += deficit > 0.0 ? seg.hi * a.p[i] - a.n[i] : a.n[i] - seg.lo * a.p[i];
                }
                if (slack <= 0.0) break;
                const double ratio = std::min(1.0, std::fabs(deficit) / slack);
                for (std::size_t i = 0; i < M_; ++i) {
                    const auto& seg = plan_.intervals[i];
                    const double room =
                        deficit > 0.0 ? seg.hi * a.p[i] - a.n[i] : a.n[i] - seg.lo * a.p[i];
                    a.n[i] += (deficit > 0.0 ? 1.0 : -1.0) * room * ratio;
                }
                double sum = 0.0;
                for (double n : a.n) sum += n;
                deficit = N_ - sum;
            }
            if (std::fabs(deficit) > 1e-12 * std::max(1.0, std::fabs(N_))) continue;
            consider(a);
        }
    }

    // Compass refinement over sum-preserving transfer moves: probability
    // moved between intervals lands on a boundary point or a current ratio
    // point, plus pure moment transfers.
    void refine(Alloc& best, double& best_v) {
        const double n_scale = std::max(1.0, std::fabs(plan_.intervals.back().hi));
        double step = 0.05 * opt_.p_bar;
        while (step >= 1e-6) {
            Alloc cand = best;
            double cand_v = best_v;
            bool improved = false;
            for (std::size_t i = 0; i < M_; ++i) {
                for (std::size_t j = 0; j < M_; ++j) {
                    if (i == j) continue;
                    std::vector<double> points = {plan_.intervals[j].lo, plan_.intervals[j].hi};
                    if (best.p[i] > step) points.push_back(best.n[i] / best.p[i]);
                    if (best.p[j] > 1e-12) points.push_back(best.n[j] / best.p[j]);
                    for (double c : points) {
                        Alloc a = best;
                        a.p[i] -= step;
                        a.p[j] += step;
                        a.n[i] -= c * step;
                        a.n[j] += c * step;
                        double v = value(a);
                        if (better(v, a, cand_v, cand)) {
                            cand = a;
                            cand_v = v;
                            improved = true;
                        }
                    }
                    {
                        Alloc a = best;
                        a.n[i] -= step * n_scale;
                        a.n[j] += step * n_scale;
                        double v = value(a);
                        if (better(v, a, cand_v, cand)) {
                            cand = a;
                            cand_v = v;
                            improved = true;
                        }
                    }
                }
            }
            if (improved) {
                best = cand;
                best_v = cand_v;
                ++trace_refines_;
            } else {
                step *= 0.5;
            }
            if (trace_evals_ > 5'000'000) break;
        }
    }

    AllocationResult finalize(Alloc best) {
        // fold numerically empty intervals into the heaviest one
        std::size_t heavy = 0;
        for (std::size_t i = 1; i < M_; ++i)
            if (best.p[i] > best.p[heavy]) heavy = i;
        for (std::size_t i = 0; i < M_; ++i) {
            if (i != heavy && best.p[i] < 1e-12) {
                best.p[heavy] += best.p[i];
                best.n[heavy] += best.n[i];
                best.p[i] = 0.0;
                best.n[i] = 0.0;
            }
        }
        AllocationResult result;
        result.p = best.p;
        result.n_bar = best.n;
        result.direction = dir_;
        for (std::size_t i = 0; i < M_; ++i) {
            Fragment f = inner_extremal(plan_.intervals[i], best.p[i], best.n[i], plan_.objective,
                                        dir_, grid_, RatioMode::AdjacentPair);
            result.value += f.value;
            for (const auto& [x, w] : f.dist.weights()) result.distribution.add(x, w);
            result.fragments.push_back(std::move(f));
        }
        result.trace.evaluations = trace_evals_;
        result.trace.refine_steps = trace_refines_;
        if (seeded_) result.trace.notes.push_back("seeded from discrete support pairs");
        if (search_mode_ == RatioMode::ContinuousRatio)
            result.trace.notes.push_back("outer search used continuous ratio values");
        if (M_ % 2 == 0 || plan_.intervals.front().cls == SlopeClass::IncreasingSlope)
            result.trace.notes.push_back("interval pattern generalizes the odd-count assembly");
        return result;
    }

    const SegmentPlan& plan_;
    double N_;
    Direction dir_;
    AllocateOptions opt_;
    std::size_t M_;
    const std::vector<double>* grid_ = nullptr;
    RatioMode search_mode_ = RatioMode::AdjacentPair;
    std::size_t trace_evals_ = 0;
    std::size_t trace_refines_ = 0;
    bool seeded_ = false;
};

}  // namespace

AllocationResult allocate_optimize(const SegmentPlan& plan, double N_bar, Direction direction,
                                   const AllocateOptions& options) {
    if (plan.intervals.empty())
        throw Error(Errc::NoFeasibleAllocation, "segment plan has no intervals");
    return Optimizer(plan, N_bar, direction, options).run();
}

WeightedDistribution assemble(const AllocationResult& result) {
    WeightedDistribution out;
    for (const auto& frag : result.fragments)
        for (const auto& [x, w] : frag.dist.weights()) out.add(x, w);
    return out;
}

}  // namespace exmax
