#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "exmax/oracle.hpp"
#include "exmax/solver.hpp"

using namespace exmax;

static std::vector<double> integer_grid(int lo, int hi) {
    std::vector<double> g;
    for (int n = lo; n <= hi; ++n) g.push_back(n);
    return g;
}

static double expectation(const WeightedDistribution& d, const ObjectiveSpec& obj) {
    double v = 0.0;
    for (const auto& [x, w] : d.weights()) v += w * evaluate(obj, x);
    return v;
}

TEST_CASE("lp_extremal on the three-point square example") {
    MomentProblem p = validate_problem({0, 1, 2}, 1.0, 1.0);
    OracleReport mx = lp_extremal(p, make_power(2.0), Direction::Max);
    CHECK(mx.best_value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(mx.best_support.weights().at(0.0) == doctest::Approx(0.5));
    CHECK(mx.best_support.weights().at(2.0) == doctest::Approx(0.5));

    OracleReport mn = lp_extremal(p, make_power(2.0), Direction::Min);
    CHECK(mn.best_value == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(mn.best_support.size() == 1);
    CHECK(mn.best_support.weights().at(1.0) == 1.0);
}

TEST_CASE("lp_extremal on a concave tabulated objective") {
    ObjectiveSpec sq = make_tabulated({{0.0, 0.0}, {1.0, 1.0}, {4.0, 2.0}, {9.0, 3.0}});
    OracleReport r =
        lp_extremal(validate_problem({0, 1, 4, 9}, 1.0, 4.0), sq, Direction::Max);
    CHECK(r.best_value == doctest::Approx(2.0).epsilon(1e-14));
    REQUIRE(r.best_support.size() == 1);
    CHECK(r.best_support.weights().at(4.0) == 1.0);
}

TEST_CASE("candidate count is the pair count plus singleton matches") {
    const std::size_t K = 21;
    OracleReport a =
        lp_extremal(validate_problem(integer_grid(0, 20), 1.0, 7.5), make_power(2.0),
                    Direction::Max);
    CHECK(a.candidates_examined == K * (K - 1) / 2);
    OracleReport b =
        lp_extremal(validate_problem(integer_grid(0, 20), 1.0, 7.0), make_power(2.0),
                    Direction::Max);
    CHECK(b.candidates_examined == K * (K - 1) / 2 + 1);
}

TEST_CASE("random_feasible is deterministic with exact moments") {
    MomentProblem p = validate_problem(integer_grid(0, 20), 0.73, 6.1);
    WeightedDistribution a = random_feasible(p, 1234);
    WeightedDistribution b = random_feasible(p, 1234);
    CHECK(a.weights() == b.weights());
    Moments m = moments(a);
    CHECK(std::fabs(m.p_total - 0.73) <= 1e-13);
    CHECK(std::fabs(m.mean - 6.1) <= 1e-12);
}

TEST_CASE("random_feasible usually spreads over three or more points") {
    MomentProblem p = validate_problem(integer_grid(0, 20), 1.0, 7.0);
    int spread = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        WeightedDistribution d = random_feasible(p, seed);
        Moments m = moments(d);
        CHECK(std::fabs(m.p_total - 1.0) <= 1e-13);
        CHECK(std::fabs(m.mean - 7.0) <= 1e-12);
        for (const auto& [x, w] : d.weights()) CHECK(w >= 0.0);
        if (d.size() >= 3) ++spread;
    }
    CHECK(spread >= 900);
}

TEST_CASE("sampled expectations stay inside the oracle bracket") {
    std::mt19937_64 rng(5150);
    for (int iter = 0; iter < 100; ++iter) {
        const int K = 3 + static_cast<int>(rng() % 15);
        MomentProblem p = validate_problem(integer_grid(0, K), 1.0, 0.0);
        std::uniform_real_distribution<double> mean(0.0, static_cast<double>(K));
        p.n_bar = mean(rng);
        ObjectiveSpec obj = make_expression("sin(x/3) + x/5");
        const double lo = lp_extremal(p, obj, Direction::Min).best_value;
        const double hi = lp_extremal(p, obj, Direction::Max).best_value;
        const double v = expectation(random_feasible(p, rng()), obj);
        CHECK(v >= lo - 1e-10);
        CHECK(v <= hi + 1e-10);
    }
}

TEST_CASE("oracle agrees with the theorem solver on slope-monotone objectives") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int iter = 0; iter < 200; ++iter) {
        const int K = 3 + static_cast<int>(rng() % 48);
        std::vector<double> grid;
        double x = -10.0 + 20.0 * unif(rng);
        for (int i = 0; i < K; ++i) {
            grid.push_back(x);
            x += 0.1 + 2.0 * unif(rng);
        }
        const double pb = 0.05 + 0.95 * unif(rng);
        const double nb = grid.front() * pb + (grid.back() - grid.front()) * pb * unif(rng);
        MomentProblem p = validate_problem(grid, pb, nb);
        ObjectiveSpec obj = (iter % 2 == 0) ? make_expression("x^2 + x")
                                            : make_expression("0 - (x^2)");
        Direction dir = (rng() % 2 == 0) ? Direction::Max : Direction::Min;
        const double solver = extremal_expectation(p, obj, dir).value;
        const double oracle = lp_extremal(p, obj, dir).best_value;
        CHECK(std::fabs(solver - oracle) <= 1e-10 * std::max(1.0, std::fabs(oracle)));
    }
}
