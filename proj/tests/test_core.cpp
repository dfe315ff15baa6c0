#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "exmax/core.hpp"

using namespace exmax;

TEST_CASE("validate_problem accepts feasible inputs") {
    MomentProblem p = validate_problem({0, 1, 2, 3}, 0.8, 1.0);
    CHECK(p.grid.size() == 4);
    CHECK(p.p_bar == 0.8);
    CHECK(p.n_bar == 1.0);
}

TEST_CASE("validate_problem accepts a singleton grid") {
    MomentProblem p = validate_problem({5}, 1.0, 5.0);
    CHECK(p.grid == std::vector<double>{5});
}

TEST_CASE("validate_problem accepts boundary means") {
    CHECK_NOTHROW(validate_problem({0, 1, 2}, 0.5, 0.0));
    CHECK_NOTHROW(validate_problem({0, 1, 2}, 0.5, 1.0));
}

TEST_CASE("validate_problem rejects bad inputs") {
    CHECK_THROWS_AS(validate_problem({0, 1, 2}, 1.0, 2.5), Error);
    try {
        validate_problem({0, 1, 2}, 1.0, 2.5);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InfeasibleMean);
    }
    try {
        validate_problem({0, 2, 1}, 1.0, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonMonotonicGrid);
    }
    try {
        validate_problem({0, 1, 1}, 1.0, 1.0);  // duplicates rejected, not merged
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonMonotonicGrid);
    }
    try {
        validate_problem({0, 1}, 0.0, 0.0);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BudgetOutOfRange);
    }
    try {
        validate_problem({0, 1}, 1.5, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BudgetOutOfRange);
    }
}

TEST_CASE("validate_problem is idempotent") {
    MomentProblem p = validate_problem({0, 1, 2, 3}, 0.8, 1.0);
    MomentProblem q = validate_problem(p.grid, p.p_bar, p.n_bar);
    CHECK(q.grid == p.grid);
    CHECK(q.p_bar == p.p_bar);
    CHECK(q.n_bar == p.n_bar);
}

TEST_CASE("moments sums weights and the un-normalized first moment") {
    WeightedDistribution d;
    d.add(0.0, 0.5);
    d.add(2.0, 0.5);
    Moments m = moments(d);
    CHECK(m.p_total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-15));

    WeightedDistribution e;
    e.add(1.0, 0.6);
    e.add(2.0, 0.2);
    Moments me = moments(e);
    CHECK(me.p_total == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(me.mean == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("moments rejects the empty distribution") {
    WeightedDistribution d;
    try {
        moments(d);
        FAIL("expected EmptyDistribution");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyDistribution);
    }
}

TEST_CASE("add drops zero increments and merges repeated points") {
    WeightedDistribution d;
    d.add(1.0, 0.0);
    CHECK(d.empty());
    d.add(1.0, 0.25);
    d.add(1.0, 0.25);
    CHECK(d.size() == 1);
    CHECK(d.weights().at(1.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("errc_name covers every code") {
    CHECK(std::string(errc_name(Errc::NonMonotonicGrid)) == "NonMonotonicGrid");
    CHECK(std::string(errc_name(Errc::InfeasibleMean)) == "InfeasibleMean");
    CHECK(std::string(errc_name(Errc::NoFeasibleAllocation)) == "NoFeasibleAllocation");
}
