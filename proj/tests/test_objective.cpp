#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "exmax/objective.hpp"

using namespace exmax;

static std::vector<double> integer_grid(int lo, int hi) {
    std::vector<double> g;
    for (int n = lo; n <= hi; ++n) g.push_back(n);
    return g;
}

TEST_CASE("evaluate on the builtin catalog") {
    CHECK(evaluate(make_power(2.0), 3.0) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(evaluate(make_power(0.5), 4.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(evaluate(make_mzi_f(0.0), 3.0) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(evaluate(make_mzi_f(1.0), 3.0) == doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("tabulated objectives only know their own points") {
    ObjectiveSpec tab = make_tabulated({{0.0, 1.0}, {1.0, 2.0}});
    CHECK(evaluate(tab, 1.0) == 2.0);
    try {
        evaluate(tab, 0.5);
        FAIL("expected OutOfDomain");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::OutOfDomain);
    }
    CHECK_FALSE(tab.continuous());
    CHECK(make_power(2).continuous());
}

TEST_CASE("expression objectives evaluate through the parser") {
    ObjectiveSpec obj = make_expression("x^2 - 3*x");
    CHECK(evaluate(obj, 2.0) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("swept-coupling transition weight rises to a peak near 10 then falls") {
    ObjectiveSpec f = make_lzjc_f(1.0, 0.3);
    int argmax = 0;
    double best = -1.0;
    for (int n = 0; n <= 100; ++n) {
        const double v = evaluate(f, n);
        CHECK(v > 0.0);
        if (v > best) {
            best = v;
            argmax = n;
        }
    }
    CHECK(argmax == 10);
    CHECK(evaluate(f, 20.0) > evaluate(f, 100.0));
    CHECK(evaluate(f, 20.0) < evaluate(f, 11.0));
    CHECK(evaluate(f, 0.0) < evaluate(f, 11.0));
    // tail decays monotonically
    for (int n = 90; n < 100; ++n) CHECK(evaluate(f, n + 1) < evaluate(f, n));
}

TEST_CASE("builtin parameter validation") {
    CHECK_THROWS_AS(make_lzjc_f(0.0, 0.3), Error);
    CHECK_THROWS_AS(make_lzjc_f(1.0, 0.0), Error);
}

TEST_CASE("classify_slope on pure classes") {
    CHECK(classify_slope(make_power(2.0), integer_grid(0, 10)).kind ==
          SlopeClass::IncreasingSlope);
    ObjectiveSpec sq = make_tabulated({{0.0, 0.0}, {1.0, 1.0}, {4.0, 2.0}, {9.0, 3.0}});
    CHECK(classify_slope(sq, {0, 1, 4, 9}).kind == SlopeClass::DecreasingSlope);
    // affine objectives classify as increasing by convention
    CHECK(classify_slope(make_expression("2*x + 1"), integer_grid(0, 10)).kind ==
          SlopeClass::IncreasingSlope);
    // short grids classify as increasing by convention
    CHECK(classify_slope(make_power(2.0), {0, 1}).kind == SlopeClass::IncreasingSlope);
}

TEST_CASE("classify_slope flags the swept-coupling weight as mixed at 20") {
    SlopeClass cls = classify_slope(make_lzjc_f(1.0, 0.3), integer_grid(0, 100));
    REQUIRE(cls.kind == SlopeClass::Mixed);
    REQUIRE(cls.breakpoints.size() == 1);
    CHECK(cls.breakpoints[0] == 20.0);
    CHECK(cls.first == SlopeClass::DecreasingSlope);
}

TEST_CASE("classification is invariant under positive affine transforms") {
    std::vector<double> grid = integer_grid(0, 100);
    ObjectiveSpec base = make_lzjc_f(1.0, 0.3);
    std::map<double, double> scaled;
    for (double x : grid) scaled[x] = 3.5 * evaluate(base, x) - 7.0;
    SlopeClass a = classify_slope(base, grid);
    SlopeClass b = classify_slope(make_tabulated(std::move(scaled)), grid);
    CHECK(a.kind == b.kind);
    CHECK(a.breakpoints == b.breakpoints);
    CHECK(a.first == b.first);
}

TEST_CASE("sub-intervals between breakpoints classify pure and alternate") {
    std::vector<double> grid = integer_grid(0, 100);
    SlopeClass cls = classify_slope(make_lzjc_f(1.0, 0.3), grid);
    REQUIRE(cls.kind == SlopeClass::Mixed);
    std::vector<double> bounds = {grid.front()};
    bounds.insert(bounds.end(), cls.breakpoints.begin(), cls.breakpoints.end());
    bounds.push_back(grid.back());
    SlopeClass::Kind expect = cls.first;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        std::vector<double> sub;
        for (double x : grid)
            if (x >= bounds[i] && x <= bounds[i + 1]) sub.push_back(x);
        CHECK(classify_slope(make_lzjc_f(1.0, 0.3), sub).kind == expect);
        expect = expect == SlopeClass::IncreasingSlope ? SlopeClass::DecreasingSlope
                                                       : SlopeClass::IncreasingSlope;
    }
}

TEST_CASE("find_inflections in continuous mode") {
    ObjectiveSpec cubic = make_expression("x^3 - 3*x");
    std::vector<double> roots = find_inflections(cubic, -2.0, 2.0, InflectionMode::Continuous);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == doctest::Approx(0.0).epsilon(1e-6));

    std::vector<double> lz =
        find_inflections(make_lzjc_f(1.0, 0.3), 0.0, 100.0, InflectionMode::Continuous);
    REQUIRE(lz.size() == 1);
    CHECK(lz[0] == doctest::Approx(20.8296).epsilon(1e-4));

    CHECK(find_inflections(make_power(2.0), 0.0, 10.0, InflectionMode::Continuous).empty());
}

TEST_CASE("find_inflections in discrete mode snaps left") {
    std::vector<double> grid = integer_grid(0, 100);
    std::vector<double> pts =
        find_inflections(make_lzjc_f(1.0, 0.3), 0.0, 100.0, InflectionMode::Discrete, &grid);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0] == 20.0);
}
