#pragma once

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "exmax/core.hpp"
#include "exmax/exprlang.hpp"

namespace exmax {

/// Objective values given only at fixed support points.
struct Tabulated {
    std::map<double, double> values;
};

/// x^exponent.
struct PowerFn {
    double exponent = 2.0;
};

/// n^2 / (1 + p0), the phase-sensitivity weight of a path-symmetric state.
struct MziF {
    double p0 = 0.0;
};

/// 16*pi^2*d^2*exp(-2*pi*d) / (Delta^2*(1 - exp(-2*pi*d))) with
/// d = Delta^2*(n+1)/(4v).
struct LzjcF {
    double v = 1.0;
    double delta = 0.3;
};

struct ExpressionFn {
    expr::NodePtr ast;
};

struct ObjectiveSpec {
    std::variant<Tabulated, PowerFn, MziF, LzjcF, ExpressionFn> fn;

    /// True when the objective can be evaluated between grid points.
    bool continuous() const { return !std::holds_alternative<Tabulated>(fn); }
};

ObjectiveSpec make_tabulated(std::map<double, double> values);
ObjectiveSpec make_power(double exponent);
ObjectiveSpec make_mzi_f(double p0);
ObjectiveSpec make_lzjc_f(double v, double delta);  // requires v > 0, delta != 0
ObjectiveSpec make_expression(expr::NodePtr ast);
ObjectiveSpec make_expression(std::string_view text);

double evaluate(const ObjectiveSpec& obj, double x);

struct SlopeClass {
    enum Kind { IncreasingSlope, DecreasingSlope, Mixed };
    Kind kind = IncreasingSlope;
    /// Mixed only: strictly increasing interior grid points where the sign
    /// of the second divided difference flips.
    std::vector<double> breakpoints;
    /// Mixed only: class of the first monotone segment; segments alternate.
    Kind first = IncreasingSlope;
};

/// Sign pattern of second-order divided differences over consecutive grid
/// triples, with absolute tolerance 1e-10. Grids of length <= 2 classify as
/// IncreasingSlope by convention.
SlopeClass classify_slope(const ObjectiveSpec& obj, const std::vector<double>& grid);

inline constexpr double kSlopeTol = 1e-10;

enum class InflectionMode { Discrete, Continuous };

/// Discrete: sign-change points of the second divided difference on the
/// grid, snapped to the left grid point of the sign-change pair.
/// Continuous: roots of the central-difference second derivative, located by
/// bracketing plus bisection to 1e-8.
std::vector<double> find_inflections(const ObjectiveSpec& obj, double lo, double hi,
                                     InflectionMode mode,
                                     const std::vector<double>* grid = nullptr);

}  // namespace exmax
