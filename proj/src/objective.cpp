#include "exmax/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace exmax {

ObjectiveSpec make_tabulated(std::map<double, double> values) {
    return ObjectiveSpec{Tabulated{std::move(values)}};
}

ObjectiveSpec make_power(double exponent) { return ObjectiveSpec{PowerFn{exponent}}; }

ObjectiveSpec make_mzi_f(double p0) {
    if (p0 < 0.0 || p0 > 1.0) throw Error(Errc::OutOfDomain, "p0 must lie in [0, 1]");
    return ObjectiveSpec{MziF{p0}};
}

ObjectiveSpec make_lzjc_f(double v, double delta) {
    if (!(v > 0.0)) throw Error(Errc::OutOfDomain, "sweep speed v must be positive");
    if (delta == 0.0) throw Error(Errc::OutOfDomain, "level splitting delta must be nonzero");
    return ObjectiveSpec{LzjcF{v, delta}};
}

ObjectiveSpec make_expression(expr::NodePtr ast) { return ObjectiveSpec{ExpressionFn{std::move(ast)}}; }

ObjectiveSpec make_expression(std::string_view text) {
    return ObjectiveSpec{ExpressionFn{expr::parse(text)}};
}

double evaluate(const ObjectiveSpec& obj, double x) {
    return std::visit(
        [x](const auto& fn) -> double {
            using T = std::decay_t<decltype(fn)>;
            if constexpr (std::is_same_v<T, Tabulated>) {
                auto it = fn.values.find(x);
                if (it == fn.values.end()) {
                    std::ostringstream msg;
                    msg << "tabulated objective has no value at x = " << x;
                    throw Error(Errc::OutOfDomain, msg.str());
                }
                return it->second;
            } else if constexpr (std::is_same_v<T, PowerFn>) {
                return std::pow(x, fn.exponent);
            } else if constexpr (std::is_same_v<T, MziF>) {
                return x * x / (1.0 + fn.p0);
            } else if constexpr (std::is_same_v<T, LzjcF>) {
                const double d = fn.delta * fn.delta * (x + 1.0) / (4.0 * fn.v);
                if (d == 0.0) return 0.0;
                const double t = std::exp(-2.0 * std::numbers::pi * d);
                return 16.0 * std::numbers::pi * std::numbers::pi * d * d * t /
                       (fn.delta * fn.delta * (1.0 - t));
            } else {
                return expr::eval_expr(fn.ast, x);
            }
        },
        obj.fn);
}

namespace {

// Signs of second divided differences, middle-indexed: entry i corresponds
// to the triple (grid[i-1], grid[i], grid[i+1]), i = 1..K-2.
std::vector<int> slope_signs(const ObjectiveSpec& obj, const std::vector<double>& grid) {
    std::vector<int> signs;
    signs.reserve(grid.size());
    double prev_slope = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double slope = (evaluate(obj, grid[i + 1]) - evaluate(obj, grid[i])) /
                       (grid[i + 1] - grid[i]);
        if (i > 0) {
            double d = slope - prev_slope;
            signs.push_back(d > kSlopeTol ? 1 : d < -kSlopeTol ? -1 : 0);
        }
        prev_slope = slope;
    }
    // Flat runs inherit the class of their lower-x neighbor; a flat prefix
    // inherits the first definite sign, and a fully flat objective counts
    // as increasing slope.
    int last = 0;
    for (int& s : signs) {
        if (s == 0)
            s = last;
        else
            last = s;
    }
    int first = 0;
    for (int s : signs)
        if (s != 0) {
            first = s;
            break;
        }
    if (first == 0) first = 1;
    for (int& s : signs) {
        if (s == 0)
            s = first;
        else
            break;
    }
    return signs;
}

}  // namespace

SlopeClass classify_slope(const ObjectiveSpec& obj, const std::vector<double>& grid) {
    if (grid.size() <= 2) return SlopeClass{SlopeClass::IncreasingSlope, {}, SlopeClass::IncreasingSlope};
    std::vector<int> signs = slope_signs(obj, grid);
    bool any_pos = false, any_neg = false;
    for (int s : signs) (s > 0 ? any_pos : any_neg) = true;
    if (!any_neg) return SlopeClass{SlopeClass::IncreasingSlope, {}, SlopeClass::IncreasingSlope};
    if (!any_pos) return SlopeClass{SlopeClass::DecreasingSlope, {}, SlopeClass::DecreasingSlope};
    SlopeClass out;
    out.kind = SlopeClass::Mixed;
    out.first = signs.front() > 0 ? SlopeClass::IncreasingSlope : SlopeClass::DecreasingSlope;
    for (std::size_t i = 0; i + 1 < signs.size(); ++i) {
        if (signs[i] != signs[i + 1]) out.breakpoints.push_back(grid[i + 1]);  // middle of triple i
    }
    return out;
}

std::vector<double> find_inflections(const ObjectiveSpec& obj, double lo, double hi,
                                     InflectionMode mode, const std::vector<double>* grid) {
    if (!(lo < hi)) throw Error(Errc::OutOfDomain, "find_inflections requires lo < hi");
    if (mode == InflectionMode::Discrete) {
        if (grid == nullptr) throw Error(Errc::OutOfDomain, "discrete inflections need a grid");
        std::vector<double> sub;
        for (double x : *grid)
            if (x >= lo && x <= hi) sub.push_back(x);
        SlopeClass cls = classify_slope(obj, sub);
        return cls.breakpoints;
    }

    // Continuous: bracket sign changes of the central-difference second
    // derivative on a uniform scan, then bisect to 1e-8.
    const double h = (hi - lo) * 1e-5;
    auto second = [&](double x) {
        return evaluate(obj, x - h) - 2.0 * evaluate(obj, x) + evaluate(obj, x + h);
    };
    const int scan = 2000;
    const double a = lo + h, b = hi - h;
    std::vector<double> roots;
    double prev_x = a, prev_v = second(a);
    for (int i = 1; i <= scan; ++i) {
        double x = a + (b - a) * i / scan;
        double v = second(x);
        if (v == 0.0 && prev_v != 0.0) {
            roots.push_back(x);
        } else if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
            double left = prev_x, right = x, fl = prev_v;
            while (right - left > 1e-8) {
                double mid = 0.5 * (left + right);
                double fm = second(mid);
                if ((fl < 0.0) == (fm < 0.0)) {
                    left = mid;
                    fl = fm;
                } else {
                    right = mid;
                }
            }
            roots.push_back(0.5 * (left + right));
        }
        prev_x = x;
        prev_v = v;
    }
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double p, double q) { return std::fabs(p - q) < 1e-7; }),
                roots.end());
    return roots;
}

}  // namespace exmax
