#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "exmax/core.hpp"

namespace exmax::expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class NodeKind { Number, Variable, Constant, Unary, Binary, Call };

struct Node {
    NodeKind kind;
    double number = 0.0;      // Number
    std::string name;         // Constant ("pi", "e") or Call function name
    char op = 0;              // Binary: + - * / ^ ; Unary: -
    NodePtr lhs, rhs;         // Binary; Unary/Call use lhs only
};

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t offset, const std::string& expected)
        : std::runtime_error("parse error at offset " + std::to_string(offset) + ": expected " +
                             expected),
          offset_(offset),
          expected_(expected) {}
    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }

  private:
    std::size_t offset_;
    std::string expected_;
};

class UnknownIdentifier : public ParseError {
  public:
    UnknownIdentifier(std::size_t offset, const std::string& name)
        : ParseError(offset, "known identifier (got '" + name + "')") {}
};

/// Parses the expression grammar: precedence unary-neg > ^ > * / > + -,
/// with ^ right-associative, one free variable "x", constants pi and e, and
/// calls exp, ln, sqrt, abs, sin, cos. Whitespace is insignificant.
NodePtr parse(std::string_view text);

/// Evaluates with IEEE double semantics. Throws Error(ExpressionDomain) for
/// ln/sqrt of a negative argument, ln(0), and division by zero.
double eval_expr(const NodePtr& ast, double x);

/// Prints a form that re-parses to a structurally equal AST.
std::string to_string(const NodePtr& ast);

bool structurally_equal(const NodePtr& a, const NodePtr& b);

}  // namespace exmax::expr
