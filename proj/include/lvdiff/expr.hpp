#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lvdiff/errors.hpp"
#include "lvdiff/grid.hpp"

namespace lvdiff {

class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, int column)
        : ConfigError(what + " at column " + std::to_string(column)), column_(column) {}
    int column() const noexcept { return column_; }

private:
    int column_;
};

struct ExprNode {
    enum class Kind { constant, x, y, add, sub, mul, div, neg, pow, call };
    Kind kind = Kind::constant;
    double value = 0.0;
    std::string name;  // function name for calls
    std::vector<std::shared_ptr<const ExprNode>> args;
};

bool operator==(const ExprNode& a, const ExprNode& b);

/// Arithmetic over x, y and constants: + - * / ^ (constant exponent), unary
/// minus, sin cos exp abs max min, and the constant pi.
class Expr {
public:
    explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

    double evaluate(double x, double y = 0.0) const;
    /// Throws ConfigError on division by zero or a non-finite value at any node.
    ScalarField sample(const Grid& grid) const;
    /// Fully parenthesized form that parses back to the same tree.
    std::string to_string() const;
    const ExprNode& root() const { return *root_; }

    bool operator==(const Expr& o) const { return *root_ == *o.root_; }

private:
    std::shared_ptr<const ExprNode> root_;
};

/// Recursive descent. Errors carry a 1-based column.
Expr parse_expression(const std::string& src);

}  // namespace lvdiff
