#pragma once

// Small arithmetic grammar for operands and dynamics in problem files:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('-' | '+') unary | power
//   power  := atom ('^' unary)?            right-associative
//   atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Names are t, x1..xn, u1..um and the constants pi and e. Functions: sin cos
// tan exp log sqrt abs tanh sinh cosh atan, and pow min max of two arguments.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace frachjb {

class ExpressionError : public std::invalid_argument {
public:
    ExpressionError(const std::string& what, std::size_t column)
        : std::invalid_argument(what + " at column " + std::to_string(column)), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class Expression {
public:
    /// Parses text with n_states states and n_controls controls in scope.
    /// allow_controls = false rejects u references (terminal operands).
    static Expression parse(const std::string& text, std::size_t n_states, std::size_t n_controls,
                            bool allow_controls = true);

    double operator()(double t, std::span<const double> x, std::span<const double> u) const;

    const std::string& text() const noexcept { return text_; }
    bool uses_controls() const noexcept { return uses_controls_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
    bool uses_controls_ = false;
};

}  // namespace frachjb
