#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>

// A small arithmetic language for user-defined operators, distances and
// comparison functions.
//
//   expr    := term { ("+" | "-") term }
//   term    := unary { ("*" | "/") unary }
//   unary   := "-" unary | power
//   power   := primary [ "^" unary ]            (right-associative)
//   primary := number | variable | call | "(" expr ")"
//   call    := ("abs" | "sqrt" | "exp" | "log") "(" expr ")"
//            | ("min" | "max") "(" expr "," expr { "," expr } ")"
//
// Variables depend on where the expression is used:
//   operator f(x1..xk) on R^m:  xj is the current output coordinate of the
//                                j-th argument, xj_c its c-th coordinate
//   distance d(u, v) on R^m:    u1..um, v1..vm
//   comparison function phi(t): t

namespace presic::dsl {

struct OperatorContext {
    std::size_t arity = 1;
    std::size_t dimension = 1;
};
struct MetricContext {
    std::size_t dimension = 1;
};
struct PhiContext {};

using Context = std::variant<OperatorContext, MetricContext, PhiContext>;

/// Number of variable slots an environment must supply for `context`.
std::size_t slot_count(const Context& context);

struct Node;

/// Immutable compiled expression; cheap to copy and safe to share between threads.
class Expr {
public:
    Expr() = default;

    /// Evaluates with `vars` laid out as slot_count(context) doubles. `lane` is
    /// the output coordinate used to resolve bare operator variables `xj`.
    double eval(std::span<const double> vars, std::size_t lane = 0) const;

    /// Canonical fully parenthesised rendering.
    std::string format() const;

    const std::string& source() const noexcept { return source_; }
    bool empty() const noexcept { return root_ == nullptr; }

private:
    friend Expr parse(std::string_view, const Context&);
    Expr(std::shared_ptr<const Node> root, std::string source, std::size_t slots)
        : root_(std::move(root)), source_(std::move(source)), slots_(slots) {}

    std::shared_ptr<const Node> root_;
    std::string source_;
    std::size_t slots_ = 0;
};

/// Throws DslError on syntax errors, unknown identifiers and out-of-range
/// variable indices.
Expr parse(std::string_view source, const Context& context);

/// Shortest decimal text that reads back to exactly `value`.
std::string format_number(double value);

} // namespace presic::dsl
