#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topo/types.hpp"

namespace topo {

/// Syntax error, unknown identifier or arity mismatch, with the byte offset
/// into the source text.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace expr {

enum class Op { Number, Variable, Constant, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Fn { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Ln, Sqrt, Atan2 };

struct Node {
  Op op = Op::Number;
  double value = 0;  // Number literal, or the resolved value of a Constant
  int index = 0;     // Variable slot
  Fn fn = Fn::Sin;
  std::string name;  // Variable / Constant / Call spelling
  std::vector<std::shared_ptr<const Node>> args;
};

}  // namespace expr

/// Immutable parsed expression. Cheap to copy.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right associative
///   primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
class Expression {
 public:
  Expression() = default;
  explicit Expression(std::shared_ptr<const expr::Node> root) : root_(std::move(root)) {}

  double evaluate(std::span<const double> vars) const;
  /// Canonical text with minimal parentheses; parsing it back yields an equal tree.
  std::string print() const;
  const expr::Node& root() const { return *root_; }
  bool empty() const { return !root_; }

  /// True if the expression references no variable.
  bool is_constant() const;
  friend bool operator==(const Expression& a, const Expression& b);

 private:
  std::shared_ptr<const expr::Node> root_;
};

/// Variables are bound to slots in order; `pi` is always available, and
/// `constants` adds further named values (resolved at parse time).
Expression parse_expression(std::string_view text, const std::vector<std::string>& variables,
                            const std::map<std::string, double>& constants = {});

}  // namespace topo
