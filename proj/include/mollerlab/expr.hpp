#pragma once

#include "mollerlab/types.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mollerlab {

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t offset);
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class ExprKind { number, var_t, var_x, pi, neg, add, sub, mul, div, pow, call };
enum class ExprFunc { sin, cos, tan, exp, log, sqrt, tanh };

struct ExprNode {
  ExprKind kind = ExprKind::number;
  double value = 0.0;
  ExprFunc func = ExprFunc::sin;
  std::size_t offset = 0;
  std::vector<std::shared_ptr<const ExprNode>> args;
};

// Immutable arithmetic expression in t and x.
class Expr {
 public:
  explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

  // Throws DomainError naming the byte offset of the failing node.
  [[nodiscard]] double eval(double t, double x) const;
  // Fully parenthesized form that reparses to the same tree.
  [[nodiscard]] std::string print() const;
  [[nodiscard]] bool depends_on_t() const;
  [[nodiscard]] ScalarFn as_fn() const;
  [[nodiscard]] const ExprNode& root() const { return *root_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const ExprNode> root_;
};

Expr parse_expr(std::string_view source);

}  // namespace mollerlab
