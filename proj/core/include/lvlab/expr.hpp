#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "lvlab/error.hpp"
#include "lvlab/grid.hpp"

namespace lvlab {

/// Raised by parse(); offset() is the byte position of the offending token.
class ParseError : public InvalidArgument {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Arithmetic expression in the variables x and t.
///
/// Grammar: decimal literals (optional exponent), x, t, + - * / ^, unary -,
/// cos sin exp abs, parentheses. Precedence ^ > unary - > * / > + -; all
/// binary operators are left-associative except ^.
class Expr {
 public:
  struct Node;

  /// Throws DomainError on division by zero or any non-finite intermediate.
  double eval(double x, double t) const;

  /// Fully parenthesised text that parses back to an equivalent expression.
  std::string to_string() const;

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  friend Expr parse(std::string_view text);

  std::shared_ptr<const Node> root_;
};

Expr parse(std::string_view text);

/// Values e(x_j, t) on the grid; DomainError names the failing node index.
Field sample(const Expr& e, const Grid& g, double t);

}  // namespace lvlab
