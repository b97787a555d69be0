#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "papdiff/errors.hpp"

namespace papdiff {

// Expression tree for functions that are analytic on an open subset of R^n:
// constants, input variables, the ring operations, and the analytic
// primitives exp/log/sin/cos/div/sqrt (the latter three restricted to
// open-domain use by the guards of whatever cell the expression serves).
// Closed under symbolic differentiation. Immutable; subtrees are shared.
class AnalyticExpr {
 public:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Exp, Log, Sin, Cos, Sqrt };

  struct Node {
    Op op;
    double value = 0.0;  // Op::Const
    int var = 0;         // Op::Var, 1-based like the surface syntax x1, x2, ...
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  AnalyticExpr() = default;

  static AnalyticExpr constant(double c);
  static AnalyticExpr var(int index_1based);
  static AnalyticExpr wrap(NodePtr n) { return AnalyticExpr(std::move(n)); }

  bool valid() const { return node_ != nullptr; }
  const Node& node() const { return *node_; }
  NodePtr ptr() const { return node_; }

  // Evaluation at a point; throws DomainError on division by zero,
  // log of a nonpositive, or sqrt of a negative.
  double eval(std::span<const double> x) const;
  std::optional<double> try_eval(std::span<const double> x) const noexcept;

  // d/dx_i as a new tree. Derivatives are emitted in "local factor" shape,
  // d(op(u)) = factor(u) * du, so that evaluating the derivative of a
  // composite tree performs the same floating-point products as chaining
  // the factors of its parts.
  AnalyticExpr derivative(int var_1based) const;

  // Replace every Var k by repl[k-1].
  AnalyticExpr substitute(std::span<const AnalyticExpr> repl) const;

  int max_var() const;

  std::string str() const;

  static bool struct_equal(const AnalyticExpr& lhs, const AnalyticExpr& rhs);

  friend AnalyticExpr operator+(const AnalyticExpr&, const AnalyticExpr&);
  friend AnalyticExpr operator-(const AnalyticExpr&, const AnalyticExpr&);
  friend AnalyticExpr operator*(const AnalyticExpr&, const AnalyticExpr&);
  friend AnalyticExpr operator/(const AnalyticExpr&, const AnalyticExpr&);
  friend AnalyticExpr operator-(const AnalyticExpr&);
  friend AnalyticExpr exp(const AnalyticExpr&);
  friend AnalyticExpr log(const AnalyticExpr&);
  friend AnalyticExpr sin(const AnalyticExpr&);
  friend AnalyticExpr cos(const AnalyticExpr&);
  friend AnalyticExpr sqrt(const AnalyticExpr&);

 private:
  explicit AnalyticExpr(NodePtr n) : node_(std::move(n)) {}
  static AnalyticExpr make(Op op, AnalyticExpr a, AnalyticExpr b);
  NodePtr node_;
};

// One conjunct of an analytic set: either g(x) > 0 or g(x) <= 0.
enum class GuardSense { StrictlyPositive, Nonpositive };

struct Guard {
  AnalyticExpr expr;
  GuardSense sense;

  // A point where the guard expression is undefined never satisfies the
  // guard; cells order their guards so this is only hit off-cell.
  bool holds(std::span<const double> x) const;
  std::string str() const;
};

// Finite conjunction of guards. The empty list is the whole ambient space.
struct AnalyticSet {
  std::vector<Guard> guards;

  bool contains(std::span<const double> x) const;
  AnalyticSet substituted(std::span<const AnalyticExpr> repl) const;
  std::string str() const;

  static bool struct_equal(const AnalyticSet& lhs, const AnalyticSet& rhs);
};

}  // namespace papdiff
