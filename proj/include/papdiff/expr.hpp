#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "papdiff/errors.hpp"

namespace papdiff {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Abstract syntax of the expression language: a constant, an input variable,
// a primitive application, or a guarded conditional. Trees are immutable and
// freely shared.
struct Expr {
  struct Const {
    double value;
  };
  struct Input {
    int index;  // 1-based
  };
  struct Call {
    std::string prim;
    std::vector<ExprPtr> args;
  };
  struct Cond {
    ExprPtr guard;
    ExprPtr then_branch;
    ExprPtr else_branch;
  };
  std::variant<Const, Input, Call, Cond> node;
};

ExprPtr make_const(double value);
ExprPtr make_input(int index);
ExprPtr make_call(std::string prim, std::vector<ExprPtr> args);
ExprPtr make_cond(ExprPtr guard, ExprPtr then_branch, ExprPtr else_branch);

// A program is an expression together with its declared input arity N.
struct Program {
  ExprPtr root;
  int arity = 0;
};

// Grammar (whitespace-insensitive, prefix calls, no operator precedence):
//   expr ::= NUMBER | VAR | IDENT "(" expr { "," expr } ")"
//          | "if" "(" expr ">" "0" ")" expr "else" expr
//   VAR  ::= "x" DIGITS     (1-based input index)
// Raises ParseError with a position, UnknownPrimitiveError, or
// std::invalid_argument for arity violations.
Program parse(const std::string& text, int arity);

// Canonical surface form; parse(to_string(p), p.arity) reproduces the tree.
std::string to_string(const Program& prog);
std::string to_string(const ExprPtr& e);

// Structural checks usable on hand-built trees: primitive names registered,
// call arities correct, input indices within the declared arity.
void validate(const Program& prog);

// Observability hooks for evaluation: primitive application count, the
// branch taken at each conditional, and the piece index each primitive call
// selected in its piece table. The latter two form the branch signature used
// by gradcheck failure forensics.
struct EvalTrace {
  std::uint64_t primitive_calls = 0;
  std::vector<std::uint8_t> branches;
  std::vector<std::uint8_t> piece_ids;

  bool same_path(const EvalTrace& other) const {
    return branches == other.branches && piece_ids == other.piece_ids;
  }
};

// Denotational evaluation. The guard selects the then-branch iff it is
// strictly positive; exactly one branch is evaluated. Domain violations
// raise DomainError rather than producing NaN.
double eval(const Program& prog, std::span<const double> v);
double eval(const Program& prog, std::span<const double> v, EvalTrace& trace);
// Subtree evaluation without the arity/finiteness entry checks.
double eval(const ExprPtr& e, std::span<const double> v);

// Input vectors must have length N and finite entries.
void check_input(const Program& prog, std::span<const double> v);

}  // namespace papdiff
