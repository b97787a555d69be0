#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "papdiff/expr.hpp"
#include "papdiff/primitives.hpp"

namespace papdiff {

// 1 x N row of partial derivatives, finite for in-domain evaluation.
using JacobianRow = std::vector<double>;

// Structural-recursion symbolic differentiation: constants give the zero
// row, inputs give basis rows, calls contract the primitive's designated
// derivative row against the argument rows, and a conditional takes the row
// of whichever branch its guard selects.
JacobianRow symbolic_jacobian(const Program& prog, std::span<const double> v);

// Forward-mode carrier.
struct Dual {
  double primal = 0.0;
  double tangent = 0.0;
};

// Jacobian-vector product via dual-number propagation; the row is never
// materialised. Primitive tangents come from primitive_ideriv.
double jvp(const Program& prog, std::span<const double> v, std::span<const double> w);

// Reverse-mode node: operation id, argument indices, primal value, local
// derivative row. Conditionals do not record a node; the branch taken is
// kept in Tape::branch_choices.
struct TapeNode {
  enum class Kind { Constant, Input, Call };
  Kind kind = Kind::Constant;
  int input_index = 0;             // Kind::Input
  const Primitive* prim = nullptr; // Kind::Call
  std::vector<std::size_t> args;   // tape indices of the arguments
  double primal = 0.0;
  std::vector<double> local_row;
};

struct Tape {
  std::vector<TapeNode> nodes;               // topological order
  std::vector<std::uint8_t> branch_choices;  // 1 = then-branch, per conditional hit
  std::size_t result = 0;
};

Tape record_tape(const Program& prog, std::span<const double> v);

// One reverse sweep; each node's adjoint is distributed to its arguments
// exactly once.
std::vector<double> tape_vjp(const Tape& tape, int arity, double u);

// Vector-Jacobian product u * D~[[e]]v by tape replay.
std::vector<double> vjp(const Program& prog, std::span<const double> v, double u);

inline constexpr int kMaxDerivativeOrder = 6;

// k-th order directional derivative along dirs, by nesting forward mode.
// k = 0 is plain evaluation, k = 1 is jvp; higher orders evaluate the
// selected piece components of each primitive on nested dual numbers, with
// all piece and branch selections made at the primal point.
double nth_derivative(const Program& prog, std::span<const double> v, int k,
                      std::span<const std::vector<double>> dirs);

}  // namespace papdiff
