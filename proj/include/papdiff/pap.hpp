#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "papdiff/analytic.hpp"

namespace papdiff {

struct Program;  // expr.hpp

// One piece of a piecewise representation: an analytic cell and the analytic
// component applied on it. The component must be defined on an open superset
// of the cell.
struct PapPiece {
  AnalyticSet cell;
  std::vector<AnalyticExpr> component;  // length = output_dim
};

// Finite piecewise-analytic representation gamma = {<A^i, f^i>}. The cells
// partition the domain; evaluation picks the unique containing piece.
// Empty cells are permitted and retained by the algebra below.
struct PapRepr {
  int input_dim = 0;
  int output_dim = 0;
  std::vector<PapPiece> pieces;

  // Number of pieces whose cell contains x (partition diagnostics).
  std::size_t containing_count(std::span<const double> x) const;
  // Index of the unique containing piece; NoPieceError / MultiplePiecesError
  // otherwise.
  std::size_t find_piece(std::span<const double> x) const;
};

// [[gamma]](x): evaluate the unique containing piece's component at x.
std::vector<double> repr_eval(const PapRepr& gamma, std::span<const double> x);

// Intensional derivative D(gamma): same cells, components replaced by the
// symbolic Jacobian of each analytic component, flattened row-major, so the
// output dimension becomes m*n.
PapRepr repr_derivative(const PapRepr& gamma);

// Composition of representations: cells {x | x in A^i and f^i(x) in B^j},
// components g^j o f^i, enumerated with the f-piece index outermost.
// Piece count is |f.pieces| * |g.pieces|.
PapRepr compose(const PapRepr& g, const PapRepr& f);

// Conditional composition: pieces indexed by (i, j, k, l) with cells
// A^i_l ∧ B^j ∧ C^k, where A^i_1 carries the guard f^i > 0 and A^i_0 the
// guard f^i <= 0; the component is g^j when l = 1 and h^k when l = 0.
PapRepr cond_compose(const PapRepr& guard, const PapRepr& then_repr,
                     const PapRepr& else_repr);

// Refinement with a partition B: {<A^i ∧ B^j, f^i>}, components unchanged.
PapRepr refine(const PapRepr& gamma, std::span<const AnalyticSet> parts);

// Pair each piece of every part against the others: cells intersected,
// components concatenated. All parts must share input_dim.
PapRepr tuple_repr(std::span<const PapRepr> parts);

// Inductive construction of a representation for a whole program:
// constants and inputs get the trivial partition, calls compose the
// primitive's piece table with the tupled argument representations, and
// conditionals use cond_compose.
PapRepr expr_to_repr(const Program& prog);

// Upper bound on the piece count expr_to_repr would materialise, saturating
// at UINT64_MAX.
std::uint64_t predicted_piece_count(const Program& prog);

// Optional pass dropping pieces whose guard list is syntactically
// contradictory (a constant guard that fails, or the same expression
// required both > 0 and <= 0). Deciding emptiness in general is not
// attempted; the algebra keeps empty cells unless this is called.
PapRepr prune_contradictory(const PapRepr& gamma);

}  // namespace papdiff
