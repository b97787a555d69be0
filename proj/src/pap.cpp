#include "papdiff/pap.hpp"

#include <limits>
#include <stdexcept>

#include "papdiff/expr.hpp"
#include "papdiff/primitives.hpp"

namespace papdiff {

std::size_t PapRepr::containing_count(std::span<const double> x) const {
  std::size_t n = 0;
  for (const PapPiece& p : pieces)
    if (p.cell.contains(x)) ++n;
  return n;
}

std::size_t PapRepr::find_piece(std::span<const double> x) const {
  constexpr auto npos = std::numeric_limits<std::size_t>::max();
  std::size_t found = npos;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!pieces[i].cell.contains(x)) continue;
    if (found != npos)
      throw MultiplePiecesError("pieces " + std::to_string(found) + " and " +
                                std::to_string(i) + " both contain the point");
    found = i;
  }
  if (found == npos) throw NoPieceError("no piece cell contains the point");
  return found;
}

std::vector<double> repr_eval(const PapRepr& gamma, std::span<const double> x) {
  const PapPiece& piece = gamma.pieces[gamma.find_piece(x)];
  std::vector<double> out;
  out.reserve(piece.component.size());
  for (const AnalyticExpr& c : piece.component) out.push_back(c.eval(x));
  return out;
}

PapRepr repr_derivative(const PapRepr& gamma) {
  PapRepr out;
  out.input_dim = gamma.input_dim;
  out.output_dim = gamma.output_dim * gamma.input_dim;
  out.pieces.reserve(gamma.pieces.size());
  for (const PapPiece& p : gamma.pieces) {
    PapPiece dp;
    dp.cell = p.cell;  // cells carry over untouched
    dp.component.reserve(p.component.size() * gamma.input_dim);
    for (const AnalyticExpr& c : p.component)
      for (int j = 1; j <= gamma.input_dim; ++j) dp.component.push_back(c.derivative(j));
    out.pieces.push_back(std::move(dp));
  }
  return out;
}

namespace {

PapPiece composed_piece(const PapPiece& fp, const PapPiece& gp) {
  PapPiece out;
  out.cell.guards = fp.cell.guards;
  const std::span<const AnalyticExpr> repl(fp.component);
  const AnalyticSet inner = gp.cell.substituted(repl);
  out.cell.guards.insert(out.cell.guards.end(), inner.guards.begin(), inner.guards.end());
  out.component.reserve(gp.component.size());
  for (const AnalyticExpr& g : gp.component) out.component.push_back(g.substitute(repl));
  return out;
}

}  // namespace

PapRepr compose(const PapRepr& g, const PapRepr& f) {
  if (f.output_dim != g.input_dim)
    throw std::invalid_argument("compose: inner output dim " +
                                std::to_string(f.output_dim) + " != outer input dim " +
                                std::to_string(g.input_dim));
  PapRepr out;
  out.input_dim = f.input_dim;
  out.output_dim = g.output_dim;
  out.pieces.reserve(f.pieces.size() * g.pieces.size());
  for (const PapPiece& fp : f.pieces)
    for (const PapPiece& gp : g.pieces) out.pieces.push_back(composed_piece(fp, gp));
  return out;
}

PapRepr cond_compose(const PapRepr& guard, const PapRepr& then_repr,
                     const PapRepr& else_repr) {
  if (guard.input_dim != then_repr.input_dim || guard.input_dim != else_repr.input_dim)
    throw std::invalid_argument("cond_compose: input dims differ");
  if (guard.output_dim != 1)
    throw std::invalid_argument("cond_compose: guard must be scalar-valued");
  if (then_repr.output_dim != else_repr.output_dim)
    throw std::invalid_argument("cond_compose: branch output dims differ");

  PapRepr out;
  out.input_dim = guard.input_dim;
  out.output_dim = then_repr.output_dim;
  out.pieces.reserve(2 * guard.pieces.size() * then_repr.pieces.size() *
                     else_repr.pieces.size());
  for (const PapPiece& gp : guard.pieces) {
    for (const PapPiece& tp : then_repr.pieces) {
      for (const PapPiece& ep : else_repr.pieces) {
        for (int branch = 1; branch >= 0; --branch) {
          PapPiece piece;
          piece.cell.guards = gp.cell.guards;
          piece.cell.guards.push_back(
              {gp.component[0], branch ? GuardSense::StrictlyPositive
                                       : GuardSense::Nonpositive});
          piece.cell.guards.insert(piece.cell.guards.end(), tp.cell.guards.begin(),
                                   tp.cell.guards.end());
          piece.cell.guards.insert(piece.cell.guards.end(), ep.cell.guards.begin(),
                                   ep.cell.guards.end());
          piece.component = branch ? tp.component : ep.component;
          out.pieces.push_back(std::move(piece));
        }
      }
    }
  }
  return out;
}

PapRepr refine(const PapRepr& gamma, std::span<const AnalyticSet> parts) {
  PapRepr out;
  out.input_dim = gamma.input_dim;
  out.output_dim = gamma.output_dim;
  out.pieces.reserve(gamma.pieces.size() * parts.size());
  for (const PapPiece& p : gamma.pieces) {
    for (const AnalyticSet& b : parts) {
      PapPiece piece;
      piece.cell.guards = p.cell.guards;
      piece.cell.guards.insert(piece.cell.guards.end(), b.guards.begin(), b.guards.end());
      piece.component = p.component;
      out.pieces.push_back(std::move(piece));
    }
  }
  return out;
}

PapRepr tuple_repr(std::span<const PapRepr> parts) {
  if (parts.empty()) throw std::invalid_argument("tuple_repr: no parts");
  PapRepr out;
  out.input_dim = parts[0].input_dim;
  out.output_dim = 0;
  out.pieces.push_back(PapPiece{});
  for (const PapRepr& part : parts) {
    if (part.input_dim != out.input_dim)
      throw std::invalid_argument("tuple_repr: input dims differ");
    PapRepr next;
    next.input_dim = out.input_dim;
    next.output_dim = out.output_dim + part.output_dim;
    next.pieces.reserve(out.pieces.size() * part.pieces.size());
    for (const PapPiece& acc : out.pieces) {
      for (const PapPiece& q : part.pieces) {
        PapPiece piece;
        piece.cell.guards = acc.cell.guards;
        piece.cell.guards.insert(piece.cell.guards.end(), q.cell.guards.begin(),
                                 q.cell.guards.end());
        piece.component = acc.component;
        piece.component.insert(piece.component.end(), q.component.begin(),
                               q.component.end());
        next.pieces.push_back(std::move(piece));
      }
    }
    out = std::move(next);
  }
  return out;
}

namespace {

PapRepr repr_of_expr(const ExprPtr& e, int dims) {
  return std::visit(
      [&](const auto& node) -> PapRepr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Expr::Const>) {
          return PapRepr{dims, 1, {PapPiece{{}, {AnalyticExpr::constant(node.value)}}}};
        } else if constexpr (std::is_same_v<T, Expr::Input>) {
          return PapRepr{dims, 1, {PapPiece{{}, {AnalyticExpr::var(node.index)}}}};
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          std::vector<PapRepr> parts;
          parts.reserve(node.args.size());
          for (const ExprPtr& a : node.args) parts.push_back(repr_of_expr(a, dims));
          return compose(lookup(node.prim).pieces, tuple_repr(parts));
        } else {
          static_assert(std::is_same_v<T, Expr::Cond>);
          return cond_compose(repr_of_expr(node.guard, dims),
                              repr_of_expr(node.then_branch, dims),
                              repr_of_expr(node.else_branch, dims));
        }
      },
      e->node);
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t count_pieces(const ExprPtr& e) {
  return std::visit(
      [&](const auto& node) -> std::uint64_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Expr::Const> || std::is_same_v<T, Expr::Input>) {
          return 1;
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          std::uint64_t n = lookup(node.prim).pieces.pieces.size();
          for (const ExprPtr& a : node.args) n = sat_mul(n, count_pieces(a));
          return n;
        } else {
          static_assert(std::is_same_v<T, Expr::Cond>);
          std::uint64_t n = 2;
          n = sat_mul(n, count_pieces(node.guard));
          n = sat_mul(n, count_pieces(node.then_branch));
          n = sat_mul(n, count_pieces(node.else_branch));
          return n;
        }
      },
      e->node);
}

}  // namespace

PapRepr expr_to_repr(const Program& prog) {
  validate(prog);
  return repr_of_expr(prog.root, prog.arity);
}

std::uint64_t predicted_piece_count(const Program& prog) {
  return count_pieces(prog.root);
}

PapRepr prune_contradictory(const PapRepr& gamma) {
  PapRepr out;
  out.input_dim = gamma.input_dim;
  out.output_dim = gamma.output_dim;
  for (const PapPiece& p : gamma.pieces) {
    bool empty = false;
    const auto& gs = p.cell.guards;
    for (std::size_t i = 0; i < gs.size() && !empty; ++i) {
      const auto& n = gs[i].expr.node();
      if (n.op == AnalyticExpr::Op::Const) {
        const bool ok = gs[i].sense == GuardSense::StrictlyPositive ? n.value > 0.0
                                                                    : n.value <= 0.0;
        if (!ok) empty = true;
      }
      for (std::size_t j = i + 1; j < gs.size() && !empty; ++j) {
        if (gs[i].sense != gs[j].sense &&
            AnalyticExpr::struct_equal(gs[i].expr, gs[j].expr))
          empty = true;  // g > 0 and g <= 0 cannot both hold
      }
    }
    if (!empty) out.pieces.push_back(p);
  }
  return out;
}

}  // namespace papdiff
