#include "papdiff/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace papdiff {

namespace {

struct ValRow {
  double val = 0.0;
  JacobianRow row;
};

ValRow sym_rec(const ExprPtr& e, std::span<const double> v) {
  const int dims = static_cast<int>(v.size());
  return std::visit(
      [&](const auto& node) -> ValRow {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Expr::Const>) {
          return {node.value, JacobianRow(dims, 0.0)};
        } else if constexpr (std::is_same_v<T, Expr::Input>) {
          JacobianRow row(dims, 0.0);
          row[node.index - 1] = 1.0;
          return {v[node.index - 1], std::move(row)};
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          const Primitive& prim = lookup(node.prim);
          std::vector<ValRow> args;
          args.reserve(node.args.size());
          std::vector<double> primals;
          primals.reserve(node.args.size());
          for (const ExprPtr& a : node.args) {
            args.push_back(sym_rec(a, v));
            primals.push_back(args.back().val);
          }
          const std::vector<double> local = prim.ideriv(primals);
          JacobianRow row(dims);
          for (int j = 0; j < dims; ++j) row[j] = local[0] * args[0].row[j];
          for (std::size_t k = 1; k < args.size(); ++k)
            for (int j = 0; j < dims; ++j) row[j] += local[k] * args[k].row[j];
          return {prim.call(primals), std::move(row)};
        } else {
          static_assert(std::is_same_v<T, Expr::Cond>);
          const double g = eval(node.guard, v);
          return sym_rec(g > 0.0 ? node.then_branch : node.else_branch, v);
        }
      },
      e->node);
}

Dual jvp_rec(const ExprPtr& e, std::span<const double> v, std::span<const double> w) {
  return std::visit(
      [&](const auto& node) -> Dual {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Expr::Const>) {
          return {node.value, 0.0};
        } else if constexpr (std::is_same_v<T, Expr::Input>) {
          return {v[node.index - 1], w[node.index - 1]};
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          const Primitive& prim = lookup(node.prim);
          std::vector<Dual> args;
          args.reserve(node.args.size());
          std::vector<double> primals;
          primals.reserve(node.args.size());
          for (const ExprPtr& a : node.args) {
            args.push_back(jvp_rec(a, v, w));
            primals.push_back(args.back().primal);
          }
          const std::vector<double> local = prim.ideriv(primals);
          double tangent = local[0] * args[0].tangent;
          for (std::size_t k = 1; k < args.size(); ++k)
            tangent += local[k] * args[k].tangent;
          return {prim.call(primals), tangent};
        } else {
          static_assert(std::is_same_v<T, Expr::Cond>);
          const double g = eval(node.guard, v);
          return jvp_rec(g > 0.0 ? node.then_branch : node.else_branch, v, w);
        }
      },
      e->node);
}

std::size_t tape_rec(const ExprPtr& e, std::span<const double> v, Tape& tape) {
  return std::visit(
      [&](const auto& node) -> std::size_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Expr::Const>) {
          tape.nodes.push_back({TapeNode::Kind::Constant, 0, nullptr, {}, node.value, {}});
          return tape.nodes.size() - 1;
        } else if constexpr (std::is_same_v<T, Expr::Input>) {
          tape.nodes.push_back({TapeNode::Kind::Input, node.index, nullptr, {},
                                v[node.index - 1], {}});
          return tape.nodes.size() - 1;
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          const Primitive& prim = lookup(node.prim);
          std::vector<std::size_t> arg_ids;
          arg_ids.reserve(node.args.size());
          std::vector<double> primals;
          primals.reserve(node.args.size());
          for (const ExprPtr& a : node.args) {
            arg_ids.push_back(tape_rec(a, v, tape));
            primals.push_back(tape.nodes[arg_ids.back()].primal);
          }
          TapeNode n;
          n.kind = TapeNode::Kind::Call;
          n.prim = &prim;
          n.args = std::move(arg_ids);
          n.local_row = prim.ideriv(primals);
          n.primal = prim.call(primals);
          tape.nodes.push_back(std::move(n));
          return tape.nodes.size() - 1;
        } else {
          static_assert(std::is_same_v<T, Expr::Cond>);
          const double g = eval(node.guard, v);
          const bool then_taken = g > 0.0;
          tape.branch_choices.push_back(then_taken ? 1 : 0);
          return tape_rec(then_taken ? node.then_branch : node.else_branch, v, tape);
        }
      },
      e->node);
}

}  // namespace

JacobianRow symbolic_jacobian(const Program& prog, std::span<const double> v) {
  check_input(prog, v);
  return sym_rec(prog.root, v).row;
}

double jvp(const Program& prog, std::span<const double> v, std::span<const double> w) {
  check_input(prog, v);
  if (w.size() != v.size())
    throw std::invalid_argument("tangent vector length != input length");
  return jvp_rec(prog.root, v, w).tangent;
}

Tape record_tape(const Program& prog, std::span<const double> v) {
  check_input(prog, v);
  Tape tape;
  tape.result = tape_rec(prog.root, v, tape);
  return tape;
}

std::vector<double> tape_vjp(const Tape& tape, int arity, double u) {
  std::vector<double> adjoint(tape.nodes.size(), 0.0);
  std::vector<double> grad(arity, 0.0);
  adjoint[tape.result] = u;
  for (std::size_t i = tape.nodes.size(); i-- > 0;) {
    const TapeNode& n = tape.nodes[i];
    const double a = adjoint[i];
    switch (n.kind) {
      case TapeNode::Kind::Call:
        for (std::size_t k = 0; k < n.args.size(); ++k)
          adjoint[n.args[k]] += a * n.local_row[k];
        break;
      case TapeNode::Kind::Input:
        grad[n.input_index - 1] += a;
        break;
      case TapeNode::Kind::Constant:
        break;
    }
  }
  return grad;
}

std::vector<double> vjp(const Program& prog, std::span<const double> v, double u) {
  return tape_vjp(record_tape(prog, v), prog.arity, u);
}

namespace {

// Nested forward-mode scalars: a k-jet along one direction per nesting level.
template <class S>
struct ND {
  S a{};
  S b{};
};

inline double most_primal(double x) { return x; }

template <class S>
double most_primal(const ND<S>& x) {
  return most_primal(x.a);
}

template <class S>
struct NdConst;
template <>
struct NdConst<double> {
  static double of(double c) { return c; }
};
template <class S>
struct NdConst<ND<S>> {
  static ND<S> of(double c) { return {NdConst<S>::of(c), NdConst<S>::of(0.0)}; }
};

template <class S>
S nd_make_s(double c) {
  return NdConst<S>::of(c);
}

template <class S>
ND<S> operator+(const ND<S>& x, const ND<S>& y) {
  return {x.a + y.a, x.b + y.b};
}
template <class S>
ND<S> operator-(const ND<S>& x, const ND<S>& y) {
  return {x.a - y.a, x.b - y.b};
}
template <class S>
ND<S> operator-(const ND<S>& x) {
  return {-x.a, -x.b};
}
template <class S>
ND<S> operator*(const ND<S>& x, const ND<S>& y) {
  return {x.a * y.a, x.a * y.b + x.b * y.a};
}
template <class S>
ND<S> operator/(const ND<S>& x, const ND<S>& y) {
  return {x.a / y.a, (x.b * y.a - x.a * y.b) / (y.a * y.a)};
}

inline double nd_exp(double x) { return std::exp(x); }
inline double nd_log(double x) { return std::log(x); }
inline double nd_sin(double x) { return std::sin(x); }
inline double nd_cos(double x) { return std::cos(x); }
inline double nd_sqrt(double x) { return std::sqrt(x); }

template <class S>
ND<S> nd_exp(const ND<S>& x) {
  const S e = nd_exp(x.a);
  return {e, e * x.b};
}
template <class S>
ND<S> nd_log(const ND<S>& x) {
  return {nd_log(x.a), x.b / x.a};
}
template <class S>
ND<S> nd_sin(const ND<S>& x) {
  return {nd_sin(x.a), nd_cos(x.a) * x.b};
}
template <class S>
ND<S> nd_cos(const ND<S>& x) {
  return {nd_cos(x.a), -(nd_sin(x.a) * x.b)};
}
template <class S>
ND<S> nd_sqrt(const ND<S>& x) {
  const S s = nd_sqrt(x.a);
  return {s, x.b / (s + s)};
}

template <class S>
S analytic_nd(const AnalyticExpr::Node* n, std::span<const S> xs) {
  using Op = AnalyticExpr::Op;
  switch (n->op) {
    case Op::Const: return nd_make_s<S>(n->value);
    case Op::Var: return xs[n->var - 1];
    default: break;
  }
  const S a = analytic_nd<S>(n->a.get(), xs);
  switch (n->op) {
    case Op::Neg: return -a;
    case Op::Exp: return nd_exp(a);
    case Op::Log:
      if (!(most_primal(a) > 0.0)) throw DomainError("log outside domain");
      return nd_log(a);
    case Op::Sin: return nd_sin(a);
    case Op::Cos: return nd_cos(a);
    case Op::Sqrt:
      if (most_primal(a) < 0.0) throw DomainError("sqrt outside domain");
      return nd_sqrt(a);
    default: break;
  }
  const S b = analytic_nd<S>(n->b.get(), xs);
  switch (n->op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (most_primal(b) == 0.0) throw DomainError("division by zero");
      return a / b;
    default: throw std::logic_error("unreachable analytic op");
  }
}

template <class S>
S nd_program(const ExprPtr& e, std::span<const S> xs, std::span<const double> v) {
  return std::visit(
      [&](const auto& node) -> S {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Expr::Const>) {
          return nd_make_s<S>(node.value);
        } else if constexpr (std::is_same_v<T, Expr::Input>) {
          return xs[node.index - 1];
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          const Primitive& prim = lookup(node.prim);
          std::vector<S> args;
          args.reserve(node.args.size());
          std::vector<double> primals;
          primals.reserve(node.args.size());
          for (const ExprPtr& a : node.args) {
            args.push_back(nd_program<S>(a, xs, v));
            primals.push_back(most_primal(args.back()));
          }
          if (!prim.in_domain(primals))
            throw DomainError(prim.name + ": argument outside domain");
          // Piece and branch selection happens at the primal point; the
          // selected analytic component is then evaluated on the jets.
          const std::size_t piece = prim.pieces.find_piece(primals);
          const AnalyticExpr& component = prim.pieces.pieces[piece].component[0];
          return analytic_nd<S>(&component.node(), std::span<const S>(args));
        } else {
          static_assert(std::is_same_v<T, Expr::Cond>);
          const double g = eval(node.guard, v);
          return nd_program<S>(g > 0.0 ? node.then_branch : node.else_branch, xs, v);
        }
      },
      e->node);
}

template <int K>
struct NDT {
  using type = ND<typename NDT<K - 1>::type>;
};
template <>
struct NDT<0> {
  using type = double;
};

template <int K>
typename NDT<K>::type nd_constant(double c) {
  if constexpr (K == 0) {
    return c;
  } else {
    return {nd_constant<K - 1>(c), nd_constant<K - 1>(0.0)};
  }
}

template <int K>
typename NDT<K>::type nd_seed(double value, std::span<const std::vector<double>> dirs,
                              int coord) {
  if constexpr (K == 0) {
    return value;
  } else {
    return {nd_seed<K - 1>(value, dirs.subspan(1), coord),
            nd_constant<K - 1>(dirs[0][coord])};
  }
}

template <int K>
double top_tangent(const typename NDT<K>::type& x) {
  if constexpr (K == 0) {
    return x;
  } else {
    return top_tangent<K - 1>(x.b);
  }
}

template <int K>
double nth_impl(const Program& prog, std::span<const double> v,
                std::span<const std::vector<double>> dirs) {
  using S = typename NDT<K>::type;
  std::vector<S> xs;
  xs.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    xs.push_back(nd_seed<K>(v[i], dirs, static_cast<int>(i)));
  const S out = nd_program<S>(prog.root, std::span<const S>(xs), v);
  return top_tangent<K>(out);
}

}  // namespace

double nth_derivative(const Program& prog, std::span<const double> v, int k,
                      std::span<const std::vector<double>> dirs) {
  check_input(prog, v);
  if (k < 0) throw std::invalid_argument("derivative order must be nonnegative");
  if (static_cast<int>(dirs.size()) != k)
    throw std::invalid_argument("need exactly k direction vectors");
  for (const auto& d : dirs)
    if (d.size() != v.size())
      throw std::invalid_argument("direction vector length != input length");
  switch (k) {
    case 0: return eval(prog, v);
    case 1: return jvp(prog, v, dirs[0]);
    case 2: return nth_impl<2>(prog, v, dirs);
    case 3: return nth_impl<3>(prog, v, dirs);
    case 4: return nth_impl<4>(prog, v, dirs);
    case 5: return nth_impl<5>(prog, v, dirs);
    case 6: return nth_impl<6>(prog, v, dirs);
    default:
      throw std::invalid_argument("derivative order " + std::to_string(k) +
                                  " exceeds the supported maximum " +
                                  std::to_string(kMaxDerivativeOrder));
  }
}

}  // namespace papdiff
