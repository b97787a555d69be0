#include "papdiff/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "papdiff/detail/numfmt.hpp"

namespace papdiff {

namespace {

using Node = AnalyticExpr::Node;
using NodePtr = AnalyticExpr::NodePtr;
using Op = AnalyticExpr::Op;

bool eval_node(const Node* n, std::span<const double> x, double& out) {
  switch (n->op) {
    case Op::Const:
      out = n->value;
      return true;
    case Op::Var:
      if (n->var < 1 || static_cast<std::size_t>(n->var) > x.size()) return false;
      out = x[n->var - 1];
      return true;
    default:
      break;
  }
  double a = 0.0, b = 0.0;
  if (!eval_node(n->a.get(), x, a)) return false;
  if (n->b && !eval_node(n->b.get(), x, b)) return false;
  switch (n->op) {
    case Op::Add: out = a + b; return true;
    case Op::Sub: out = a - b; return true;
    case Op::Mul: out = a * b; return true;
    case Op::Div:
      if (b == 0.0) return false;
      out = a / b;
      return true;
    case Op::Neg: out = -a; return true;
    case Op::Exp: out = std::exp(a); return true;
    case Op::Log:
      if (!(a > 0.0)) return false;
      out = std::log(a);
      return true;
    case Op::Sin: out = std::sin(a); return true;
    case Op::Cos: out = std::cos(a); return true;
    case Op::Sqrt:
      if (a < 0.0) return false;
      out = std::sqrt(a);
      return true;
    default: return false;
  }
}

}  // namespace

AnalyticExpr AnalyticExpr::constant(double c) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = c;
  return AnalyticExpr(std::move(n));
}

AnalyticExpr AnalyticExpr::var(int index_1based) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = index_1based;
  return AnalyticExpr(std::move(n));
}

AnalyticExpr AnalyticExpr::make(Op op, AnalyticExpr a, AnalyticExpr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a.node_);
  n->b = std::move(b.node_);
  // Constant folding, and nothing beyond it: fold only when every child is a
  // constant and the op has a finite value there.
  const bool a_const = n->a && n->a->op == Op::Const;
  const bool b_const = !n->b || n->b->op == Op::Const;
  if (a_const && b_const) {
    double v = 0.0;
    if (eval_node(n.get(), {}, v) && std::isfinite(v)) return constant(v);
  }
  return AnalyticExpr(std::move(n));
}

AnalyticExpr operator+(const AnalyticExpr& a, const AnalyticExpr& b) {
  return AnalyticExpr::make(Op::Add, a, b);
}
AnalyticExpr operator-(const AnalyticExpr& a, const AnalyticExpr& b) {
  return AnalyticExpr::make(Op::Sub, a, b);
}
AnalyticExpr operator*(const AnalyticExpr& a, const AnalyticExpr& b) {
  return AnalyticExpr::make(Op::Mul, a, b);
}
AnalyticExpr operator/(const AnalyticExpr& a, const AnalyticExpr& b) {
  return AnalyticExpr::make(Op::Div, a, b);
}
AnalyticExpr operator-(const AnalyticExpr& a) {
  return AnalyticExpr::make(Op::Neg, a, {});
}
AnalyticExpr exp(const AnalyticExpr& a) { return AnalyticExpr::make(Op::Exp, a, {}); }
AnalyticExpr log(const AnalyticExpr& a) { return AnalyticExpr::make(Op::Log, a, {}); }
AnalyticExpr sin(const AnalyticExpr& a) { return AnalyticExpr::make(Op::Sin, a, {}); }
AnalyticExpr cos(const AnalyticExpr& a) { return AnalyticExpr::make(Op::Cos, a, {}); }
AnalyticExpr sqrt(const AnalyticExpr& a) { return AnalyticExpr::make(Op::Sqrt, a, {}); }

double AnalyticExpr::eval(std::span<const double> x) const {
  double v = 0.0;
  if (!eval_node(node_.get(), x, v))
    throw DomainError("analytic expression undefined at point: " + str());
  return v;
}

std::optional<double> AnalyticExpr::try_eval(std::span<const double> x) const noexcept {
  double v = 0.0;
  if (!eval_node(node_.get(), x, v)) return std::nullopt;
  return v;
}

namespace {

// Memoised by node identity so DAG-shared subtrees stay shared in the output.
struct DeriveCtx {
  int var;
  std::unordered_map<const Node*, AnalyticExpr> memo;
};

AnalyticExpr derive(const NodePtr& np, DeriveCtx& ctx) {
  if (auto it = ctx.memo.find(np.get()); it != ctx.memo.end()) return it->second;
  const Node& n = *np;
  const AnalyticExpr u = AnalyticExpr::wrap(n.a);
  const AnalyticExpr w = AnalyticExpr::wrap(n.b);
  const auto one = AnalyticExpr::constant(1.0);

  AnalyticExpr d;
  switch (n.op) {
    case Op::Const:
      d = AnalyticExpr::constant(0.0);
      break;
    case Op::Var:
      d = AnalyticExpr::constant(n.var == ctx.var ? 1.0 : 0.0);
      break;
    case Op::Add:
      d = derive(n.a, ctx) + derive(n.b, ctx);
      break;
    case Op::Sub:
      d = derive(n.a, ctx) - derive(n.b, ctx);
      break;
    case Op::Mul:
      d = w * derive(n.a, ctx) + u * derive(n.b, ctx);
      break;
    case Op::Div:
      d = (one / w) * derive(n.a, ctx) + (-(u / (w * w))) * derive(n.b, ctx);
      break;
    case Op::Neg:
      d = -derive(n.a, ctx);
      break;
    case Op::Exp:
      d = exp(u) * derive(n.a, ctx);
      break;
    case Op::Log:
      d = (one / u) * derive(n.a, ctx);
      break;
    case Op::Sin:
      d = cos(u) * derive(n.a, ctx);
      break;
    case Op::Cos:
      d = (-sin(u)) * derive(n.a, ctx);
      break;
    case Op::Sqrt:
      d = (one / (AnalyticExpr::constant(2.0) * sqrt(u))) * derive(n.a, ctx);
      break;
  }
  ctx.memo.emplace(np.get(), d);
  return d;
}

AnalyticExpr subst(const NodePtr& np, std::span<const AnalyticExpr> repl,
                   std::unordered_map<const Node*, AnalyticExpr>& memo) {
  if (auto it = memo.find(np.get()); it != memo.end()) return it->second;
  const Node& n = *np;
  AnalyticExpr out;
  switch (n.op) {
    case Op::Const:
      out = AnalyticExpr::wrap(np);
      break;
    case Op::Var: {
      const auto idx = static_cast<std::size_t>(n.var);
      if (idx < 1 || idx > repl.size())
        throw std::out_of_range("substitute: variable x" + std::to_string(n.var) +
                                " has no replacement");
      out = repl[idx - 1];
      break;
    }
    default: {
      const AnalyticExpr a = subst(n.a, repl, memo);
      if (n.b) {
        const AnalyticExpr b = subst(n.b, repl, memo);
        switch (n.op) {
          case Op::Add: out = a + b; break;
          case Op::Sub: out = a - b; break;
          case Op::Mul: out = a * b; break;
          case Op::Div: out = a / b; break;
          default: break;
        }
      } else {
        switch (n.op) {
          case Op::Neg: out = -a; break;
          case Op::Exp: out = exp(a); break;
          case Op::Log: out = log(a); break;
          case Op::Sin: out = sin(a); break;
          case Op::Cos: out = cos(a); break;
          case Op::Sqrt: out = sqrt(a); break;
          default: break;
        }
      }
    }
  }
  memo.emplace(np.get(), out);
  return out;
}

int max_var_node(const Node* n) {
  if (n->op == Op::Var) return n->var;
  int m = 0;
  if (n->a) m = std::max(m, max_var_node(n->a.get()));
  if (n->b) m = std::max(m, max_var_node(n->b.get()));
  return m;
}

void str_node(const Node* n, std::string& out) {
  switch (n->op) {
    case Op::Const:
      out += detail::format_double(n->value);
      return;
    case Op::Var:
      out += "x" + std::to_string(n->var);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const char* sym = n->op == Op::Add   ? " + "
                        : n->op == Op::Sub ? " - "
                        : n->op == Op::Mul ? " * "
                                           : " / ";
      out += "(";
      str_node(n->a.get(), out);
      out += sym;
      str_node(n->b.get(), out);
      out += ")";
      return;
    }
    case Op::Neg:
      out += "(-";
      str_node(n->a.get(), out);
      out += ")";
      return;
    default: {
      const char* name = n->op == Op::Exp   ? "exp"
                         : n->op == Op::Log ? "log"
                         : n->op == Op::Sin ? "sin"
                         : n->op == Op::Cos ? "cos"
                                            : "sqrt";
      out += name;
      out += "(";
      str_node(n->a.get(), out);
      out += ")";
      return;
    }
  }
}

bool equal_node(const Node* a, const Node* b) {
  if (a == b) return true;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::Const: return a->value == b->value;
    case Op::Var: return a->var == b->var;
    default:
      if (!equal_node(a->a.get(), b->a.get())) return false;
      if (!a->b != !b->b) return false;
      return !a->b || equal_node(a->b.get(), b->b.get());
  }
}

}  // namespace

AnalyticExpr AnalyticExpr::derivative(int var_1based) const {
  DeriveCtx ctx{var_1based, {}};
  return derive(node_, ctx);
}

AnalyticExpr AnalyticExpr::substitute(std::span<const AnalyticExpr> repl) const {
  std::unordered_map<const Node*, AnalyticExpr> memo;
  return subst(node_, repl, memo);
}

int AnalyticExpr::max_var() const { return max_var_node(node_.get()); }

std::string AnalyticExpr::str() const {
  std::string out;
  str_node(node_.get(), out);
  return out;
}

bool AnalyticExpr::struct_equal(const AnalyticExpr& lhs, const AnalyticExpr& rhs) {
  return equal_node(lhs.node_.get(), rhs.node_.get());
}

bool Guard::holds(std::span<const double> x) const {
  const auto v = expr.try_eval(x);
  if (!v) return false;
  return sense == GuardSense::StrictlyPositive ? *v > 0.0 : *v <= 0.0;
}

std::string Guard::str() const {
  return expr.str() + (sense == GuardSense::StrictlyPositive ? " > 0" : " <= 0");
}

bool AnalyticSet::contains(std::span<const double> x) const {
  for (const Guard& g : guards)
    if (!g.holds(x)) return false;
  return true;
}

AnalyticSet AnalyticSet::substituted(std::span<const AnalyticExpr> repl) const {
  AnalyticSet out;
  out.guards.reserve(guards.size());
  for (const Guard& g : guards) out.guards.push_back({g.expr.substitute(repl), g.sense});
  return out;
}

std::string AnalyticSet::str() const {
  if (guards.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < guards.size(); ++i) {
    if (i) out += " && ";
    out += guards[i].str();
  }
  return out;
}

bool AnalyticSet::struct_equal(const AnalyticSet& lhs, const AnalyticSet& rhs) {
  if (lhs.guards.size() != rhs.guards.size()) return false;
  for (std::size_t i = 0; i < lhs.guards.size(); ++i) {
    if (lhs.guards[i].sense != rhs.guards[i].sense) return false;
    if (!AnalyticExpr::struct_equal(lhs.guards[i].expr, rhs.guards[i].expr)) return false;
  }
  return true;
}

}  // namespace papdiff
