#include "papdiff/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "papdiff/detail/numfmt.hpp"
#include "papdiff/primitives.hpp"

namespace papdiff {

ExprPtr make_const(double value) {
  return std::make_shared<Expr>(Expr{Expr::Const{value}});
}
ExprPtr make_input(int index) {
  return std::make_shared<Expr>(Expr{Expr::Input{index}});
}
ExprPtr make_call(std::string prim, std::vector<ExprPtr> args) {
  return std::make_shared<Expr>(Expr{Expr::Call{std::move(prim), std::move(args)}});
}
ExprPtr make_cond(ExprPtr guard, ExprPtr then_branch, ExprPtr else_branch) {
  return std::make_shared<Expr>(
      Expr{Expr::Cond{std::move(guard), std::move(then_branch), std::move(else_branch)}});
}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;
  int arity;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) throw ParseError("expected identifier", pos);
    return text.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    const std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      ++digits;
    }
    if (digits == 0) throw ParseError("expected number", start);
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      std::size_t exp_digits = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        ++pos;
        ++exp_digits;
      }
      if (exp_digits == 0) throw ParseError("malformed exponent", pos);
    }
    // from_chars is locale-independent; the literal shape was validated
    // above. It does not accept a leading '+', so skip one.
    const std::size_t lit_start = start + (text[start] == '+' ? 1 : 0);
    double v = 0.0;
    const auto res = std::from_chars(text.data() + lit_start, text.data() + pos, v);
    if (res.ec == std::errc::result_out_of_range || !std::isfinite(v))
      throw ParseError("constant is not finite: " + text.substr(start, pos - start),
                       start);
    if (res.ec != std::errc() || res.ptr != text.data() + pos)
      throw ParseError("malformed number", start);
    return v;
  }

  static bool is_var(const std::string& id) {
    if (id.size() < 2 || id[0] != 'x') return false;
    for (std::size_t i = 1; i < id.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
    return true;
  }

  ExprPtr expr() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-')
      return make_const(number());

    const std::size_t id_pos = pos;
    const std::string id = ident();
    if (id == "if") return conditional();
    if (id == "else") throw ParseError("'else' without a conditional", id_pos);
    if (is_var(id)) {
      const long idx = std::strtol(id.c_str() + 1, nullptr, 10);
      if (idx < 1 || idx > arity)
        throw std::invalid_argument("input " + id + " exceeds declared arity " +
                                    std::to_string(arity));
      return make_input(static_cast<int>(idx));
    }
    if (!is_registered(id)) throw UnknownPrimitiveError(id);
    const Primitive& prim = lookup(id);
    expect('(');
    std::vector<ExprPtr> args;
    args.push_back(expr());
    while (peek() == ',') {
      expect(',');
      args.push_back(expr());
    }
    expect(')');
    if (static_cast<int>(args.size()) != prim.arity)
      throw std::invalid_argument(id + " expects " + std::to_string(prim.arity) +
                                  " arguments, got " + std::to_string(args.size()));
    return make_call(id, std::move(args));
  }

  ExprPtr conditional() {
    expect('(');
    ExprPtr guard = expr();
    expect('>');
    skip_ws();
    const std::size_t zero_pos = pos;
    if (number() != 0.0) throw ParseError("guard comparison must be against 0", zero_pos);
    expect(')');
    ExprPtr then_branch = expr();
    skip_ws();
    const std::size_t else_pos = pos;
    if (ident() != "else") throw ParseError("expected 'else'", else_pos);
    ExprPtr else_branch = expr();
    return make_cond(std::move(guard), std::move(then_branch), std::move(else_branch));
  }
};

void to_string_rec(const ExprPtr& e, std::string& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Expr::Const>) {
          out += detail::format_double(node.value);
        } else if constexpr (std::is_same_v<T, Expr::Input>) {
          out += "x" + std::to_string(node.index);
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          out += node.prim;
          out += "(";
          for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (i) out += ",";
            to_string_rec(node.args[i], out);
          }
          out += ")";
        } else {
          static_assert(std::is_same_v<T, Expr::Cond>);
          out += "if (";
          to_string_rec(node.guard, out);
          out += " > 0) ";
          to_string_rec(node.then_branch, out);
          out += " else ";
          to_string_rec(node.else_branch, out);
        }
      },
      e->node);
}

void validate_rec(const ExprPtr& e, int arity) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Expr::Const>) {
          if (!std::isfinite(node.value))
            throw std::invalid_argument("constant is not finite");
        } else if constexpr (std::is_same_v<T, Expr::Input>) {
          if (node.index < 1 || node.index > arity)
            throw std::invalid_argument("input x" + std::to_string(node.index) +
                                        " exceeds declared arity " + std::to_string(arity));
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          const Primitive& prim = lookup(node.prim);  // throws UnknownPrimitiveError
          if (static_cast<int>(node.args.size()) != prim.arity)
            throw std::invalid_argument(node.prim + " expects " +
                                        std::to_string(prim.arity) + " arguments");
          for (const ExprPtr& a : node.args) validate_rec(a, arity);
        } else {
          static_assert(std::is_same_v<T, Expr::Cond>);
          validate_rec(node.guard, arity);
          validate_rec(node.then_branch, arity);
          validate_rec(node.else_branch, arity);
        }
      },
      e->node);
}

double eval_rec(const ExprPtr& e, std::span<const double> v, EvalTrace* trace) {
  return std::visit(
      [&](const auto& node) -> double {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Expr::Const>) {
          return node.value;
        } else if constexpr (std::is_same_v<T, Expr::Input>) {
          return v[node.index - 1];
        } else if constexpr (std::is_same_v<T, Expr::Call>) {
          const Primitive& prim = lookup(node.prim);
          std::vector<double> args;
          args.reserve(node.args.size());
          for (const ExprPtr& a : node.args) args.push_back(eval_rec(a, v, trace));
          const double out = prim.call(args);
          if (trace) {
            ++trace->primitive_calls;
            trace->piece_ids.push_back(static_cast<std::uint8_t>(prim.piece_index(args)));
          }
          return out;
        } else {
          static_assert(std::is_same_v<T, Expr::Cond>);
          const double g = eval_rec(node.guard, v, trace);
          const bool then_taken = g > 0.0;
          if (trace) trace->branches.push_back(then_taken ? 1 : 0);
          return eval_rec(then_taken ? node.then_branch : node.else_branch, v, trace);
        }
      },
      e->node);
}

}  // namespace

Program parse(const std::string& text, int arity) {
  if (arity < 0) throw std::invalid_argument("arity must be nonnegative");
  Parser parser{text, 0, arity};
  ExprPtr root = parser.expr();
  if (!parser.at_end()) throw ParseError("trailing input after expression", parser.pos);
  return Program{std::move(root), arity};
}

std::string to_string(const ExprPtr& e) {
  std::string out;
  to_string_rec(e, out);
  return out;
}

std::string to_string(const Program& prog) { return to_string(prog.root); }

void validate(const Program& prog) {
  if (prog.arity < 0) throw std::invalid_argument("arity must be nonnegative");
  validate_rec(prog.root, prog.arity);
}

void check_input(const Program& prog, std::span<const double> v) {
  if (static_cast<int>(v.size()) != prog.arity)
    throw std::invalid_argument("input vector has length " + std::to_string(v.size()) +
                                ", program arity is " + std::to_string(prog.arity));
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("input vector entry is not finite");
}

double eval(const Program& prog, std::span<const double> v) {
  check_input(prog, v);
  return eval_rec(prog.root, v, nullptr);
}

double eval(const Program& prog, std::span<const double> v, EvalTrace& trace) {
  check_input(prog, v);
  return eval_rec(prog.root, v, &trace);
}

double eval(const ExprPtr& e, std::span<const double> v) {
  return eval_rec(e, v, nullptr);
}

}  // namespace papdiff
