#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "papdiff/expr.hpp"
#include "papdiff/verify.hpp"

using namespace papdiff;

namespace {

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* c = std::get_if<Expr::Const>(&a->node))
    return c->value == std::get<Expr::Const>(b->node).value;
  if (const auto* i = std::get_if<Expr::Input>(&a->node))
    return i->index == std::get<Expr::Input>(b->node).index;
  if (const auto* call = std::get_if<Expr::Call>(&a->node)) {
    const auto& other = std::get<Expr::Call>(b->node);
    if (call->prim != other.prim || call->args.size() != other.args.size()) return false;
    for (std::size_t k = 0; k < call->args.size(); ++k)
      if (!expr_equal(call->args[k], other.args[k])) return false;
    return true;
  }
  const auto& c1 = std::get<Expr::Cond>(a->node);
  const auto& c2 = std::get<Expr::Cond>(b->node);
  return expr_equal(c1.guard, c2.guard) && expr_equal(c1.then_branch, c2.then_branch) &&
         expr_equal(c1.else_branch, c2.else_branch);
}

}  // namespace

TEST_CASE("parsing the grammar productions") {
  const Program p1 = parse("relu(x1)", 1);
  const auto& call = std::get<Expr::Call>(p1.root->node);
  CHECK(call.prim == "relu");
  REQUIRE(call.args.size() == 1);
  CHECK(std::get<Expr::Input>(call.args[0]->node).index == 1);

  const Program p2 = parse("if (x1 > 0) x1 else neg(x1)", 1);
  const auto& cond = std::get<Expr::Cond>(p2.root->node);
  CHECK(std::get<Expr::Input>(cond.guard->node).index == 1);
  CHECK(std::get<Expr::Input>(cond.then_branch->node).index == 1);
  CHECK(std::get<Expr::Call>(cond.else_branch->node).prim == "neg");

  const Program p3 = parse("mult(add(x1,x2),x1)", 2);
  const auto& outer = std::get<Expr::Call>(p3.root->node);
  CHECK(outer.prim == "mult");
  CHECK(std::get<Expr::Call>(outer.args[0]->node).prim == "add");

  // whitespace-insensitive
  CHECK(expr_equal(parse("  mult( add(x1 , x2 ) ,x1 )  ", 2).root, p3.root));
  CHECK(expr_equal(parse("if(x1>0)x1 else neg(x1)", 1).root, p2.root));

  // signed and exponent literals
  CHECK(std::get<Expr::Const>(parse("-3", 1).root->node).value == -3.0);
  CHECK(std::get<Expr::Const>(parse("2.5e-3", 1).root->node).value == 2.5e-3);
  CHECK(std::get<Expr::Const>(parse("+4.25", 1).root->node).value == 4.25);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse("relu(x1", 1), ParseError);          // missing paren
  CHECK_THROWS_AS(parse("relu x1)", 1), ParseError);         // missing paren
  CHECK_THROWS_AS(parse("mult(x1,x2) x1", 2), ParseError);   // trailing input
  CHECK_THROWS_AS(parse("if (x1 > 1) x1 else x1", 1), ParseError);  // guard vs 1
  CHECK_THROWS_AS(parse("bogus(x1)", 1), UnknownPrimitiveError);
  CHECK_THROWS_AS(parse("relu(x1,x2)", 2), std::invalid_argument);  // arity
  CHECK_THROWS_AS(parse("mult(x1)", 1), std::invalid_argument);     // arity
  CHECK_THROWS_AS(parse("x3", 2), std::invalid_argument);  // index > N
  CHECK_THROWS_AS(parse("1e999", 1), ParseError);          // overflowing literal
  CHECK_THROWS_AS(parse("1e", 1), ParseError);             // malformed exponent
  CHECK_THROWS_AS(parse("", 1), ParseError);

  try {
    parse("mult(x1,)", 2);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.pos > 0);  // error carries a position
  }
}

TEST_CASE("pretty-printing round-trips") {
  for (const char* text :
       {"relu(x1)", "if (x1 > 0) x1 else neg(x1)", "mult(add(x1,x2),x1)",
        "add(relu(sub(0.5,0.5)),0.5)", "if (sub(x1,x2) > 0) exp(x1) else 0.25"}) {
    const Program prog = parse(text, 2);
    const Program again = parse(to_string(prog), 2);
    CHECK(expr_equal(prog.root, again.root));
    CHECK(to_string(again) == to_string(prog));
  }

  for (const Program& prog : generate_corpus(99, 30, 5, 3)) {
    const Program again = parse(to_string(prog), prog.arity);
    CHECK(expr_equal(prog.root, again.root));
  }
}

TEST_CASE("evaluation follows the denotational equations") {
  const double m3[] = {-3.0};
  CHECK(eval(parse("relu(x1)", 1), m3) == 0.0);

  // guard exactly 0 takes the else-branch
  const double z[] = {0.0};
  CHECK(eval(parse("if (x1 > 0) x1 else mult(x1,x1)", 1), z) == 0.0);
  const double two[] = {2.0, 3.0};
  CHECK(eval(parse("mult(add(x1,x2),x1)", 2), two) == 10.0);

  // constants and inputs
  CHECK(eval(parse("42", 2), two) == 42.0);
  CHECK(eval(parse("x2", 2), two) == 3.0);
}

TEST_CASE("guard boundary equals the else branch") {
  const Program prog = parse("if (sub(x1,1) > 0) exp(x1) else mult(x1,x1)", 1);
  const Program else_only = parse("mult(x1,x1)", 1);
  const double at_boundary[] = {1.0};
  CHECK(eval(prog, at_boundary) == eval(else_only, at_boundary));
}

TEST_CASE("domain violations raise") {
  const double neg[] = {-2.0};
  CHECK_THROWS_AS(eval(parse("sqrt(x1)", 1), neg), DomainError);
  CHECK_THROWS_AS(eval(parse("log(x1)", 1), neg), DomainError);
  const double z[] = {0.0};
  CHECK_THROWS_AS(eval(parse("div(1,x1)", 1), z), DomainError);
}

TEST_CASE("branch totality, observed through primitive-call counts") {
  const Program prog = parse("if (x1 > 0) add(exp(x1),exp(x1)) else neg(x1)", 1);
  EvalTrace then_trace;
  const double plus[] = {1.0};
  eval(prog, plus, then_trace);
  CHECK(then_trace.primitive_calls == 3);  // two exp, one add
  CHECK(then_trace.branches == std::vector<std::uint8_t>{1});

  EvalTrace else_trace;
  const double minus[] = {-1.0};
  eval(prog, minus, else_trace);
  CHECK(else_trace.primitive_calls == 1);  // neg only
  CHECK(else_trace.branches == std::vector<std::uint8_t>{0});
}

TEST_CASE("evaluation is deterministic") {
  const Program prog = parse("if (sin(x1) > 0) exp(x1) else add(x1,x2)", 2);
  const double pt[] = {0.3, -0.8};
  CHECK(eval(prog, pt) == eval(prog, pt));
}

TEST_CASE("input vectors are validated") {
  const Program prog = parse("add(x1,x2)", 2);
  const double short_v[] = {1.0};
  CHECK_THROWS_AS(eval(prog, short_v), std::invalid_argument);
  const double bad[] = {1.0, std::nan("")};
  CHECK_THROWS_AS(eval(prog, bad), std::invalid_argument);
  const double inf[] = {1.0, HUGE_VAL};
  CHECK_THROWS_AS(eval(prog, inf), std::invalid_argument);
}

TEST_CASE("validate checks hand-built trees") {
  const Program bad_arity{make_call("mult", {make_input(1)}), 1};
  CHECK_THROWS_AS(validate(bad_arity), std::invalid_argument);
  const Program bad_index{make_input(3), 2};
  CHECK_THROWS_AS(validate(bad_index), std::invalid_argument);
  const Program bad_prim{make_call("nope", {make_input(1)}), 1};
  CHECK_THROWS_AS(validate(bad_prim), UnknownPrimitiveError);
  const Program fine{make_cond(make_input(1), make_const(1.0), make_const(2.0)), 1};
  CHECK_NOTHROW(validate(fine));
}
