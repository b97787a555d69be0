// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and runtime budgets are pinned here, in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "papdiff/autodiff.hpp"
#include "papdiff/detail/fdiff.hpp"
#include "papdiff/gallery.hpp"
#include "papdiff/pap.hpp"
#include "papdiff/verify.hpp"

using namespace papdiff;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail = "") {
  std::printf("[%s] C%d: %s%s%s\n", ok ? "PASS" : "FAIL", id, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b,
                           int rows, int inner, int cols) {
  std::vector<double> out(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      for (int k = 0; k < inner; ++k)
        out[r * cols + c] += a[r * inner + k] * b[k * cols + c];
  return out;
}

constexpr std::uint64_t kCorpusSeed = 12345;

// ---- C1: designated primitive derivatives; sqrt(mult(x1,0)) never NaN

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;

  const double zero[] = {0.0};
  if (lookup("relu").ideriv(zero) != std::vector<double>{0.0}) ok = false;
  if (lookup("sqrt").ideriv(zero) != std::vector<double>{0.0}) ok = false;
  if (lookup("reciprocal_no_nan").ideriv(zero) != std::vector<double>{0.0}) ok = false;

  const Program prog = parse("sqrt(mult(x1, 0))", 1);
  const Sampler s = Sampler::box(1, -10.0, 10.0, 1001);
  for (const auto& pt : s.draw(1000)) {
    const double w[] = {1.0};
    const JacobianRow row = symbolic_jacobian(prog, pt);
    const double fwd = jvp(prog, pt, w);
    const auto rev = vjp(prog, pt, 1.0);
    if (row != JacobianRow{0.0} || fwd != 0.0 || rev != std::vector<double>{0.0}) {
      ok = false;
      detail = "nonzero or non-finite gradient at x = " + std::to_string(pt[0]);
      break;
    }
  }

  const double dt = seconds_since(t0);
  if (dt >= 1.0) {
    ok = false;
    detail = "runtime " + std::to_string(dt) + " s exceeds 1 s";
  }
  report(1, ok, "primitive derivative table and sqrt(mult(x1,0)) == 0 on [-10,10]",
         detail);
}

// ---- C2: jvp, vjp, and the symbolic row agree on the corpus

void criterion2(const std::vector<Program>& corpus) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < corpus.size() && ok; ++i) {
    const Sampler s = Sampler::box(4, -1.0, 1.0, 2000 + i);
    const auto rep = mode_consistency(corpus[i], s, 100);
    if (!rep.all_agree()) {
      ok = false;
      detail = "program " + std::to_string(i) + ": " + to_string(corpus[i]) +
               ", worst rel err " + std::to_string(rep.worst_rel_err);
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 30.0) {
    ok = false;
    detail = "runtime " + std::to_string(dt) + " s exceeds 30 s";
  }
  report(2, ok, "mode consistency at rel 1e-10 over 100 programs x 100 points", detail);
}

// ---- C3 (+ exclusivity counts for C10)

void criterion3(const std::vector<Program>& corpus, std::uint64_t& exclusive_bad) {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < corpus.size() && ok; ++i) {
    const Sampler s = Sampler::box(4, -1.0, 1.0, 3000 + i);
    const auto rep = repr_equivalence(corpus[i], s, 100);
    exclusive_bad += rep.samples - rep.skipped - rep.exclusive;
    if (!rep.ok() || !rep.failures.empty()) {
      ok = false;
      detail = "program " + std::to_string(i) + ": " + to_string(corpus[i]) +
               (rep.failures.empty() ? "" : ", " + rep.failures.front().what);
    }
  }
  report(3, ok,
         "expr_to_repr evaluates exactly and D(repr) matches the symbolic row at rel "
         "1e-12",
         detail);
}

// ---- C4: finite-difference agreement everywhere

void criterion4(const std::vector<Program>& corpus) {
  bool ok = true;
  std::string detail;
  std::vector<std::pair<Program, int>> subjects;
  for (const Program& p : corpus) subjects.push_back({p, 4});
  subjects.push_back({parse("relu(x1)", 1), 1});
  subjects.push_back({parse("abs(x1)", 1), 1});
  subjects.push_back({parse("abs(sub(x1,x2))", 2), 2});

  for (std::size_t i = 0; i < subjects.size() && ok; ++i) {
    const auto& [prog, dims] = subjects[i];
    const Sampler s = Sampler::box(dims, -1.0, 1.0, 4000 + i);
    const auto rep = gradcheck(prog, s, 1000, 1e-4);
    if (rep.agreement_fraction < 0.99) {
      ok = false;
      detail = to_string(prog) + ": fraction " + std::to_string(rep.agreement_fraction);
    }
  }
  report(4, ok, "gradcheck agreement fraction >= 0.99 on the corpus and fixtures",
         detail);
}

// ---- C5: chain rule on composed representations (+ C10 exclusivity)

struct ReprPair {
  PapRepr outer;
  PapRepr inner;
};

std::vector<ReprPair> chain_rule_pairs() {
  const AnalyticExpr X1 = AnalyticExpr::var(1);
  const AnalyticExpr C0 = AnalyticExpr::constant(0.0);
  const auto pos = [](const AnalyticExpr& e) {
    return Guard{e, GuardSense::StrictlyPositive};
  };
  const auto npos = [](const AnalyticExpr& e) { return Guard{e, GuardSense::Nonpositive}; };

  std::vector<ReprPair> pairs;

  // relu-style fixtures, both piece-table versions
  const PapRepr relu_tf = lookup("relu").pieces;
  const PapRepr relu_ge{1, 1, {{{{pos(-X1)}}, {C0}}, {{{npos(-X1)}}, {X1}}}};
  pairs.push_back({relu_tf, relu_tf});
  pairs.push_back({relu_ge, relu_tf});
  pairs.push_back({relu_tf, relu_ge});
  pairs.push_back({lookup("abs").pieces, relu_ge});
  // sqrt's two-piece table over relu output (always in the sqrt domain)
  pairs.push_back({lookup("sqrt").pieces, relu_tf});

  // scalar program pairs from a dedicated corpus
  const auto scalars = generate_corpus(777, 30, 3, 1);
  for (std::size_t i = 0; i + 1 < scalars.size(); i += 2)
    pairs.push_back({expr_to_repr(scalars[i]), expr_to_repr(scalars[i + 1])});

  // primitive tables over tupled arguments, exercising the 1x2 * 2x1 product
  const auto tuples = generate_corpus(778, 10, 2, 1);
  const char* two_arg[] = {"mult", "add", "sub", "div", "mult"};
  for (int i = 0; i < 5; ++i) {
    const Program& a = tuples[2 * i];
    // keep the second coordinate off div's singular set
    const Program safe{make_call("add", {make_call("relu", {tuples[2 * i + 1].root}),
                                         make_const(0.5)}),
                       1};
    const PapRepr parts[] = {expr_to_repr(a), expr_to_repr(safe)};
    pairs.push_back({lookup(two_arg[i]).pieces, tuple_repr(parts)});
  }
  return pairs;
}

void criterion5(std::uint64_t& exclusive_bad) {
  bool ok = true;
  std::string detail;
  const auto pairs = chain_rule_pairs();

  for (std::size_t pi = 0; pi < pairs.size() && ok; ++pi) {
    const auto& [outer, inner] = pairs[pi];
    const PapRepr composed = compose(outer, inner);
    const PapRepr d_composed = repr_derivative(composed);
    const PapRepr d_outer = repr_derivative(outer);
    const PapRepr d_inner = repr_derivative(inner);

    const Sampler s = Sampler::box(1, -2.0, 2.0, 5000 + pi);
    auto pts = s.draw(1000);
    // boundary points of the relu-style tables
    pts.push_back({0.0});
    pts.push_back({0.25});
    pts.push_back({-0.5});

    for (const auto& pt : pts) {
      if (composed.containing_count(pt) != 1) ++exclusive_bad;
      if (inner.containing_count(pt) != 1) ++exclusive_bad;

      const std::vector<double> fx = repr_eval(inner, pt);
      if (outer.containing_count(fx) != 1) ++exclusive_bad;

      const std::vector<double> lhs = repr_eval(d_composed, pt);
      const std::vector<double> dg = repr_eval(d_outer, fx);
      const std::vector<double> df = repr_eval(d_inner, pt);
      const std::vector<double> rhs =
          matmul(dg, df, outer.output_dim, outer.input_dim, inner.input_dim);
      for (std::size_t j = 0; j < lhs.size(); ++j) {
        if (detail::rel_err(lhs[j], rhs[j]) > 1e-12) {
          ok = false;
          detail = "pair " + std::to_string(pi) + " at x = " + std::to_string(pt[0]);
          break;
        }
      }
      if (!ok) break;
    }
  }
  report(5, ok,
         "chain rule D(g o f) = Dg(f(x)) * Df(x) at rel 1e-12 over " +
             std::to_string(pairs.size()) + " representation pairs",
         detail);
}

// ---- C6: second-order intensional derivatives

void criterion6() {
  bool ok = true;
  std::string detail;
  const Program relu = parse("relu(x1)", 1);
  const Program square = parse("mult(x1,x1)", 1);
  const std::vector<std::vector<double>> dirs = {{1.0}, {1.0}};

  const Sampler s = Sampler::box(1, -3.0, 3.0, 6001);
  auto pts = s.draw(1000);
  pts.push_back({0.0});
  for (const auto& pt : pts) {
    if (nth_derivative(relu, pt, 2, dirs) != 0.0) {
      ok = false;
      detail = "relu second derivative nonzero at " + std::to_string(pt[0]);
      break;
    }
    if (detail::rel_err(nth_derivative(square, pt, 2, dirs), 2.0) > 1e-10) {
      ok = false;
      detail = "x^2 second derivative off at " + std::to_string(pt[0]);
      break;
    }
  }
  report(6, ok, "k=2 derivatives: relu is 0 (including x=0), x*x is 2", detail);
}

// ---- C7: the constant-through-the-kink composition

void criterion7() {
  bool ok = true;
  std::string detail;
  const Program prog = parse("add(relu(sub(0.5, 0.5)), 0.5)", 1);
  const Sampler s = Sampler::box(1, -3.0, 3.0, 7001);
  for (const auto& pt : s.draw(1000)) {
    try {
      const double w[] = {1.0};
      if (eval(prog, pt) != 0.5 || symbolic_jacobian(prog, pt) != JacobianRow{0.0} ||
          jvp(prog, pt, w) != 0.0 || vjp(prog, pt, 1.0) != std::vector<double>{0.0}) {
        ok = false;
        detail = "wrong value or gradient at " + std::to_string(pt[0]);
        break;
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
      break;
    }
  }
  report(7, ok, "g o f with f = 1/2 evaluates to 1/2 with gradient exactly 0", detail);
}

// ---- C8: claim-1 difference-quotient probe

void criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  const int depth = 12, k = 5;
  const double dk = quotient_bound_d(k);
  const double dk_expected = 0.5 / 32.0 + 0.75 / 243.0;
  if (std::abs(dk - dk_expected) > 1e-15) {
    ok = false;
    detail = "d(5) formula mismatch";
  }

  const CantorApprox half(0.5, depth);
  const std::uint64_t survivors = half.surviving_count();
  for (int j = 0; j < 100 && ok; ++j) {
    const std::uint64_t pos = 1 + static_cast<std::uint64_t>(j) * (survivors - 1) / 100;
    const double x = half.surviving_interval(pos).lo;
    try {
      const ProbeRecord rec = probe_claim1(depth, x, k);
      if (rec.q1 != 0.0 || !(std::abs(rec.q2) > 1.0) || !(std::abs(x - rec.x2) <= dk)) {
        ok = false;
        detail = "probe " + std::to_string(j) + ": q1 = " + std::to_string(rec.q1) +
                 ", q2 = " + std::to_string(rec.q2);
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 10.0) {
    ok = false;
    detail = "runtime " + std::to_string(dt) + " s exceeds 10 s";
  }
  report(8, ok, "claim-1 probe at depth 12, k=5: q1 = 0, |q2| > 1, |x-x2| <= d(5)",
         detail);
}

// ---- C9: claim-3 slopes and the composed Cantor function

void criterion9() {
  bool ok = true;
  std::string detail;
  const Claim3Report rep = probe_claim3(15, 500, 1000, 9001);
  if (rep.worst_f_slope_err > 1e-3) {
    ok = false;
    detail = "f slope err " + std::to_string(rep.worst_f_slope_err);
  }
  if (rep.worst_gf_slope_err > 1e-3) {
    ok = false;
    detail = "g o f slope err " + std::to_string(rep.worst_gf_slope_err);
  }
  if (rep.worst_compose_diff > 1e-9) {
    ok = false;
    detail = "phi_1(f(x)) vs phi_1/2 diff " + std::to_string(rep.worst_compose_diff);
  }
  report(9, ok,
         "claim-3 probe at depth 15: slope(f) = 2, slope(phi_1 o f) = 0 within 1e-3; "
         "phi_1 o f = phi_1/2 within 1e-9",
         detail);
}

}  // namespace

int main() {
  const auto corpus = generate_corpus(kCorpusSeed, 100, 6, 4);
  std::uint64_t exclusive_bad = 0;

  criterion1();
  criterion2(corpus);
  criterion3(corpus, exclusive_bad);
  criterion4(corpus);
  criterion5(exclusive_bad);
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  report(10, exclusive_bad == 0,
         "partition exclusivity at every sampled point of criteria 3 and 5",
         exclusive_bad ? std::to_string(exclusive_bad) + " violations" : "");

  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
