#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "papdiff/autodiff.hpp"
#include "papdiff/pap.hpp"
#include "papdiff/verify.hpp"

using namespace papdiff;

TEST_CASE("sampler reproducibility and bounds") {
  const Sampler s = Sampler::box(3, -1.0, 2.0, 42);
  const auto a = s.draw(50);
  const auto b = s.draw(50);
  CHECK(a == b);
  for (const auto& pt : a) {
    REQUIRE(pt.size() == 3);
    for (double x : pt) {
      CHECK(x >= -1.0);
      CHECK(x < 2.0);
    }
  }
  CHECK_THROWS_AS(Sampler::box(0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Sampler::box(1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("gradcheck on the flagship fixtures") {
  const Sampler unit1 = Sampler::box(1, -1.0, 1.0, 1);
  const auto relu_rep = gradcheck(parse("relu(x1)", 1), unit1, 1000, 1e-4);
  CHECK(relu_rep.samples == 1000);
  CHECK(relu_rep.agreement_fraction >= 0.995);

  // constant-zero composite: FD of the constant program is 0 and the
  // intensional gradient is 0 everywhere, so agreement is total
  const Sampler five = Sampler::box(1, -5.0, 5.0, 2);
  const auto sq0 = gradcheck(parse("sqrt(mult(x1, 0))", 1), five, 1000, 1e-4);
  CHECK(sq0.agreement_fraction == 1.0);
  CHECK(sq0.worst_rel_err == 0.0);

  const Sampler three = Sampler::box(1, -3.0, 3.0, 3);
  const auto poly = gradcheck(parse("mult(x1,x1)", 1), three, 1000, 1e-4);
  CHECK(poly.agreement_fraction == 1.0);
}

TEST_CASE("gradcheck counts domain-error points and coordinates as skipped") {
  // sqrt's domain boundary sits inside the sampling box
  const Sampler box = Sampler::box(1, -1.0, 1.0, 4);
  const auto rep = gradcheck(parse("sqrt(x1)", 1), box, 400, 1e-4);
  CHECK(rep.skipped_points > 0);            // negative samples
  CHECK(rep.samples + rep.skipped_points == 400);
  CHECK(rep.agreement_fraction >= 0.99);    // the x >= h samples all agree
}

TEST_CASE("gradcheck failures carry branch-flip forensics") {
  // sample inside the FD step of the relu kink: every point disagrees and
  // the probes straddle the piece boundary
  const Sampler tight = Sampler::box(1, -5e-6, 5e-6, 5);
  const auto rep = gradcheck(parse("relu(x1)", 1), tight, 50, 1e-4);
  CHECK(rep.agreement_fraction < 0.5);
  REQUIRE(!rep.failures.empty());
  for (const auto& f : rep.failures) CHECK(f.flip_distance > 0.0);
}

TEST_CASE("gradcheck report serialises to JSON with the typed fields") {
  const Sampler s = Sampler::box(1, -1.0, 1.0, 6);
  const auto rep = gradcheck(parse("relu(x1)", 1), s, 100, 1e-4);
  const auto j = nlohmann::json::parse(gradcheck_report_json(rep));
  for (const char* key :
       {"samples", "agree", "agreement_fraction", "worst_rel_err", "failures"})
    CHECK(j.contains(key));
  CHECK(j["samples"] == rep.samples);
  CHECK(j["failures"].is_array());
}

TEST_CASE("mode consistency across jvp, vjp, and the symbolic row") {
  const Sampler s4 = Sampler::box(4, -1.0, 1.0, 7);
  for (const Program& prog : generate_corpus(21, 5, 6, 4)) {
    const auto rep = mode_consistency(prog, s4, 100);
    CHECK(rep.samples == 100);
    CHECK(rep.all_agree());
  }

  const Sampler s1 = Sampler::box(1, -2.0, 2.0, 8);
  const auto const_rep = mode_consistency(parse("3", 1), s1, 100);
  CHECK(const_rep.all_agree());

  // chained kink: all modes give 0 at the origin
  const Program chain = parse("relu(relu(x1))", 1);
  const double z[] = {0.0};
  const double w[] = {1.0};
  CHECK(symbolic_jacobian(chain, z) == JacobianRow{0.0});
  CHECK(jvp(chain, z, w) == 0.0);
  CHECK(vjp(chain, z, 1.0) == std::vector<double>{0.0});
}

TEST_CASE("repr_equivalence checks both identities and exclusivity") {
  const Sampler s1 = Sampler::box(1, -2.0, 2.0, 9);
  const auto relu_rep = repr_equivalence(parse("relu(x1)", 1), s1, 500);
  CHECK(relu_rep.ok());
  CHECK(relu_rep.samples == 500);
  CHECK(relu_rep.piece_count == 2);

  const auto cond_rep =
      repr_equivalence(parse("if (x1 > 0) mult(x1,x1) else neg(x1)", 1), s1, 500);
  CHECK(cond_rep.ok());

  const auto const_rep = repr_equivalence(parse("5", 1), s1, 100);
  CHECK(const_rep.ok());

  // the representation identities hold at the kink itself
  const Program relu_prog = parse("relu(x1)", 1);
  const PapRepr gamma = expr_to_repr(relu_prog);
  const double z[] = {0.0};
  CHECK(repr_eval(gamma, z)[0] == eval(relu_prog, z));
  CHECK(repr_eval(repr_derivative(gamma), z) == symbolic_jacobian(relu_prog, z));
}

TEST_CASE("corpus generation is reproducible and well-formed") {
  const auto corpus = generate_corpus(42, 100, 6, 4);
  REQUIRE(corpus.size() == 100);

  const auto again = generate_corpus(42, 100, 6, 4);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    CHECK(to_string(corpus[i]) == to_string(again[i]));

  const Sampler s4 = Sampler::box(4, -1.0, 1.0, 10);
  const auto pts = s4.draw(50);
  for (const Program& prog : corpus) {
    CHECK(prog.arity == 4);
    CHECK_NOTHROW(validate(prog));
    CHECK(predicted_piece_count(prog) <= (1u << 14));
    // parse-evaluable on the sampling box
    const Program reparsed = parse(to_string(prog), 4);
    for (const auto& pt : pts) {
      const double y = eval(reparsed, pt);
      CHECK(std::isfinite(y));
    }
  }
}

TEST_CASE("corpus depth zero gives leaves only") {
  for (const Program& prog : generate_corpus(3, 50, 0, 3)) {
    const bool leaf = std::holds_alternative<Expr::Const>(prog.root->node) ||
                      std::holds_alternative<Expr::Input>(prog.root->node);
    CHECK(leaf);
  }
}

TEST_CASE("corpus draws vary with the seed") {
  const auto a = generate_corpus(1, 20, 5, 2);
  const auto b = generate_corpus(2, 20, 5, 2);
  std::set<std::string> sa, sb;
  for (const auto& p : a) sa.insert(to_string(p));
  for (const auto& p : b) sb.insert(to_string(p));
  CHECK(sa != sb);
}
