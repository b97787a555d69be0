#include "papdiff/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "papdiff/autodiff.hpp"
#include "papdiff/detail/fdiff.hpp"
#include "papdiff/pap.hpp"
#include "papdiff/primitives.hpp"

namespace papdiff {

Sampler Sampler::box(int dims, double lo, double hi, std::uint64_t seed) {
  if (dims < 1) throw std::invalid_argument("sampler needs at least one dimension");
  if (!(lo < hi)) throw std::invalid_argument("sampler bounds must satisfy lo < hi");
  Sampler s;
  s.bounds.assign(dims, {lo, hi});
  s.seed = seed;
  return s;
}

std::vector<std::vector<double>> Sampler::draw(std::size_t count) const {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> pts(count);
  for (auto& pt : pts) {
    pt.reserve(bounds.size());
    for (const auto& [lo, hi] : bounds)
      pt.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
  }
  return pts;
}

std::string gradcheck_report_json(const GradCheckReport& r) {
  nlohmann::json j;
  j["samples"] = r.samples;
  j["agree"] = r.agree;
  j["agreement_fraction"] = r.agreement_fraction;
  j["worst_rel_err"] = r.worst_rel_err;
  j["skipped_points"] = r.skipped_points;
  j["skipped_coordinates"] = r.skipped_coordinates;
  auto fails = nlohmann::json::array();
  for (const auto& f : r.failures) {
    fails.push_back({{"point", f.point},
                     {"coordinate", f.coordinate},
                     {"intensional", f.intensional},
                     {"finite_difference", f.finite_difference},
                     {"flip_distance", f.flip_distance}});
  }
  j["failures"] = std::move(fails);
  return j.dump(2);
}

namespace {

// Branch signature of the evaluation at v, or nullopt on domain error.
std::optional<EvalTrace> trace_of(const Program& prog, std::span<const double> v) {
  EvalTrace t;
  try {
    eval(prog, v, t);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  return t;
}

struct GradPointResult {
  bool skipped_point = false;
  bool agreed = true;
  std::uint32_t skipped_coords = 0;
  double worst = 0.0;
  std::vector<GradCheckFailure> failures;
};

}  // namespace

GradCheckReport gradcheck(const Program& prog, const Sampler& sampler,
                          std::size_t count, double tol, Exec exec) {
  const auto points = sampler.draw(count);
  const int dims = prog.arity;
  std::vector<GradPointResult> results(points.size());

  for_each_index(points.size(), exec, [&](std::size_t idx) {
    GradPointResult& out = results[idx];
    const auto& pt = points[idx];
    JacobianRow row;
    try {
      row = symbolic_jacobian(prog, pt);
    } catch (const DomainError&) {
      out.skipped_point = true;
      return;
    }
    std::vector<double> probe(pt);
    const auto value_at = [&](bool& ok) -> double {
      try {
        const double y = eval(prog, probe);
        ok = true;
        return y;
      } catch (const DomainError&) {
        ok = false;
        return 0.0;
      }
    };
    for (int i = 0; i < dims; ++i) {
      const double h = detail::fd_step(pt[i]);
      bool hi_ok = false, lo_ok = false;
      probe[i] = pt[i] + h;
      const double fhi = value_at(hi_ok);
      probe[i] = pt[i] - h;
      const double flo = value_at(lo_ok);
      if (!hi_ok || !lo_ok) {
        probe[i] = pt[i];
        ++out.skipped_coords;
        continue;
      }
      const double fd = (fhi - flo) / (2.0 * h);
      const double rel = detail::rel_err(fd, row[i]);
      out.worst = std::max(out.worst, rel);
      if (rel > tol) {
        out.agreed = false;
        GradCheckFailure fail;
        fail.point = pt;
        fail.coordinate = i;
        fail.intensional = row[i];
        fail.finite_difference = fd;
        fail.flip_distance = -1.0;
        // FD disagreements cluster near guard boundaries; report the step at
        // which the branch signature was seen to change, if it did.
        if (const auto base = trace_of(prog, pt)) {
          probe[i] = pt[i] + h;
          const auto up = trace_of(prog, probe);
          probe[i] = pt[i] - h;
          const auto dn = trace_of(prog, probe);
          if ((up && !up->same_path(*base)) || (dn && !dn->same_path(*base)))
            fail.flip_distance = h;
        }
        out.failures.push_back(std::move(fail));
      }
      probe[i] = pt[i];
    }
  });

  GradCheckReport report;
  for (auto& r : results) {
    if (r.skipped_point) {
      ++report.skipped_points;
      continue;
    }
    ++report.samples;
    if (r.agreed) ++report.agree;
    report.skipped_coordinates += r.skipped_coords;
    report.worst_rel_err = std::max(report.worst_rel_err, r.worst);
    for (auto& f : r.failures) report.failures.push_back(std::move(f));
  }
  report.agreement_fraction =
      report.samples ? static_cast<double>(report.agree) / report.samples : 1.0;
  return report;
}

ModeConsistencyReport mode_consistency(const Program& prog, const Sampler& sampler,
                                       std::size_t count, Exec exec) {
  const auto points = sampler.draw(count);
  const int dims = prog.arity;

  // Tangents and cotangents from a stream decoupled from the point stream.
  std::mt19937_64 aux_rng(sampler.seed ^ 0x746e6777756cull);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<double>> tangents(points.size());
  std::vector<double> cotangents(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    tangents[i].reserve(dims);
    for (int d = 0; d < dims; ++d) tangents[i].push_back(unit(aux_rng));
    cotangents[i] = unit(aux_rng);
  }

  struct PointOut {
    bool skipped = false;
    bool agreed = true;
    double worst = 0.0;
    std::vector<ModeConsistencyReport::Failure> failures;
  };
  std::vector<PointOut> results(points.size());

  for_each_index(points.size(), exec, [&](std::size_t idx) {
    PointOut& out = results[idx];
    const auto& pt = points[idx];
    const auto& w = tangents[idx];
    const double u = cotangents[idx];
    try {
      const JacobianRow row = symbolic_jacobian(prog, pt);
      const double forward = jvp(prog, pt, w);
      const std::vector<double> reverse = vjp(prog, pt, u);

      double row_dot_w = 0.0;
      for (int d = 0; d < dims; ++d) row_dot_w += row[d] * w[d];
      const double rel_fwd = detail::rel_err(forward, row_dot_w);
      out.worst = std::max(out.worst, rel_fwd);
      if (rel_fwd > kModeRelTol) {
        out.agreed = false;
        out.failures.push_back({pt, rel_fwd, "jvp vs symbolic row"});
      }
      for (int d = 0; d < dims; ++d) {
        const double rel_rev = detail::rel_err(reverse[d], u * row[d]);
        out.worst = std::max(out.worst, rel_rev);
        if (rel_rev > kModeRelTol) {
          out.agreed = false;
          out.failures.push_back(
              {pt, rel_rev, "vjp vs symbolic row, coordinate " + std::to_string(d)});
        }
      }
    } catch (const DomainError&) {
      out.skipped = true;
    }
  });

  ModeConsistencyReport report;
  report.samples = points.size();
  for (auto& r : results) {
    if (r.skipped) {
      ++report.skipped;
      continue;
    }
    if (r.agreed) ++report.agree;
    report.worst_rel_err = std::max(report.worst_rel_err, r.worst);
    for (auto& f : r.failures) report.failures.push_back(std::move(f));
  }
  return report;
}

ReprEquivalenceReport repr_equivalence(const Program& prog, const Sampler& sampler,
                                       std::size_t count, Exec exec) {
  const PapRepr gamma = expr_to_repr(prog);
  const PapRepr dgamma = repr_derivative(gamma);
  const auto points = sampler.draw(count);

  struct PointOut {
    bool skipped = false;
    bool eval_equal = false;
    bool deriv_ok = false;
    bool exclusive = false;
    double worst = 0.0;
    std::vector<ReprEquivalenceReport::Failure> failures;
  };
  std::vector<PointOut> results(points.size());

  for_each_index(points.size(), exec, [&](std::size_t idx) {
    PointOut& out = results[idx];
    const auto& pt = points[idx];

    bool eval_ok = false;
    double direct = 0.0;
    try {
      direct = eval(prog, pt);
      eval_ok = true;
    } catch (const DomainError&) {
    }

    const std::size_t containing = gamma.containing_count(pt);
    if (!eval_ok) {
      // Both routes must refuse the point together.
      out.skipped = true;
      if (containing != 0)
        out.failures.push_back({pt, "eval raised but a piece cell contains the point"});
      return;
    }
    out.exclusive = containing == 1;
    if (!out.exclusive) {
      out.failures.push_back(
          {pt, "point contained in " + std::to_string(containing) + " cells"});
      return;
    }

    try {
      const std::vector<double> via_repr = repr_eval(gamma, pt);
      out.eval_equal = via_repr.size() == 1 && via_repr[0] == direct;
      if (!out.eval_equal)
        out.failures.push_back({pt, "evaluation mismatch: repr gives different value"});

      const std::vector<double> drow = repr_eval(dgamma, pt);
      const JacobianRow srow = symbolic_jacobian(prog, pt);
      bool ok = drow.size() == srow.size();
      for (std::size_t d = 0; ok && d < srow.size(); ++d) {
        const double rel = detail::rel_err(drow[d], srow[d]);
        out.worst = std::max(out.worst, rel);
        if (rel > kReprDerivRelTol) ok = false;
      }
      out.deriv_ok = ok;
      if (!ok) out.failures.push_back({pt, "derivative row mismatch"});
    } catch (const std::exception& e) {
      out.failures.push_back({pt, std::string("representation path raised: ") + e.what()});
    }
  });

  ReprEquivalenceReport report;
  report.samples = points.size();
  report.piece_count = gamma.pieces.size();
  for (auto& r : results) {
    if (r.skipped) {
      ++report.skipped;
    } else {
      if (r.eval_equal) ++report.eval_equal;
      if (r.deriv_ok) ++report.deriv_agree;
      if (r.exclusive) ++report.exclusive;
    }
    report.worst_rel_err = std::max(report.worst_rel_err, r.worst);
    for (auto& f : r.failures) report.failures.push_back(std::move(f));
  }
  return report;
}

namespace {

// Primitives drawn by the generator; log/sqrt arguments and div divisors get
// positivity wrapping.
const std::vector<std::string>& corpus_primitives() {
  static const std::vector<std::string> prims = {
      "add", "sub", "mult", "neg",  "div",  "exp",              //
      "sin", "cos", "log",  "sqrt", "relu", "reciprocal_no_nan", "abs"};
  return prims;
}

ExprPtr positive_wrap(ExprPtr e) {
  return make_call("add", {make_call("relu", {std::move(e)}), make_const(0.5)});
}

ExprPtr gen_expr(std::mt19937_64& rng, int depth, int dims) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> input_pick(1, dims);
  std::uniform_real_distribution<double> const_pick(-2.0, 2.0);

  if (depth <= 0) {
    if (unit(rng) < 0.5) return make_input(input_pick(rng));
    return make_const(const_pick(rng));
  }

  const double r = unit(rng);
  if (r < 0.4) {  // primitive call
    const auto& prims = corpus_primitives();
    const auto& name =
        prims[std::uniform_int_distribution<std::size_t>(0, prims.size() - 1)(rng)];
    const Primitive& prim = lookup(name);
    std::vector<ExprPtr> args;
    for (int i = 0; i < prim.arity; ++i) args.push_back(gen_expr(rng, depth - 1, dims));
    if (name == "log" || name == "sqrt") args[0] = positive_wrap(std::move(args[0]));
    if (name == "div") args[1] = positive_wrap(std::move(args[1]));
    return make_call(name, std::move(args));
  }
  if (r < 0.6) {  // conditional
    ExprPtr guard = gen_expr(rng, depth - 1, dims);
    ExprPtr then_branch = gen_expr(rng, depth - 1, dims);
    ExprPtr else_branch = gen_expr(rng, depth - 1, dims);
    return make_cond(std::move(guard), std::move(then_branch), std::move(else_branch));
  }
  if (r < 0.8) return make_input(input_pick(rng));
  return make_const(const_pick(rng));
}

constexpr std::uint64_t kMaxCorpusPieces = 1u << 14;
constexpr double kMaxCorpusMagnitude = 1e8;

bool probe_ok(const Program& prog, const std::vector<std::vector<double>>& probes) {
  try {
    for (const auto& pt : probes) {
      const double y = eval(prog, pt);
      if (!std::isfinite(y) || std::abs(y) > kMaxCorpusMagnitude) return false;
      const JacobianRow row = symbolic_jacobian(prog, pt);
      for (double g : row)
        if (!std::isfinite(g) || std::abs(g) > kMaxCorpusMagnitude) return false;
    }
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

}  // namespace

std::vector<Program> generate_corpus(std::uint64_t seed, std::size_t count,
                                     int max_depth, int dims) {
  if (dims < 1) throw std::invalid_argument("corpus needs at least one input");
  if (max_depth < 0) throw std::invalid_argument("max_depth must be nonnegative");

  // Fixed probe grid on [-1,1]^dims: the box corners plus seeded interior
  // points. Candidates must evaluate finitely (value and derivative row) on
  // all of them and keep their piece tables materialisable.
  std::vector<std::vector<double>> probes;
  for (std::uint64_t mask = 0; mask < (1ull << dims); ++mask) {
    std::vector<double> corner(dims);
    for (int d = 0; d < dims; ++d) corner[d] = (mask >> d) & 1 ? 1.0 : -1.0;
    probes.push_back(std::move(corner));
  }
  {
    std::mt19937_64 probe_rng(seed ^ 0x70726f6265ull);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < 17; ++i) {
      std::vector<double> pt(dims);
      for (int d = 0; d < dims; ++d) pt[d] = unit(probe_rng);
      probes.push_back(std::move(pt));
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<Program> corpus;
  corpus.reserve(count);
  while (corpus.size() < count) {
    int attempts = 0;
    for (;;) {
      if (++attempts > 500)
        throw std::logic_error("corpus generation failed to find an admissible program");
      Program prog{gen_expr(rng, max_depth, dims), dims};
      if (predicted_piece_count(prog) > kMaxCorpusPieces) continue;
      if (!probe_ok(prog, probes)) continue;
      corpus.push_back(std::move(prog));
      break;
    }
  }
  return corpus;
}

}  // namespace papdiff
