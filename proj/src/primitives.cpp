#include "papdiff/primitives.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "papdiff/detail/fdiff.hpp"
#include "papdiff/sampling.hpp"

namespace papdiff {

bool Primitive::in_domain(std::span<const double> args) const {
  return static_cast<int>(args.size()) == arity && domain.contains(args);
}

double Primitive::call(std::span<const double> args) const {
  if (static_cast<int>(args.size()) != arity)
    throw std::invalid_argument(name + ": expected " + std::to_string(arity) +
                                " arguments, got " + std::to_string(args.size()));
  if (!domain.contains(args))
    throw DomainError(name + ": argument outside domain " + domain_desc);
  return eval_fn(args);
}

std::vector<double> Primitive::ideriv(std::span<const double> args) const {
  if (static_cast<int>(args.size()) != arity)
    throw std::invalid_argument(name + ": expected " + std::to_string(arity) +
                                " arguments, got " + std::to_string(args.size()));
  if (!domain.contains(args))
    throw DomainError(name + ": argument outside domain " + domain_desc);
  return repr_eval(deriv_pieces, args);
}

std::size_t Primitive::piece_index(std::span<const double> args) const {
  return pieces.find_piece(args);
}

std::vector<double> primitive_ideriv(const Primitive& p, std::span<const double> args) {
  return p.ideriv(args);
}

namespace {

using A = AnalyticExpr;

Guard pos(const A& e) { return {e, GuardSense::StrictlyPositive}; }
Guard npos(const A& e) { return {e, GuardSense::Nonpositive}; }

// {x_i = 0} in guard form: x_i <= 0 and -x_i <= 0.
AnalyticSet zero_cell(const A& v) { return {{npos(v), npos(-v)}}; }

Primitive make_primitive(std::string name, int arity, AnalyticSet domain,
                         std::string domain_desc, std::vector<PapPiece> pieces,
                         double (*eval_fn)(std::span<const double>)) {
  Primitive p;
  p.name = std::move(name);
  p.arity = arity;
  p.domain = std::move(domain);
  p.domain_desc = std::move(domain_desc);
  p.pieces = PapRepr{arity, 1, std::move(pieces)};
  p.deriv_pieces = repr_derivative(p.pieces);
  p.eval_fn = eval_fn;
  return p;
}

std::map<std::string, Primitive> build_registry() {
  const A x = A::var(1);
  const A y = A::var(2);
  const A zero = A::constant(0.0);
  const A one = A::constant(1.0);
  const AnalyticSet entire{};

  std::map<std::string, Primitive> reg;
  auto add = [&reg](Primitive p) { reg.emplace(p.name, std::move(p)); };

  add(make_primitive("add", 2, entire, "R^2", {{entire, {x + y}}},
                     [](std::span<const double> a) { return a[0] + a[1]; }));
  add(make_primitive("sub", 2, entire, "R^2", {{entire, {x - y}}},
                     [](std::span<const double> a) { return a[0] - a[1]; }));
  add(make_primitive("mult", 2, entire, "R^2", {{entire, {x * y}}},
                     [](std::span<const double> a) { return a[0] * a[1]; }));
  add(make_primitive("neg", 1, entire, "R", {{entire, {-x}}},
                     [](std::span<const double> a) { return -a[0]; }));

  // x2 != 0, carved out as x2^2 > 0.
  add(make_primitive("div", 2, {{pos(y * y)}}, "{x2 != 0}", {{{{pos(y * y)}}, {x / y}}},
                     [](std::span<const double> a) { return a[0] / a[1]; }));

  add(make_primitive("exp", 1, entire, "R", {{entire, {exp(x)}}},
                     [](std::span<const double> a) { return std::exp(a[0]); }));
  add(make_primitive("sin", 1, entire, "R", {{entire, {sin(x)}}},
                     [](std::span<const double> a) { return std::sin(a[0]); }));
  add(make_primitive("cos", 1, entire, "R", {{entire, {cos(x)}}},
                     [](std::span<const double> a) { return std::cos(a[0]); }));
  add(make_primitive("log", 1, {{pos(x)}}, "{x > 0}", {{{{pos(x)}}, {log(x)}}},
                     [](std::span<const double> a) { return std::log(a[0]); }));

  // sqrt on {x >= 0} with the derivative pinned to 0 at the origin: pieces
  // {x > 0 : sqrt x} and {x = 0 : 0}, so D(pieces) is 1/(2 sqrt x) resp. 0.
  add(make_primitive("sqrt", 1, {{npos(-x)}}, "{x >= 0}",
                     {{{{pos(x)}}, {sqrt(x)}}, {zero_cell(x), {zero}}},
                     [](std::span<const double> a) {
                       return a[0] > 0.0 ? std::sqrt(a[0]) : 0.0;
                     }));

  // {<R_{>0}, x>, <R_{<=0}, 0>}: the table autodiff systems effectively use,
  // giving derivative 0 at the origin.
  add(make_primitive("relu", 1, entire, "R", {{{{pos(x)}}, {x}}, {{{npos(x)}}, {zero}}},
                     [](std::span<const double> a) { return a[0] > 0.0 ? a[0] : 0.0; }));

  // Total on R: 1/x away from 0, value 0 and derivative 0 at 0.
  add(make_primitive("reciprocal_no_nan", 1, entire, "R",
                     {{{{pos(x * x)}}, {one / x}}, {zero_cell(x), {zero}}},
                     [](std::span<const double> a) {
                       return a[0] != 0.0 ? 1.0 / a[0] : 0.0;
                     }));

  // Two pieces only; the {0} cell is folded into the x <= 0 piece, so the
  // derivative at 0 comes out as -1. Any constant would be equally valid
  // under a different piece table.
  add(make_primitive("abs", 1, entire, "R", {{{{pos(x)}}, {x}}, {{{npos(x)}}, {-x}}},
                     [](std::span<const double> a) { return a[0] > 0.0 ? a[0] : -a[0]; }));

  return reg;
}

const std::map<std::string, Primitive>& registry() {
  static const std::map<std::string, Primitive> reg = build_registry();
  return reg;
}

}  // namespace

const Primitive& lookup(const std::string& name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw UnknownPrimitiveError(name);
  return it->second;
}

bool is_registered(const std::string& name) { return registry().count(name) != 0; }

std::vector<std::string> primitive_names() {
  std::vector<std::string> names;
  for (const auto& [name, p] : registry()) names.push_back(name);
  return names;
}

std::string registry_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [name, p] : registry()) {
    arr.push_back({{"name", name},
                   {"arity", p.arity},
                   {"domain", p.domain_desc},
                   {"piece_count", p.pieces.pieces.size()}});
  }
  return arr.dump(2);
}

GradCheckReport validate_primitive(const Primitive& p, const Sampler& sampler,
                                   std::size_t count, double tol) {
  if (static_cast<int>(sampler.bounds.size()) != p.arity)
    throw std::invalid_argument("validate_primitive: sampler dims != arity");
  const auto points = sampler.draw(count);

  GradCheckReport report;
  for (const auto& pt : points) {
    if (!p.in_domain(pt)) {
      ++report.skipped_points;
      continue;
    }
    ++report.samples;
    const std::vector<double> row = p.ideriv(pt);
    bool point_ok = true;
    std::vector<double> probe(pt);
    for (int i = 0; i < p.arity; ++i) {
      const double h = detail::fd_step(pt[i]);
      probe[i] = pt[i] + h;
      const bool hi_ok = p.in_domain(probe);
      const double fhi = hi_ok ? p.eval_fn(probe) : 0.0;
      probe[i] = pt[i] - h;
      const bool lo_ok = p.in_domain(probe);
      const double flo = lo_ok ? p.eval_fn(probe) : 0.0;
      probe[i] = pt[i];
      if (!hi_ok || !lo_ok) {
        ++report.skipped_coordinates;
        continue;
      }
      const double fd = (fhi - flo) / (2.0 * h);
      const double rel = detail::rel_err(fd, row[i]);
      if (rel > report.worst_rel_err) report.worst_rel_err = rel;
      if (rel > tol) {
        point_ok = false;
        GradCheckFailure fail;
        fail.point = pt;
        fail.coordinate = i;
        fail.intensional = row[i];
        fail.finite_difference = fd;
        // branch forensics: did the FD probes land on a different piece?
        const std::size_t here = p.piece_index(pt);
        probe[i] = pt[i] + h;
        const std::size_t up = p.in_domain(probe) ? p.piece_index(probe) : here;
        probe[i] = pt[i] - h;
        const std::size_t dn = p.in_domain(probe) ? p.piece_index(probe) : here;
        probe[i] = pt[i];
        fail.flip_distance = (up != here || dn != here) ? h : -1.0;
        report.failures.push_back(std::move(fail));
      }
    }
    if (point_ok) ++report.agree;
  }
  report.agreement_fraction =
      report.samples ? static_cast<double>(report.agree) / report.samples : 1.0;
  return report;
}

}  // namespace papdiff
