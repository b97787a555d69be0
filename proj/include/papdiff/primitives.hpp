#pragma once

#include <span>
#include <string>
#include <vector>

#include "papdiff/pap.hpp"
#include "papdiff/report.hpp"
#include "papdiff/sampling.hpp"

namespace papdiff {

struct Sampler;

// A registered scalar primitive: its domain, its piece table (the chosen PAP
// representation), and through that table its designated intensional
// derivative. The derivative at every point, including piece boundaries, is
// the evaluation of D(pieces) -- one source of truth, so the two can never
// drift apart.
struct Primitive {
  std::string name;
  int arity = 0;
  AnalyticSet domain;  // over R^arity
  std::string domain_desc;
  PapRepr pieces;        // primal table; components mirror eval_fn op for op
  PapRepr deriv_pieces;  // D(pieces), built once at registration
  double (*eval_fn)(std::span<const double>) = nullptr;

  bool in_domain(std::span<const double> args) const;
  // Scalar evaluation; DomainError outside the domain.
  double call(std::span<const double> args) const;
  // Designated intensional derivative row, 1 x arity. Total on the domain:
  // never NaN, never +-inf at the designated non-differentiable points.
  std::vector<double> ideriv(std::span<const double> args) const;
  // Piece index of pieces containing args (branch signature for forensics).
  std::size_t piece_index(std::span<const double> args) const;
};

// Registry built once at startup, immutable afterwards.
const Primitive& lookup(const std::string& name);
bool is_registered(const std::string& name);
std::vector<std::string> primitive_names();  // sorted
// name, arity, domain description, piece count per registered primitive.
std::string registry_json();

std::vector<double> primitive_ideriv(const Primitive& p, std::span<const double> args);

// Sampled agreement of the designated derivative against central finite
// differences, per coordinate, over the sampler's box (which must sit inside
// the primitive's domain).
GradCheckReport validate_primitive(const Primitive& p, const Sampler& sampler,
                                   std::size_t count, double tol);

}  // namespace papdiff
