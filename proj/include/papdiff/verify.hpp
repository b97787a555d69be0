#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "papdiff/expr.hpp"
#include "papdiff/parallel.hpp"
#include "papdiff/report.hpp"
#include "papdiff/sampling.hpp"

namespace papdiff {

// Cross-mode and representation tolerances. Modes sum identical local
// derivatives in different association orders, hence the looser bound.
inline constexpr double kModeRelTol = 1e-10;
inline constexpr double kReprDerivRelTol = 1e-12;
inline constexpr double kFdRelTol = 1e-4;

// Compares symbolic_jacobian against central finite differences, coordinate
// by coordinate, at count sampled points. Coordinates whose FD probe leaves
// the program's domain are skipped and counted separately.
GradCheckReport gradcheck(const Program& prog, const Sampler& sampler,
                          std::size_t count, double tol,
                          Exec exec = Exec::parallel);

struct ModeConsistencyReport {
  std::uint64_t samples = 0;
  std::uint64_t agree = 0;
  std::uint64_t skipped = 0;  // domain errors at the sample point
  double worst_rel_err = 0.0;
  struct Failure {
    std::vector<double> point;
    double rel_err;
    std::string what;
  };
  std::vector<Failure> failures;
  bool all_agree() const { return agree + skipped == samples && failures.empty(); }
};

// jvp / vjp / symbolic-row cross-checks with random tangents and cotangents
// at sampled points.
ModeConsistencyReport mode_consistency(const Program& prog, const Sampler& sampler,
                                       std::size_t count, Exec exec = Exec::parallel);

struct ReprEquivalenceReport {
  std::uint64_t samples = 0;
  std::uint64_t eval_equal = 0;     // [[gamma]](v) == eval(e, v), exact
  std::uint64_t deriv_agree = 0;    // [[D gamma]](v) vs symbolic row, rel tol
  std::uint64_t exclusive = 0;      // exactly one piece cell contains v
  std::uint64_t skipped = 0;
  std::size_t piece_count = 0;
  double worst_rel_err = 0.0;
  struct Failure {
    std::vector<double> point;
    std::string what;
  };
  std::vector<Failure> failures;
  bool ok() const {
    return eval_equal + skipped == samples && deriv_agree + skipped == samples &&
           exclusive + skipped == samples;
  }
};

// Materialises expr_to_repr(e) once, then checks the evaluation identity
// exactly, the derivative identity at kReprDerivRelTol, and partition
// exclusivity, at count sampled points.
ReprEquivalenceReport repr_equivalence(const Program& prog, const Sampler& sampler,
                                       std::size_t count, Exec exec = Exec::parallel);

// Reproducible random programs. Node weights: 40% primitive calls, 20%
// conditionals, 20% inputs, 20% constants. log and sqrt arguments and div
// divisors are wrapped as add(relu(.), 0.5) so no call is unconditionally
// out of domain; candidates are probe-checked on [-1,1]^N (finite value and
// derivative row, materialisable piece table) and redrawn otherwise.
std::vector<Program> generate_corpus(std::uint64_t seed, std::size_t count,
                                     int max_depth, int dims);

}  // namespace papdiff
