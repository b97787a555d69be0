#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace papdiff {

struct GradCheckFailure {
  std::vector<double> point;
  int coordinate = 0;         // which partial disagreed
  double intensional = 0.0;
  double finite_difference = 0.0;
  double flip_distance = -1.0;  // |h| at which the branch signature flipped; -1 if none observed
};

// Sampled agreement between an intensional derivative and central finite
// differences. agree counts points whose every checked coordinate matched;
// coordinates whose FD probe left the domain are skipped and counted apart.
struct GradCheckReport {
  std::uint64_t samples = 0;  // points where the derivative was computed
  std::uint64_t agree = 0;
  std::uint64_t skipped_points = 0;       // domain error at the sample point itself
  std::uint64_t skipped_coordinates = 0;  // FD probe left the domain
  double agreement_fraction = 0.0;
  double worst_rel_err = 0.0;
  std::vector<GradCheckFailure> failures;
};

std::string gradcheck_report_json(const GradCheckReport& report);

}  // namespace papdiff
