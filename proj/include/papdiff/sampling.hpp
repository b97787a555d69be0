#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace papdiff {

// Seeded uniform sampler over an axis-aligned box, one interval per input.
// Draws are reproducible given the seed; a continuous distribution hits any
// particular guard zero with probability ~0.
struct Sampler {
  std::vector<std::pair<double, double>> bounds;
  std::uint64_t seed = 12345;

  static Sampler box(int dims, double lo, double hi, std::uint64_t seed = 12345);

  // All points drawn up front from one generator, so results do not depend
  // on how callers later split the work across threads.
  std::vector<std::vector<double>> draw(std::size_t count) const;
};

}  // namespace papdiff
