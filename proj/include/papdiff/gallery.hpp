#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "papdiff/parallel.hpp"

namespace papdiff {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double len() const { return hi - lo; }
};

// Depth-K lambda-Cantor construction on (0,1): at each step k <= K an open
// interval of length lambda/3^k is removed from the middle of every
// surviving closed interval. Intervals are recovered on demand by walking
// the binary tree of surviving intervals, so the same endpoints come out of
// every query and no tables are stored.
class CantorApprox {
 public:
  CantorApprox(double lambda, int depth);

  double lambda() const { return lambda_; }
  int depth() const { return depth_; }

  // Depth-K approximant of the lambda-Cantor function: the exact plateau
  // value (2i-1)/2^k on step-k removed intervals, linear interpolation on
  // the surviving intervals. Monotone nondecreasing. x must be in (0,1).
  double phi(double x) const;

  // i-th (1-based, left to right) interval removed at the given step.
  Interval removed_interval(int step, std::uint64_t index_1based) const;
  std::vector<Interval> removed_step(int step) const;
  std::uint64_t removed_count(int step) const { return 1ull << (step - 1); }

  // Closed surviving interval at depth K; pos in [0, 2^K).
  Interval surviving_interval(std::uint64_t pos) const;
  std::uint64_t surviving_count() const { return 1ull << depth_; }

  struct Location {
    bool survives = false;
    int step = 0;                 // removal step when !survives
    std::uint64_t index = 0;      // 1-based removal index within that step
    Interval interval;            // removed interval, or depth-K surviving interval
    std::uint64_t surviving_pos = 0;
  };
  Location locate(double x) const;

  // Sum of removed lengths over steps <= K: lambda * (1 - (2/3)^K).
  double removed_length() const;

 private:
  double lambda_;
  int depth_;
};

double cantor_fn(double lambda, int depth, double x);

// f = F^{-1} for F(y) = (phi_1(y) + y) / 2, by monotone bisection on the
// depth-K approximant of F.
double cantor_inverse_f(int depth, double x);

// Parabolic bumps of height 2^-k over the step-k removed intervals of the
// 1-Cantor set, zero on the depth-K surviving set.
double bump_g(int depth, double y);

// d(k) = 1/2 * 2^-k + 3/4 * 3^-k, the probe distance bound.
double quotient_bound_d(int k);

struct ProbeRecord {
  double x = 0.0;   // base point, surviving at depth K
  double x1 = 0.0;  // nearby surviving point: difference quotient q1
  double x2 = 0.0;  // step-k removed-interval midpoint: difference quotient q2
  double q1 = 0.0;
  double q2 = 0.0;
  int k = 0;
  double dk = 0.0;
};

// Difference-quotient probe at a surviving point x of the depth-K C_{1/2}:
// finds x1 with quotient exactly 0 and x2 with |quotient| > 1 while
// |x - x2| <= d(k). x must be an endpoint of a depth-K surviving interval.
ProbeRecord probe_claim1(int depth, double x, int k);

struct Claim3Report {
  std::size_t midpoints = 0;
  double worst_f_slope_err = 0.0;   // max |slope(f) - 2| at removed midpoints
  double worst_gf_slope_err = 0.0;  // max |slope(phi_1 o f)| at removed midpoints
  std::size_t compose_samples = 0;
  double worst_compose_diff = 0.0;  // max |phi_1(f(x)) - phi_{1/2}(x)|
};

// Central-difference slopes of f and phi_1 o f at removed-interval midpoints
// of C_{1/2}, plus the pointwise comparison of phi_1 o f against the depth-K
// phi_{1/2}.
Claim3Report probe_claim3(int depth, std::size_t midpoint_count,
                          std::size_t compose_samples, std::uint64_t seed,
                          Exec exec = Exec::parallel);

}  // namespace papdiff
