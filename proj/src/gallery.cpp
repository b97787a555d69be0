#include "papdiff/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "papdiff/errors.hpp"

namespace papdiff {

namespace {

void check_unit_open(double x, const char* what) {
  if (!(x > 0.0) || !(x < 1.0))
    throw DomainError(std::string(what) + " must lie in the open interval (0,1)");
}

}  // namespace

CantorApprox::CantorApprox(double lambda, int depth) : lambda_(lambda), depth_(depth) {
  if (!(lambda > 0.0) || lambda > 1.0)
    throw std::invalid_argument("lambda must lie in (0, 1]");
  if (depth < 1 || depth > 50)
    throw std::invalid_argument("depth must lie in [1, 50]");
}

CantorApprox::Location CantorApprox::locate(double x) const {
  double a = 0.0, b = 1.0;
  double len = lambda_;
  std::uint64_t pos = 0;
  for (int k = 1; k <= depth_; ++k) {
    len /= 3.0;
    const double c = 0.5 * (a + b);
    const double half = 0.5 * len;
    const double lo = c - half;
    const double hi = c + half;
    if (x > lo && x < hi) {
      Location loc;
      loc.survives = false;
      loc.step = k;
      loc.index = pos + 1;
      loc.interval = {lo, hi};
      return loc;
    }
    if (x <= lo) {
      b = lo;
      pos = 2 * pos;
    } else {
      a = hi;
      pos = 2 * pos + 1;
    }
  }
  Location loc;
  loc.survives = true;
  loc.interval = {a, b};
  loc.surviving_pos = pos;
  return loc;
}

double CantorApprox::phi(double x) const {
  check_unit_open(x, "x");
  const Location loc = locate(x);
  if (!loc.survives) {
    // Exact plateau value (2i-1)/2^k; dyadic, hence representable.
    return std::ldexp(static_cast<double>(2 * loc.index - 1), -loc.step);
  }
  const double t = (x - loc.interval.lo) / loc.interval.len();
  return std::ldexp(static_cast<double>(loc.surviving_pos) + t, -depth_);
}

Interval CantorApprox::removed_interval(int step, std::uint64_t index_1based) const {
  if (step < 1 || step > depth_)
    throw std::invalid_argument("step must lie in [1, depth]");
  if (index_1based < 1 || index_1based > removed_count(step))
    throw std::invalid_argument("removal index out of range");
  const std::uint64_t parent = index_1based - 1;  // position among step-1 survivors
  double a = 0.0, b = 1.0;
  double len = lambda_;
  for (int j = 1; j < step; ++j) {
    len /= 3.0;
    const double c = 0.5 * (a + b);
    const double half = 0.5 * len;
    const bool right = (parent >> (step - 1 - j)) & 1;
    if (right)
      a = c + half;
    else
      b = c - half;
  }
  len /= 3.0;
  const double c = 0.5 * (a + b);
  const double half = 0.5 * len;
  return {c - half, c + half};
}

std::vector<Interval> CantorApprox::removed_step(int step) const {
  std::vector<Interval> out;
  const std::uint64_t n = removed_count(step);
  out.reserve(n);
  for (std::uint64_t i = 1; i <= n; ++i) out.push_back(removed_interval(step, i));
  return out;
}

Interval CantorApprox::surviving_interval(std::uint64_t pos) const {
  if (pos >= surviving_count()) throw std::invalid_argument("surviving pos out of range");
  double a = 0.0, b = 1.0;
  double len = lambda_;
  for (int j = 1; j <= depth_; ++j) {
    len /= 3.0;
    const double c = 0.5 * (a + b);
    const double half = 0.5 * len;
    const bool right = (pos >> (depth_ - j)) & 1;
    if (right)
      a = c + half;
    else
      b = c - half;
  }
  return {a, b};
}

double CantorApprox::removed_length() const {
  double len = lambda_;
  double total = 0.0;
  for (int k = 1; k <= depth_; ++k) {
    len /= 3.0;
    total += std::ldexp(len, k - 1);  // 2^{k-1} intervals of length lambda/3^k
  }
  return total;
}

double cantor_fn(double lambda, int depth, double x) {
  return CantorApprox(lambda, depth).phi(x);
}

double cantor_inverse_f(int depth, double x) {
  check_unit_open(x, "x");
  const CantorApprox one(1.0, depth);
  const auto F = [&](double y) { return 0.5 * (one.phi(y) + y); };
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) return mid;
    if (F(mid) < x)
      lo = mid;
    else
      hi = mid;
  }
  throw GalleryError("bisection for F^{-1} did not converge");
}

double bump_g(int depth, double y) {
  check_unit_open(y, "y");
  const CantorApprox one(1.0, depth);
  const auto loc = one.locate(y);
  if (loc.survives) return 0.0;
  const double c = loc.interval.mid();
  const double half = 0.5 * loc.interval.len();
  const double t = (y - c) / half;
  return std::ldexp(1.0 - t * t, -loc.step);
}

double quotient_bound_d(int k) {
  return std::ldexp(1.0, -(k + 1)) + 0.75 * std::pow(3.0, -k);
}

namespace {

// (g o f) on the depth-K construction, through the interval correspondence:
// f maps the (k, i) removed interval of C_{1/2} affinely onto the (k, i)
// removed interval of C_1, preserving relative position, and maps the
// surviving set into the surviving set where g vanishes. No bisection, so
// lattice values come out exact.
double g_of_f_depthK(const CantorApprox& half, double x) {
  const auto loc = half.locate(x);
  if (loc.survives) return 0.0;
  const double c = loc.interval.mid();
  const double halfw = 0.5 * loc.interval.len();
  const double t = (x - c) / halfw;
  return std::ldexp(1.0 - t * t, -loc.step);
}

}  // namespace

ProbeRecord probe_claim1(int depth, double x, int k) {
  if (k < 1 || k > depth)
    throw GalleryError("probe needs 1 <= k <= depth; raise the depth or lower k");
  check_unit_open(x, "x");
  const CantorApprox half(0.5, depth);
  const auto loc = half.locate(x);
  if (!loc.survives)
    throw GalleryError(
        "x falls in a removed interval; the probe requires a point surviving all " +
        std::to_string(depth) + " steps");

  ProbeRecord rec;
  rec.x = x;
  rec.k = k;
  rec.dk = quotient_bound_d(k);

  // Nearby surviving point: an endpoint of x's surviving interval, or of an
  // adjacent one (0 and 1 themselves are removed from the Cantor set and
  // never used).
  const double a = loc.interval.lo, b = loc.interval.hi;
  const std::uint64_t pos = loc.surviving_pos;
  if (x != a && a != 0.0)
    rec.x1 = a;
  else if (x != b && b != 1.0)
    rec.x1 = b;
  else if (pos > 0)
    rec.x1 = half.surviving_interval(pos - 1).hi;
  else if (pos + 1 < half.surviving_count())
    rec.x1 = half.surviving_interval(pos + 1).lo;
  else
    throw GalleryError("no admissible surviving neighbour for the probe");
  rec.q1 = (g_of_f_depthK(half, x) - g_of_f_depthK(half, rec.x1)) / (x - rec.x1);

  // Midpoint of the step-k removal next to x's step-k interval: the parabola
  // peak, height 2^-k, within d(k) of x.
  const std::uint64_t parent_pos = loc.surviving_pos >> (depth - k + 1);
  const Interval removal = half.removed_interval(k, parent_pos + 1);
  rec.x2 = removal.mid();
  rec.q2 = (g_of_f_depthK(half, x) - g_of_f_depthK(half, rec.x2)) / (x - rec.x2);
  return rec;
}

Claim3Report probe_claim3(int depth, std::size_t midpoint_count,
                          std::size_t compose_samples, std::uint64_t seed, Exec exec) {
  const CantorApprox half(0.5, depth);
  const CantorApprox one(1.0, depth);

  const std::uint64_t total = (1ull << depth) - 1;
  const std::uint64_t m = std::min<std::uint64_t>(midpoint_count, total);

  Claim3Report report;
  report.midpoints = m;
  std::vector<double> f_err(m, 0.0), gf_err(m, 0.0);
  for_each_index(m, exec, [&](std::size_t j) {
    // Stride across all removal steps, flattened (k ascending, i ascending).
    std::uint64_t flat = j * total / m;
    int k = 1;
    while (flat >= (1ull << (k - 1))) {
      flat -= 1ull << (k - 1);
      ++k;
    }
    const Interval iv = half.removed_interval(k, flat + 1);
    const double x = iv.mid();
    const double h = iv.len() / 8.0;
    const double fp = cantor_inverse_f(depth, x + h);
    const double fm = cantor_inverse_f(depth, x - h);
    f_err[j] = std::abs((fp - fm) / (2.0 * h) - 2.0);
    gf_err[j] = std::abs((one.phi(fp) - one.phi(fm)) / (2.0 * h));
  });
  for (std::size_t j = 0; j < m; ++j) {
    report.worst_f_slope_err = std::max(report.worst_f_slope_err, f_err[j]);
    report.worst_gf_slope_err = std::max(report.worst_gf_slope_err, gf_err[j]);
  }

  report.compose_samples = compose_samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(1e-9, 1.0 - 1e-9);
  std::vector<double> xs(compose_samples);
  for (auto& x : xs) x = unit(rng);
  std::vector<double> diffs(compose_samples, 0.0);
  for_each_index(compose_samples, exec, [&](std::size_t j) {
    diffs[j] = std::abs(one.phi(cantor_inverse_f(depth, xs[j])) - half.phi(xs[j]));
  });
  for (double d : diffs)
    report.worst_compose_diff = std::max(report.worst_compose_diff, d);
  return report;
}

}  // namespace papdiff
