#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "dcf/errors.hpp"

namespace dcf {

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) {
    throw InvalidArgumentError("mean: empty sample");
  }
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Unbiased sample variance (n-1 denominator).
inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) {
    throw InvalidArgumentError("sample_variance: need at least 2 samples");
  }
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

// Two-sided Student-t multiplier at the given confidence level, e.g.
// confidence 0.95 with 29 dof -> 2.045.
inline double student_t_multiplier(double confidence, unsigned dof) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidArgumentError("student_t_multiplier: confidence must be in (0,1)");
  }
  if (dof < 1) {
    throw InvalidArgumentError("student_t_multiplier: dof must be >= 1");
  }
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.5 + confidence / 2.0);
}

// Half-width of the two-sided CI on the mean of xs.
inline double ci_halfwidth(const std::vector<double>& xs, double confidence) {
  const double var = sample_variance(xs);  // validates size >= 2
  const double se = std::sqrt(var / static_cast<double>(xs.size()));
  return student_t_multiplier(confidence, static_cast<unsigned>(xs.size() - 1)) * se;
}

}  // namespace dcf
