#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dcf/errors.hpp"

namespace dcf {

// Per-node Poisson arrival rates, packets/second.
struct TrafficSpec {
  std::vector<double> rates;

  bool homogeneous() const {
    for (double r : rates) {
      if (r != rates.front()) return false;
    }
    return !rates.empty();
  }

  static TrafficSpec uniform(std::size_t n, double lambda) {
    return {std::vector<double>(n, lambda)};
  }

  double total() const {
    double s = 0.0;
    for (double r : rates) s += r;
    return s;
  }
};

// Rates must be strictly positive for the analytic formulas (the simulator
// separately tolerates zero-rate nodes).
inline void validate_rates_positive(const std::vector<double>& rates) {
  if (rates.empty()) {
    throw InvalidArgumentError("TrafficSpec: need at least one rate");
  }
  for (double r : rates) {
    if (!(r > 0.0)) {
      throw InvalidArgumentError("TrafficSpec: every rate must be > 0");
    }
  }
}

// Lower bound on the average per-queue service rate when n symmetric
// queues share capacity c and each offers lambda:
//   M_avg = lambda / (1 - (1 - n lambda / c)^(1/n)).
// The expm1/log1p form below is the same expression without cancellation.
inline double service_rate_bound_homogeneous(int n, double lambda, double c) {
  if (n < 1) {
    throw InvalidArgumentError("service_rate_bound_homogeneous: n must be >= 1");
  }
  if (!(lambda > 0.0) || !(c > 0.0)) {
    throw InvalidArgumentError("service_rate_bound_homogeneous: rates must be > 0");
  }
  const double util = static_cast<double>(n) * lambda / c;
  if (util >= 1.0) {
    throw UnstableLoadError("service_rate_bound_homogeneous: n*lambda >= c");
  }
  const double denom = -std::expm1(std::log1p(-util) / static_cast<double>(n));
  return lambda / denom;
}

// Steady-state probability that a queue with arrival rate lambda and service
// rate m_avg is empty: 1 - lambda/m_avg.
inline double empty_probability(double lambda, double m_avg) {
  if (!(lambda > 0.0)) {
    throw InvalidArgumentError("empty_probability: lambda must be > 0");
  }
  if (!(lambda < m_avg)) {
    throw UnstableLoadError("empty_probability: lambda >= m_avg (unstable queue)");
  }
  return 1.0 - lambda / m_avg;
}

// Closed-form mean sojourn bound for the homogeneous case:
//   d = (1/lambda) ((1 - n lambda / c)^(-1/n) - 1),
// identically 1/(c - lambda) at n = 1 and increasing in lambda and n.
inline double mean_delay_homogeneous(int n, double lambda, double c) {
  if (n < 1) {
    throw InvalidArgumentError("mean_delay_homogeneous: n must be >= 1");
  }
  if (!(lambda > 0.0) || !(c > 0.0)) {
    throw InvalidArgumentError("mean_delay_homogeneous: rates must be > 0");
  }
  const double util = static_cast<double>(n) * lambda / c;
  if (util >= 1.0) {
    throw UnstableLoadError("mean_delay_homogeneous: n*lambda >= c");
  }
  return std::expm1(-std::log1p(-util) / static_cast<double>(n)) / lambda;
}

// Root of  1 - (sum_i lambda_i)/c = prod_i (1 - lambda_i/M)  in M.
// The right side is strictly increasing in M on (max lambda_i, inf), so the
// root is unique; at M = c the product already dominates the left side
// (Weierstrass product inequality), which makes (max lambda_i, c] a valid
// bracket. A doubling fallback guards the degenerate equality case.
inline double solve_service_rate_nonhomogeneous(const std::vector<double>& rates,
                                                double c, double tol = 1e-10) {
  validate_rates_positive(rates);
  if (!(c > 0.0)) {
    throw InvalidArgumentError("solve_service_rate_nonhomogeneous: c must be > 0");
  }
  if (!(tol > 0.0)) {
    throw InvalidArgumentError("solve_service_rate_nonhomogeneous: tol must be > 0");
  }
  double sum = 0.0;
  double rmax = 0.0;
  for (double r : rates) {
    sum += r;
    rmax = std::max(rmax, r);
  }
  if (sum >= c) {
    throw UnstableLoadError("solve_service_rate_nonhomogeneous: sum(rates) >= c");
  }
  if (rates.size() == 1) {
    return c;  // single factor: 1 - lambda/c = 1 - lambda/M
  }
  const double lhs = 1.0 - sum / c;
  auto h = [&](double m) {
    double prod = 1.0;
    for (double r : rates) prod *= 1.0 - r / m;
    return lhs - prod;  // decreasing in m
  };
  double lo = rmax * (1.0 + 1e-12);
  double hi = c;
  int doublings = 0;
  while (h(hi) > 0.0) {
    hi *= 2.0;
    if (++doublings > 64) {
      throw NoConvergenceError(
          "solve_service_rate_nonhomogeneous: could not bracket the root");
    }
  }
  constexpr int kMaxIter = 200;
  for (int i = 0; i < kMaxIter; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (std::fabs(hm) < tol && (hi - lo) < 1e-13 * mid) {
      return mid;
    }
    if (hm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mid = 0.5 * (lo + hi);
  if (std::fabs(h(mid)) < tol) {
    return mid;
  }
  throw NoConvergenceError(
      "solve_service_rate_nonhomogeneous: tolerance not reached in 200 iterations");
}

// Per-node mean sojourn bounds d_i = 1/(M_avg - lambda_i) with M_avg from the
// non-homogeneous solver.
inline std::vector<double> mean_delay_per_node(const std::vector<double>& rates,
                                               double c, double tol = 1e-10) {
  const double m_avg = solve_service_rate_nonhomogeneous(rates, c, tol);
  std::vector<double> out;
  out.reserve(rates.size());
  for (double r : rates) {
    out.push_back(1.0 / (m_avg - r));
  }
  return out;
}

struct StabilityReport {
  double utilization;  // sum(rates)/c
  bool stable;         // true iff utilization < 1
};

inline StabilityReport stability_check(const std::vector<double>& rates, double c) {
  if (!(c > 0.0)) {
    throw InvalidArgumentError("stability_check: c must be > 0");
  }
  double sum = 0.0;
  for (double r : rates) sum += r;
  const double util = sum / c;
  return {util, util < 1.0};
}

// Aggregated analytic outputs for one traffic configuration.
struct DelayReport {
  double capacity_c;
  double m_avg_bound;
  double p_empty;                           // at the mean rate
  std::vector<double> per_node_delay_bound;
  double utilization;
};

inline DelayReport make_delay_report(const TrafficSpec& traffic, double c,
                                     double tol = 1e-10) {
  validate_rates_positive(traffic.rates);
  DelayReport rep;
  rep.capacity_c = c;
  const int n = static_cast<int>(traffic.rates.size());
  if (traffic.homogeneous()) {
    rep.m_avg_bound = service_rate_bound_homogeneous(n, traffic.rates.front(), c);
  } else {
    rep.m_avg_bound = solve_service_rate_nonhomogeneous(traffic.rates, c, tol);
  }
  const double mean_rate = traffic.total() / static_cast<double>(n);
  rep.p_empty = empty_probability(mean_rate, rep.m_avg_bound);
  rep.per_node_delay_bound.reserve(traffic.rates.size());
  for (double r : traffic.rates) {
    rep.per_node_delay_bound.push_back(1.0 / (rep.m_avg_bound - r));
  }
  rep.utilization = traffic.total() / c;
  return rep;
}

}  // namespace dcf
