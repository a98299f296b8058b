#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "dcf/errors.hpp"

namespace dcf {

// All timing/backoff constants that define the DCF contention game.
// Durations are seconds, rates bits/s, sizes bytes.
struct MacPhyParams {
  int w_min = 128;                 // initial contention window, slots
  int m_stages = 5;                // max backoff doubling stages
  double slot_time = 20e-6;        // idle slot duration
  double sifs = 10e-6;
  double difs = 50e-6;
  double phy_header_time = 192e-6; // preamble + PLCP header airtime
  int mac_header_bytes = 34;
  int ack_bytes = 14;
  double data_rate = 1e6;          // bits/s
  int payload_bytes = 1500;
  double prop_delay = 1e-6;
};

// The stock 802.11b long-preamble 1 Mbps profile shipped with the toolkit.
// W is tuned so the saturation plateau lands at about 72.8 pkts/s for
// 1500-byte payloads; the remaining constants are standard 802.11b.
inline MacPhyParams dot11b_1mbps() { return MacPhyParams{}; }

// Full invariant check, used at simulation/config boundaries.
inline void validate_mac_phy(const MacPhyParams& p) {
  auto fail = [](const std::string& msg) {
    throw InvalidArgumentError("MacPhyParams: " + msg);
  };
  if (p.w_min < 2) fail("w_min must be >= 2");
  if (p.m_stages < 0 || p.m_stages > 40) fail("m_stages must be in [0, 40]");
  if (!(p.slot_time > 0.0)) fail("slot_time must be > 0");
  if (!(p.sifs > 0.0)) fail("sifs must be > 0");
  if (!(p.difs > 0.0)) fail("difs must be > 0");
  if (!(p.phy_header_time > 0.0)) fail("phy_header_time must be > 0");
  if (!(p.prop_delay >= 0.0)) fail("prop_delay must be >= 0");
  if (!(p.data_rate > 0.0)) fail("data_rate must be > 0");
  if (p.payload_bytes <= 0) fail("payload_bytes must be > 0");
  if (p.mac_header_bytes < 0) fail("mac_header_bytes must be >= 0");
  if (p.ack_bytes < 0) fail("ack_bytes must be >= 0");
}

struct SlotDurations {
  double t_idle;
  double t_success;
  double t_collision;
};

// Basic-access slot durations. Accepts degenerate (zero-overhead) inputs so
// the pure timing arithmetic can be exercised alone; the strict invariants
// are enforced by validate_mac_phy at system boundaries.
inline SlotDurations slot_durations(const MacPhyParams& p) {
  auto fail = [](const std::string& msg) {
    throw InvalidArgumentError("slot_durations: " + msg);
  };
  if (!(p.data_rate > 0.0)) fail("data_rate must be > 0");
  if (!(p.slot_time >= 0.0) || !(p.sifs >= 0.0) || !(p.difs >= 0.0) ||
      !(p.phy_header_time >= 0.0) || !(p.prop_delay >= 0.0)) {
    fail("durations must be >= 0");
  }
  if (p.payload_bytes < 0 || p.mac_header_bytes < 0 || p.ack_bytes < 0) {
    fail("sizes must be >= 0");
  }
  const double frame_air =
      static_cast<double>(p.mac_header_bytes + p.payload_bytes) * 8.0 / p.data_rate;
  const double ack_air = static_cast<double>(p.ack_bytes) * 8.0 / p.data_rate;
  SlotDurations d;
  d.t_idle = p.slot_time;
  d.t_success = p.phy_header_time + frame_air + p.sifs + p.phy_header_time +
                ack_air + p.difs + 2.0 * p.prop_delay;
  d.t_collision = p.phy_header_time + frame_air + p.difs + p.prop_delay;
  return d;
}

// Attempt probability of a saturated node given conditional collision
// probability p: 2(1-2p) / [(W+1)(1-2p) + pW(1-(2p)^m)].
// Evaluated through the equivalent geometric-sum form
//   2 / (W + 1 + p W sum_{i=0}^{m-1} (2p)^i),
// which is continuous through p = 1/2 (the original expression is 0/0 there;
// the limit 4/(2W + 2 + Wm) falls out of the sum with every term equal to 1).
inline double beta_backoff(double p, int w_min, int m_stages) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgumentError("beta_backoff: p must be a probability in [0,1]");
  }
  if (w_min < 1 || m_stages < 0) {
    throw InvalidArgumentError("beta_backoff: need w_min >= 1 and m_stages >= 0");
  }
  const double w = static_cast<double>(w_min);
  double geom = 0.0;
  double term = 1.0;
  for (int i = 0; i < m_stages; ++i) {
    geom += term;
    term *= 2.0 * p;
  }
  return 2.0 / (w + 1.0 + p * w * geom);
}

// Conditional collision probability seen by one of n saturated nodes whose
// peers attempt with the long-run frequency implied by p: 1-(1-p)^(1/(n-1)).
inline double beta_collision(double p, int n) {
  if (n < 2) {
    throw InvalidArgumentError("beta_collision: n must be >= 2");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgumentError("beta_collision: p must be a probability in [0,1]");
  }
  if (p == 1.0) return 1.0;
  return -std::expm1(std::log1p(-p) / static_cast<double>(n - 1));
}

struct AttemptSolution {
  double beta;
  double p_coll;
};

// Solves the saturation fixed point: the unique p* where the backoff curve
// (non-increasing in p) crosses the collision curve (increasing in p).
// Plain bisection; opposite monotonicity makes the root unique and keeps the
// bracket endpoints opposite-signed throughout.
inline AttemptSolution solve_attempt_probability(int n, const MacPhyParams& params,
                                                 double tol = 1e-12) {
  if (n < 1) {
    throw InvalidArgumentError("solve_attempt_probability: n must be >= 1");
  }
  if (!(tol > 0.0)) {
    throw InvalidArgumentError("solve_attempt_probability: tol must be > 0");
  }
  if (params.w_min < 1 || params.m_stages < 0) {
    throw InvalidArgumentError("solve_attempt_probability: invalid backoff params");
  }
  if (n == 1) {
    // A lone node never collides.
    return {2.0 / (static_cast<double>(params.w_min) + 1.0), 0.0};
  }
  auto f = [&](double p) {
    return beta_backoff(p, params.w_min, params.m_stages) - beta_collision(p, n);
  };
  double lo = 0.0;          // f(0) = 2/(W+1) > 0
  double hi = 1.0;          // f(1) = 2/(2^m W + 1) - 1 < 0
  constexpr int kMaxIter = 200;
  for (int i = 0; i < kMaxIter; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::fabs(fm) < tol) {
      return {beta_backoff(mid, params.w_min, params.m_stages), mid};
    }
    if (fm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NoConvergenceError(
      "solve_attempt_probability: residual tolerance not reached in 200 iterations");
}

struct SlotProbabilities {
  double p_s;
  double p_i;
  double p_c;
};

// Per-slot outcome probabilities when each of n nodes attempts with
// probability beta independently.
inline SlotProbabilities slot_probabilities(double beta, int n) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw InvalidArgumentError("slot_probabilities: beta must be in [0,1]");
  }
  if (n < 1) {
    throw InvalidArgumentError("slot_probabilities: n must be >= 1");
  }
  const double q = 1.0 - beta;
  const double p_i = std::pow(q, n);
  const double p_s = static_cast<double>(n) * beta * std::pow(q, n - 1);
  double p_c = 1.0 - p_s - p_i;
  if (p_c < 0.0 && p_c > -1e-12) p_c = 0.0;  // rounding at the extremes
  return {p_s, p_i, p_c};
}

// Combined per-n slot model: durations, fixed-point solution and slot
// outcome probabilities in one bundle.
struct SlotModel {
  double t_idle;
  double t_success;
  double t_collision;
  double beta;
  double p_coll;
  double p_s;
  double p_i;
  double p_c;
  int n;
};

inline SlotModel make_slot_model(int n, const MacPhyParams& params,
                                 double tol = 1e-12) {
  const SlotDurations d = slot_durations(params);
  const AttemptSolution s = solve_attempt_probability(n, params, tol);
  const SlotProbabilities pr = slot_probabilities(s.beta, n);
  return {d.t_idle, d.t_success, d.t_collision, s.beta, s.p_coll,
          pr.p_s,   pr.p_i,      pr.p_c,        n};
}

// Long-run successful-packet rate of n saturated nodes, by renewal-reward
// over contention slots: S(n) = p_s / (p_i T_I + p_s T_S + p_c T_C).
inline double saturation_throughput(int n, const MacPhyParams& params,
                                    double tol = 1e-12) {
  const SlotModel m = make_slot_model(n, params, tol);
  const double cycle = m.p_i * m.t_idle + m.p_s * m.t_success + m.p_c * m.t_collision;
  return m.p_s / cycle;
}

// The plateau constant C consumed by the delay model: S(n_ref).
inline double saturation_capacity(const MacPhyParams& params, int n_ref = 10) {
  if (n_ref < 2) {
    throw InvalidArgumentError("saturation_capacity: n_ref must be >= 2");
  }
  return saturation_throughput(n_ref, params);
}

}  // namespace dcf
