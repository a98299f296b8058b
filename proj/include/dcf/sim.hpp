#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <vector>

#include "dcf/delay_model.hpp"
#include "dcf/errors.hpp"
#include "dcf/mac_model.hpp"
#include "dcf/rng.hpp"

namespace dcf {

struct SimConfig {
  int n_nodes = 1;
  TrafficSpec traffic;        // one rate per node; ignored when saturated
  MacPhyParams mac_phy;
  double warmup_time = 0.0;   // seconds
  double measure_time = 1.0;  // seconds
  std::uint64_t seed = 1;
  bool saturated = false;     // queues never empty (plateau mode)
  std::size_t queue_cap = 1'000'000;
  bool record_packets = false;
};

// Default warmup: 10% of the measurement window or 50,000 slots,
// whichever is larger.
inline double default_warmup(double measure_time, const MacPhyParams& p) {
  return std::max(0.1 * measure_time, 50000.0 * p.slot_time);
}

struct PacketRecord {
  int node;
  double arrival;  // seconds
  double sojourn;  // seconds
};

struct SimMetrics {
  std::vector<double> delays;  // per-packet sojourns, seconds
  std::uint64_t delivered = 0;
  double sim_throughput = 0.0;  // pkts/s over the measurement span

  std::vector<double> occupancy_trace;  // pi_hat(i), i = 0..n, sums to 1
  double busy_fraction = 0.0;           // 1 - pi_hat(0)
  double mean_occupancy = 0.0;          // time-average of N_s over the span
  double empirical_m_avg = 0.0;         // time-average of C/N_s over busy time
  double capacity_c = 0.0;              // the C used for empirical_m_avg

  std::vector<std::uint64_t> per_node_delivered;
  std::vector<double> per_node_mean_delay;  // NaN where nothing delivered

  // Conservation bookkeeping (packets arriving after warmup).
  std::uint64_t generated = 0;
  std::uint64_t residual = 0;

  // Exact virtual-clock accounting, integer picoseconds.
  std::uint64_t idle_slots = 0;
  std::uint64_t success_slots = 0;
  std::uint64_t collision_slots = 0;
  std::int64_t elapsed_ps = 0;
  std::int64_t t_idle_ps = 0;
  std::int64_t t_success_ps = 0;
  std::int64_t t_collision_ps = 0;

  double elapsed_virtual = 0.0;  // seconds, from time zero
  double measure_span = 0.0;     // seconds, warmup end to final clock

  std::vector<PacketRecord> packets;  // filled when record_packets
};

// Independent Poisson arrival stream: strictly increasing timestamps in
// [0, horizon), seconds.
inline std::vector<double> poisson_arrival_stream(double rate, double horizon,
                                                  std::uint64_t seed) {
  if (!(rate > 0.0)) {
    throw InvalidArgumentError("poisson_arrival_stream: rate must be > 0");
  }
  if (!(horizon >= 0.0)) {
    throw InvalidArgumentError("poisson_arrival_stream: horizon must be >= 0");
  }
  SplitMix64 g(seed);
  std::vector<double> out;
  double t = 0.0;
  for (;;) {
    double gap = g.exponential(rate);
    while (gap <= 0.0) gap = g.exponential(rate);
    t += gap;
    if (t >= horizon) break;
    out.push_back(t);
  }
  return out;
}

// Slot-structured DCF simulation. Contention proceeds in rounds: the nodes
// holding packets freeze a backoff counter; the minimum value mu elapses as
// mu idle slots; the nodes at the minimum transmit. One transmitter is a
// success, several are a collision (stage doubling, capped). Arrivals to an
// idle node draw a fresh stage-0 backoff and join the next round.
//
// The optional trace sink receives one line per slot event:
//   time_us, event{I|S|C}, winner_node|-1, n_nonempty
inline SimMetrics run_simulation(const SimConfig& cfg,
                                 std::ostream* trace = nullptr) {
  validate_mac_phy(cfg.mac_phy);
  if (cfg.n_nodes < 1) {
    throw InvalidArgumentError("SimConfig: n_nodes must be >= 1");
  }
  if (!(cfg.measure_time > 0.0)) {
    throw InvalidArgumentError("SimConfig: measure_time must be > 0");
  }
  if (!(cfg.warmup_time >= 0.0)) {
    throw InvalidArgumentError("SimConfig: warmup_time must be >= 0");
  }
  if (cfg.queue_cap < 1) {
    throw InvalidArgumentError("SimConfig: queue_cap must be >= 1");
  }
  const int n = cfg.n_nodes;
  if (!cfg.saturated) {
    if (static_cast<int>(cfg.traffic.rates.size()) != n) {
      throw InvalidArgumentError("SimConfig: traffic needs one rate per node");
    }
    for (double r : cfg.traffic.rates) {
      if (!(r >= 0.0)) {
        throw InvalidArgumentError("SimConfig: rates must be >= 0");
      }
    }
  }

  const SlotDurations dur = slot_durations(cfg.mac_phy);
  const std::int64_t sigma = std::llround(dur.t_idle * 1e12);
  const std::int64_t ts_ps = std::llround(dur.t_success * 1e12);
  const std::int64_t tc_ps = std::llround(dur.t_collision * 1e12);
  if (sigma <= 0 || ts_ps <= 0 || tc_ps <= 0) {
    throw InvalidArgumentError("SimConfig: slot durations collapse to zero");
  }
  const std::int64_t t_warm = std::llround(cfg.warmup_time * 1e12);
  const std::int64_t t_stop = t_warm + std::llround(cfg.measure_time * 1e12);
  constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

  struct Node {
    std::deque<std::int64_t> queue;  // arrival timestamps, ps
    std::int64_t next_arrival = kNever;
    std::int64_t backoff = 0;  // slots
    int stage = 0;
    bool contending = false;
    SplitMix64 rng{0};
    double rate = 0.0;
    std::int64_t hol_start = 0;  // saturated mode
    std::uint64_t delivered = 0;
    double delay_sum = 0.0;  // seconds
  };
  std::vector<Node> nodes(static_cast<std::size_t>(n));

  auto draw_backoff = [&](Node& nd) {
    const std::uint64_t window = static_cast<std::uint64_t>(cfg.mac_phy.w_min)
                                 << nd.stage;
    nd.backoff = static_cast<std::int64_t>(nd.rng.uniform_below(window));
  };
  auto draw_gap_ps = [&](Node& nd) -> std::int64_t {
    double gap = nd.rng.exponential(nd.rate);
    while (gap <= 0.0) gap = nd.rng.exponential(nd.rate);
    const std::int64_t g = std::llround(gap * 1e12);
    return g > 0 ? g : 1;
  };

  for (int i = 0; i < n; ++i) {
    Node& nd = nodes[static_cast<std::size_t>(i)];
    nd.rng = SplitMix64(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    if (cfg.saturated) {
      nd.contending = true;
      nd.stage = 0;
      draw_backoff(nd);
      nd.hol_start = 0;
    } else {
      nd.rate = cfg.traffic.rates[static_cast<std::size_t>(i)];
      if (nd.rate > 0.0) nd.next_arrival = draw_gap_ps(nd);
    }
  }

  SimMetrics m;
  m.per_node_delivered.assign(static_cast<std::size_t>(n), 0);
  m.t_idle_ps = sigma;
  m.t_success_ps = ts_ps;
  m.t_collision_ps = tc_ps;

  // Occupancy integration at exact event instants, clipped to t >= t_warm.
  std::vector<std::int64_t> occ_ps(static_cast<std::size_t>(n) + 1, 0);
  int n_busy = cfg.saturated ? n : 0;
  std::int64_t last_occ = 0;
  auto advance_occ = [&](std::int64_t to) {
    const std::int64_t from = std::max(last_occ, t_warm);
    if (to > from) occ_ps[static_cast<std::size_t>(n_busy)] += to - from;
    if (to > last_occ) last_occ = to;
  };

  std::uint64_t generated = 0;
  auto ingest_until = [&](std::int64_t tmax) {
    for (;;) {
      int j = -1;
      std::int64_t best = kNever;
      for (int i = 0; i < n; ++i) {
        const std::int64_t a = nodes[static_cast<std::size_t>(i)].next_arrival;
        if (a < best) {
          best = a;
          j = i;
        }
      }
      if (j < 0 || best > tmax) return;
      Node& nd = nodes[static_cast<std::size_t>(j)];
      advance_occ(best);
      if (nd.queue.size() >= cfg.queue_cap) {
        throw QueueOverflowError("run_simulation: queue cap exceeded at node " +
                                 std::to_string(j));
      }
      const bool was_empty = nd.queue.empty();
      nd.queue.push_back(best);
      if (best >= t_warm) ++generated;
      if (was_empty) {
        ++n_busy;
        nd.stage = 0;
        draw_backoff(nd);
        nd.contending = true;
      }
      nd.next_arrival = best + draw_gap_ps(nd);
    }
  };

  char line[64];
  auto emit = [&](std::int64_t at_ps, char ev, int winner) {
    std::snprintf(line, sizeof(line), "%.6f, %c, %d, %d\n",
                  static_cast<double>(at_ps) / 1e6, ev, winner, n_busy);
    *trace << line;
  };

  auto record_delivery = [&](int node_id, std::int64_t arrival,
                             std::int64_t departure, bool in_window) {
    if (!in_window) return;
    Node& nd = nodes[static_cast<std::size_t>(node_id)];
    const double sojourn = static_cast<double>(departure - arrival) / 1e12;
    m.delays.push_back(sojourn);
    m.per_node_delivered[static_cast<std::size_t>(node_id)] += 1;
    nd.delivered += 1;
    nd.delay_sum += sojourn;
    if (cfg.record_packets && !cfg.saturated) {
      m.packets.push_back({node_id, static_cast<double>(arrival) / 1e12, sojourn});
    }
  };

  std::vector<int> winners;
  std::vector<int> members;  // contender snapshot for the current round
  winners.reserve(static_cast<std::size_t>(n));
  members.reserve(static_cast<std::size_t>(n));
  std::int64_t clock = 0;

  while (clock < t_stop) {
    std::int64_t mu = kNever;
    members.clear();
    for (int i = 0; i < n; ++i) {
      const Node& nd = nodes[static_cast<std::size_t>(i)];
      if (nd.contending) {
        members.push_back(i);
        if (nd.backoff < mu) mu = nd.backoff;
      }
    }

    if (mu == kNever) {
      // Empty system: advance whole idle slots until the next arrival (or
      // the stop time) falls inside the last slot.
      std::int64_t t_next = kNever;
      for (const Node& nd : nodes) t_next = std::min(t_next, nd.next_arrival);
      const std::int64_t target = std::min(t_next, t_stop);
      const std::int64_t k = (target - clock + sigma - 1) / sigma;
      if (trace != nullptr) {
        for (std::int64_t j = 0; j < k; ++j) {
          const std::int64_t s = clock + j * sigma;
          ingest_until(s);
          emit(s, 'I', -1);
        }
      }
      clock += k * sigma;
      m.idle_slots += static_cast<std::uint64_t>(k);
      ingest_until(clock);
      continue;
    }

    // Contention round: the contender set and mu are frozen now; arrivals
    // during the round only join the next one.
    winners.clear();
    for (int i : members) {
      if (nodes[static_cast<std::size_t>(i)].backoff == mu) winners.push_back(i);
    }
    const bool success = winners.size() == 1;
    const std::int64_t tx_start = clock + mu * sigma;
    const std::int64_t round_end = tx_start + (success ? ts_ps : tc_ps);

    if (trace != nullptr) {
      for (std::int64_t j = 0; j < mu; ++j) {
        const std::int64_t s = clock + j * sigma;
        ingest_until(s);
        emit(s, 'I', -1);
      }
      ingest_until(tx_start);
      emit(tx_start, success ? 'S' : 'C', success ? winners.front() : -1);
    }
    m.idle_slots += static_cast<std::uint64_t>(mu);
    if (success) {
      m.success_slots += 1;
    } else {
      m.collision_slots += 1;
    }
    clock = round_end;
    ingest_until(round_end);
    advance_occ(round_end);

    for (int i : members) {
      Node& nd = nodes[static_cast<std::size_t>(i)];
      if (nd.backoff > mu) nd.backoff -= mu;  // losers keep counting next round
    }

    if (success) {
      Node& w = nodes[static_cast<std::size_t>(winners.front())];
      if (cfg.saturated) {
        record_delivery(winners.front(), w.hol_start, round_end,
                        round_end > t_warm);
        w.hol_start = round_end;
        w.stage = 0;
        draw_backoff(w);
      } else {
        const std::int64_t arr = w.queue.front();
        w.queue.pop_front();
        record_delivery(winners.front(), arr, round_end, arr >= t_warm);
        if (w.queue.empty()) {
          --n_busy;
          w.contending = false;
        } else {
          // Post-backoff: the next head-of-line packet starts at stage 0.
          w.stage = 0;
          draw_backoff(w);
        }
      }
    } else {
      for (int i : winners) {
        Node& nd = nodes[static_cast<std::size_t>(i)];
        nd.stage = std::min(nd.stage + 1, cfg.mac_phy.m_stages);
        draw_backoff(nd);
      }
    }
  }

  advance_occ(clock);

  // Finalize.
  m.generated = generated;
  for (const Node& nd : nodes) {
    for (std::int64_t arr : nd.queue) {
      if (arr >= t_warm) ++m.residual;
    }
  }
  m.delivered = m.delays.size();
  const std::int64_t span_ps = clock - t_warm;
  const double span_s = static_cast<double>(span_ps) / 1e12;
  m.measure_span = span_s;
  m.elapsed_ps = clock;
  m.elapsed_virtual = static_cast<double>(clock) / 1e12;
  m.sim_throughput = static_cast<double>(m.delivered) / span_s;

  m.occupancy_trace.assign(static_cast<std::size_t>(n) + 1, 0.0);
  std::int64_t busy_ps = 0;
  std::int64_t weighted = 0;
  double harmonic = 0.0;
  for (int k = 0; k <= n; ++k) {
    const std::int64_t t_k = occ_ps[static_cast<std::size_t>(k)];
    m.occupancy_trace[static_cast<std::size_t>(k)] =
        static_cast<double>(t_k) / static_cast<double>(span_ps);
    if (k >= 1) {
      busy_ps += t_k;
      weighted += static_cast<std::int64_t>(k) * t_k;
      harmonic += static_cast<double>(t_k) / static_cast<double>(k);
    }
  }
  m.busy_fraction = static_cast<double>(busy_ps) / static_cast<double>(span_ps);
  m.mean_occupancy =
      static_cast<double>(weighted) / static_cast<double>(span_ps);
  m.capacity_c = saturation_capacity(cfg.mac_phy, 10);
  m.empirical_m_avg =
      busy_ps > 0 ? m.capacity_c * harmonic / static_cast<double>(busy_ps) : 0.0;

  m.per_node_mean_delay.assign(static_cast<std::size_t>(n),
                               std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < n; ++i) {
    const Node& nd = nodes[static_cast<std::size_t>(i)];
    if (nd.delivered > 0) {
      m.per_node_mean_delay[static_cast<std::size_t>(i)] =
          nd.delay_sum / static_cast<double>(nd.delivered);
    }
  }
  return m;
}

struct OccupancyBound {
  double lhs;   // time-average of C/N_s over busy time
  double rhs;   // C * busy_fraction / time-average of N_s
  bool holds;   // lhs >= rhs (sample-path convexity bound)
};

// Convexity bound on the realized occupancy path: the busy-time average of
// C/N_s can never fall below C*busy_fraction divided by the time-average
// occupancy. Both sides are derived from the stored histogram, so the check
// can be replayed with any capacity value.
inline OccupancyBound occupancy_bound_check(const SimMetrics& metrics, double c) {
  if (!(c > 0.0)) {
    throw InvalidArgumentError("occupancy_bound_check: c must be > 0");
  }
  if (!(metrics.busy_fraction > 0.0)) {
    throw DegenerateTraceError("occupancy_bound_check: trace has no busy time");
  }
  double harmonic = 0.0;
  for (std::size_t k = 1; k < metrics.occupancy_trace.size(); ++k) {
    harmonic += metrics.occupancy_trace[k] / static_cast<double>(k);
  }
  OccupancyBound b;
  b.lhs = c * harmonic / metrics.busy_fraction;
  b.rhs = c * metrics.busy_fraction / metrics.mean_occupancy;
  // 1e-12 relative guard: the histogram arithmetic above carries only a
  // handful of roundings, while a real violation would be orders larger.
  b.holds = b.lhs >= b.rhs || (b.rhs - b.lhs) <= 1e-12 * b.rhs;
  return b;
}

}  // namespace dcf
