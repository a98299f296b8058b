#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "dcf/delay_model.hpp"
#include "dcf/errors.hpp"
#include "dcf/mac_model.hpp"
#include "dcf/rng.hpp"
#include "dcf/sim.hpp"
#include "dcf/stats.hpp"

namespace dcf {

enum class ExperimentMode {
  throughput_vs_n,
  delay_vs_lambda,
  delay_vs_n,
  table_check,
  nonhomogeneous,
};

struct ExperimentSpec {
  ExperimentMode mode = ExperimentMode::delay_vs_lambda;
  std::vector<double> lambda_grid;  // delay_vs_lambda
  std::vector<int> n_grid;          // delay_vs_n, throughput_vs_n
  double lambda_fixed = 0.0;        // delay_vs_n
  std::vector<double> rates;        // nonhomogeneous
  int replications = 30;
  double confidence = 0.95;
  double error_threshold = 0.15;    // configuration, not baked into math
  SimConfig base;                   // mac_phy, seed, timing template
  std::string output_path = "-";    // "-" = stdout
  std::string profile_label = "builtin:dot11b-1mbps";
};

struct ComparisonRow {
  int n = 0;
  double lambda = 0.0;
  int node = -1;  // per-node rows only
  double utilization = 0.0;
  double analytic_delay = std::numeric_limits<double>::quiet_NaN();
  double sim_mean_delay = std::numeric_limits<double>::quiet_NaN();
  double ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  double printed_utilization = std::numeric_limits<double>::quiet_NaN();
  bool within_threshold = false;
  std::string status = "ok";
};

struct ReplicateResult {
  double mean_delay = 0.0;
  double ci_halfwidth = 0.0;
  int completed = 0;
};

namespace detail {

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

constexpr std::uint64_t kReplicateSalt = 1000003;

inline SimConfig replicate_config(const SimConfig& base, int rep) {
  SimConfig cfg = base;
  cfg.seed = derive_seed(base.seed, kReplicateSalt + static_cast<std::uint64_t>(rep));
  return cfg;
}

struct OutputSink {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit OutputSink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file.open(path, std::ios::binary);
      if (!file) {
        throw InvalidArgumentError("cannot open output file: " + path);
      }
      os = &file;
    }
  }
};

inline void write_metadata(std::ostream& os, const ExperimentSpec& spec, double c) {
  os << "# profile: " << spec.profile_label << "\n";
  os << "# capacity_c: " << fmt9(c) << "\n";
  os << "# seed: " << spec.base.seed << "\n";
  os << "# generator: " << kGeneratorName << "\n";
}

}  // namespace detail

// Runs `runs` simulations with per-replication derived seeds and returns the
// sample mean of the per-run mean delays plus the Student-t CI half-width.
// Runs that overflow their queues (or deliver nothing) are dropped; fewer
// than two usable runs is an error.
inline ReplicateResult replicate(const SimConfig& base, int runs, double confidence) {
  if (runs < 2) {
    throw InvalidArgumentError("replicate: need at least 2 runs");
  }
  std::vector<double> run_means;
  run_means.reserve(static_cast<std::size_t>(runs));
  for (int rep = 0; rep < runs; ++rep) {
    try {
      const SimMetrics m = run_simulation(detail::replicate_config(base, rep));
      if (m.delivered > 0) {
        run_means.push_back(mean(m.delays));
      }
    } catch (const QueueOverflowError&) {
      // unstable run, excluded
    }
  }
  if (run_means.size() < 2) {
    throw AllRunsUnstableError("replicate: fewer than 2 usable runs");
  }
  ReplicateResult r;
  r.mean_delay = mean(run_means);
  r.ci_halfwidth = ci_halfwidth(run_means, confidence);
  r.completed = static_cast<int>(run_means.size());
  return r;
}

struct PerNodeReplicate {
  std::vector<double> mean_delay;
  std::vector<double> ci_halfwidth;
  int completed = 0;
};

inline PerNodeReplicate replicate_per_node(const SimConfig& base, int runs,
                                           double confidence) {
  if (runs < 2) {
    throw InvalidArgumentError("replicate_per_node: need at least 2 runs");
  }
  const std::size_t n = static_cast<std::size_t>(base.n_nodes);
  std::vector<std::vector<double>> samples(n);
  int completed = 0;
  for (int rep = 0; rep < runs; ++rep) {
    try {
      const SimMetrics m = run_simulation(detail::replicate_config(base, rep));
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isnan(m.per_node_mean_delay[i])) {
          samples[i].push_back(m.per_node_mean_delay[i]);
        }
      }
      ++completed;
    } catch (const QueueOverflowError&) {
    }
  }
  PerNodeReplicate out;
  out.completed = completed;
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].size() < 2) {
      throw AllRunsUnstableError("replicate_per_node: node " + std::to_string(i) +
                                 " has fewer than 2 usable runs");
    }
    out.mean_delay.push_back(mean(samples[i]));
    out.ci_halfwidth.push_back(ci_halfwidth(samples[i], confidence));
  }
  return out;
}

namespace detail {

inline double resolved_warmup(const SimConfig& base) {
  return base.warmup_time > 0.0 ? base.warmup_time
                                : default_warmup(base.measure_time, base.mac_phy);
}

inline void write_comparison_header(std::ostream& os, bool table_columns,
                                    bool per_node) {
  if (per_node) {
    os << "node,rate,utilization,analytic_delay_s,sim_mean_delay_s,"
          "ci_halfwidth_s,rel_error,status\n";
  } else if (table_columns) {
    os << "n,lambda,printed_utilization,utilization,analytic_delay_s,"
          "sim_mean_delay_s,ci_halfwidth_s,rel_error,within_threshold,status\n";
  } else {
    os << "n,lambda,utilization,analytic_delay_s,sim_mean_delay_s,"
          "ci_halfwidth_s,rel_error,status\n";
  }
}

inline void write_comparison_row(std::ostream& os, const ComparisonRow& r,
                                 bool table_columns, bool per_node) {
  if (per_node) {
    os << r.node << ',' << fmt9(r.lambda) << ',' << fmt9(r.utilization) << ','
       << fmt9(r.analytic_delay) << ',' << fmt9(r.sim_mean_delay) << ','
       << fmt9(r.ci_halfwidth) << ',' << fmt9(r.rel_error) << ',' << r.status
       << '\n';
    return;
  }
  os << r.n << ',' << fmt9(r.lambda) << ',';
  if (table_columns) {
    os << fmt9(r.printed_utilization) << ',';
  }
  os << fmt9(r.utilization) << ',' << fmt9(r.analytic_delay) << ','
     << fmt9(r.sim_mean_delay) << ',' << fmt9(r.ci_halfwidth) << ','
     << fmt9(r.rel_error) << ',';
  if (table_columns) {
    os << (r.within_threshold ? 1 : 0) << ',';
  }
  os << r.status << '\n';
}

// One analytic-vs-simulated comparison point for homogeneous traffic.
inline ComparisonRow compare_point(const ExperimentSpec& spec, int n, double lambda,
                                   double c) {
  ComparisonRow row;
  row.n = n;
  row.lambda = lambda;
  row.utilization = static_cast<double>(n) * lambda / c;
  if (row.utilization >= 1.0) {
    row.status = "unstable";
    return row;
  }
  row.analytic_delay = mean_delay_homogeneous(n, lambda, c);
  SimConfig cfg = spec.base;
  cfg.n_nodes = n;
  cfg.saturated = false;
  cfg.traffic = TrafficSpec::uniform(static_cast<std::size_t>(n), lambda);
  cfg.warmup_time = resolved_warmup(spec.base);
  const ReplicateResult rep = replicate(cfg, spec.replications, spec.confidence);
  row.sim_mean_delay = rep.mean_delay;
  row.ci_halfwidth = rep.ci_halfwidth;
  row.rel_error = std::fabs(row.analytic_delay - row.sim_mean_delay) / row.sim_mean_delay;
  row.within_threshold = row.rel_error <= spec.error_threshold;
  row.status = row.utilization >= 0.85 ? "heavy-load" : "ok";
  return row;
}

}  // namespace detail

// Delay versus offered rate at a fixed node count.
inline std::vector<ComparisonRow> sweep_delay_vs_lambda(const ExperimentSpec& spec) {
  if (spec.lambda_grid.empty()) {
    throw InvalidArgumentError("sweep_delay_vs_lambda: empty lambda grid");
  }
  if (spec.base.n_nodes < 1) {
    throw InvalidArgumentError("sweep_delay_vs_lambda: base.n_nodes must be >= 1");
  }
  std::vector<double> grid = spec.lambda_grid;
  std::sort(grid.begin(), grid.end());
  const double c = saturation_capacity(spec.base.mac_phy);
  std::vector<ComparisonRow> rows;
  rows.reserve(grid.size());
  for (double lambda : grid) {
    rows.push_back(detail::compare_point(spec, spec.base.n_nodes, lambda, c));
  }
  detail::OutputSink sink(spec.output_path);
  detail::write_metadata(*sink.os, spec, c);
  detail::write_comparison_header(*sink.os, false, false);
  for (const ComparisonRow& r : rows) {
    detail::write_comparison_row(*sink.os, r, false, false);
  }
  return rows;
}

// Delay versus node count at a fixed per-node rate.
inline std::vector<ComparisonRow> sweep_delay_vs_n(const ExperimentSpec& spec) {
  if (spec.n_grid.empty()) {
    throw InvalidArgumentError("sweep_delay_vs_n: empty n grid");
  }
  if (!(spec.lambda_fixed > 0.0)) {
    throw InvalidArgumentError("sweep_delay_vs_n: lambda must be > 0");
  }
  std::vector<int> grid = spec.n_grid;
  std::sort(grid.begin(), grid.end());
  const double c = saturation_capacity(spec.base.mac_phy);
  std::vector<ComparisonRow> rows;
  rows.reserve(grid.size());
  for (int n : grid) {
    rows.push_back(detail::compare_point(spec, n, spec.lambda_fixed, c));
  }
  detail::OutputSink sink(spec.output_path);
  detail::write_metadata(*sink.os, spec, c);
  detail::write_comparison_header(*sink.os, false, false);
  for (const ComparisonRow& r : rows) {
    detail::write_comparison_row(*sink.os, r, false, false);
  }
  return rows;
}

// Reference operating points: (n, lambda) pairs together with the
// utilization figure each row is expected to show. The n=5 row's printed
// utilization is inconsistent with its rate (0.69 vs the computed 0.89), so
// table_check emits it flagged and adds a second row with lambda back-derived
// from the expected utilization.
struct ReferencePoint {
  int n;
  double lambda;
  double printed_utilization;
};

inline const std::vector<ReferencePoint>& reference_table() {
  static const std::vector<ReferencePoint> rows = {
      {3, 17.0, 0.70}, {4, 13.0, 0.71}, {5, 13.0, 0.69}, {6, 6.0, 0.49},
      {7, 4.0, 0.39},  {8, 3.0, 0.33},  {9, 3.0, 0.37},  {10, 3.0, 0.41},
  };
  return rows;
}

inline std::vector<ComparisonRow> table_check(const ExperimentSpec& spec) {
  const double c = saturation_capacity(spec.base.mac_phy);
  std::vector<ComparisonRow> rows;
  for (const ReferencePoint& ref : reference_table()) {
    ComparisonRow row = detail::compare_point(spec, ref.n, ref.lambda, c);
    row.printed_utilization = ref.printed_utilization;
    if (std::fabs(row.utilization - ref.printed_utilization) > 0.01) {
      row.status = "util-mismatch";
      // Second interpretation: keep the utilization figure, re-derive lambda.
      const double lambda2 = ref.printed_utilization * c / ref.n;
      ComparisonRow alt = detail::compare_point(spec, ref.n, lambda2, c);
      alt.printed_utilization = ref.printed_utilization;
      alt.status = "ratio-derived";
      rows.push_back(row);
      rows.push_back(alt);
    } else {
      rows.push_back(row);
    }
  }
  detail::OutputSink sink(spec.output_path);
  detail::write_metadata(*sink.os, spec, c);
  detail::write_comparison_header(*sink.os, true, false);
  for (const ComparisonRow& r : rows) {
    detail::write_comparison_row(*sink.os, r, true, false);
  }
  return rows;
}

struct ThroughputRow {
  int n;
  double analytic;   // pkts/s
  double simulated;  // pkts/s
  double rel_deviation;
};

struct ThroughputCurve {
  std::vector<ThroughputRow> rows;
  double plateau_spread;  // (max-min)/max of analytic S(n) over n >= 5
};

// Analytic S(n) next to saturated-simulator throughput.
inline ThroughputCurve throughput_curve(const ExperimentSpec& spec) {
  if (spec.n_grid.empty()) {
    throw InvalidArgumentError("throughput_curve: empty n grid");
  }
  std::vector<int> grid = spec.n_grid;
  std::sort(grid.begin(), grid.end());
  ThroughputCurve out;
  double plat_min = std::numeric_limits<double>::infinity();
  double plat_max = 0.0;
  for (int n : grid) {
    ThroughputRow row;
    row.n = n;
    row.analytic = saturation_throughput(n, spec.base.mac_phy);
    SimConfig cfg = spec.base;
    cfg.n_nodes = n;
    cfg.saturated = true;
    cfg.traffic.rates.clear();
    cfg.warmup_time = detail::resolved_warmup(spec.base);
    cfg.seed = derive_seed(spec.base.seed, 7000 + static_cast<std::uint64_t>(n));
    const SimMetrics m = run_simulation(cfg);
    row.simulated = m.sim_throughput;
    row.rel_deviation = std::fabs(row.analytic - row.simulated) / row.analytic;
    if (n >= 5) {
      plat_min = std::min(plat_min, row.analytic);
      plat_max = std::max(plat_max, row.analytic);
    }
    out.rows.push_back(row);
  }
  out.plateau_spread =
      plat_max > 0.0 ? (plat_max - plat_min) / plat_max
                     : std::numeric_limits<double>::quiet_NaN();
  const double c = saturation_capacity(spec.base.mac_phy);
  detail::OutputSink sink(spec.output_path);
  detail::write_metadata(*sink.os, spec, c);
  *sink.os << "n,analytic_pkts_per_s,simulated_pkts_per_s,rel_deviation\n";
  for (const ThroughputRow& r : out.rows) {
    *sink.os << r.n << ',' << detail::fmt9(r.analytic) << ','
             << detail::fmt9(r.simulated) << ',' << detail::fmt9(r.rel_deviation)
             << '\n';
  }
  *sink.os << "# plateau_spread_n_ge_5: " << detail::fmt9(out.plateau_spread)
           << "\n";
  return out;
}

// Per-node analytic bounds against per-node simulated sojourns for a
// non-homogeneous rate vector.
inline std::vector<ComparisonRow> nonhomogeneous_check(const ExperimentSpec& spec) {
  validate_rates_positive(spec.rates);
  const double c = saturation_capacity(spec.base.mac_phy);
  double sum = 0.0;
  for (double r : spec.rates) sum += r;
  if (sum >= c) {
    throw UnstableLoadError("nonhomogeneous_check: sum(rates) >= capacity");
  }
  const std::vector<double> analytic = mean_delay_per_node(spec.rates, c);
  SimConfig cfg = spec.base;
  cfg.n_nodes = static_cast<int>(spec.rates.size());
  cfg.saturated = false;
  cfg.traffic = TrafficSpec{spec.rates};
  cfg.warmup_time = detail::resolved_warmup(spec.base);
  const PerNodeReplicate rep =
      replicate_per_node(cfg, spec.replications, spec.confidence);
  const double util = sum / c;
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < spec.rates.size(); ++i) {
    ComparisonRow row;
    row.n = static_cast<int>(spec.rates.size());
    row.node = static_cast<int>(i);
    row.lambda = spec.rates[i];
    row.utilization = util;
    row.analytic_delay = analytic[i];
    row.sim_mean_delay = rep.mean_delay[i];
    row.ci_halfwidth = rep.ci_halfwidth[i];
    row.rel_error =
        std::fabs(row.analytic_delay - row.sim_mean_delay) / row.sim_mean_delay;
    row.within_threshold = row.rel_error <= spec.error_threshold;
    row.status = util >= 0.85 ? "heavy-load" : "ok";
    rows.push_back(row);
  }
  detail::OutputSink sink(spec.output_path);
  detail::write_metadata(*sink.os, spec, c);
  detail::write_comparison_header(*sink.os, false, true);
  for (const ComparisonRow& r : rows) {
    detail::write_comparison_row(*sink.os, r, false, true);
  }
  return rows;
}

}  // namespace dcf
