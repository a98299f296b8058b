// dcfkit: analytic and simulated 802.11 DCF delay/throughput experiments.
//
// Subcommands mirror the harness experiments: `throughput` (saturation
// curve), `delay-sweep` (delay vs offered rate), `n-sweep` (delay vs node
// count), `table-check` (reference operating points) and `nonhom`
// (per-node bounds for unequal rates). Output is gnuplot-ready CSV with a
// `#` metadata block.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcf/dcf.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 1;
  int reps = 30;
  double confidence = 0.95;
  std::string out = "-";
  double measure_time = 2000.0;
  double warmup_time = -1.0;  // <0: default (10% of measure or 50k slots)
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path,
                  "MAC/PHY profile file (key=value, durations in microseconds)");
  cmd->add_option("--seed", opts->seed, "base RNG seed (64-bit)");
  cmd->add_option("--reps", opts->reps, "simulation replications per point");
  cmd->add_option("--confidence", opts->confidence,
                  "confidence level for CI half-widths");
  cmd->add_option("--out", opts->out, "output CSV path ('-' for stdout)");
  cmd->add_option("--measure-time", opts->measure_time,
                  "virtual seconds measured per run");
  cmd->add_option("--warmup-time", opts->warmup_time,
                  "virtual warmup seconds (default: 10% of measure time, "
                  "at least 50000 slots)");
}

dcf::ExperimentSpec make_spec(const CommonOpts& opts, dcf::ExperimentMode mode) {
  dcf::ExperimentSpec spec;
  spec.mode = mode;
  if (opts.config_path.empty()) {
    spec.base.mac_phy = dcf::dot11b_1mbps();
    spec.profile_label = "builtin:dot11b-1mbps";
  } else {
    spec.base.mac_phy = dcf::load_mac_phy_config(opts.config_path);
    spec.profile_label = opts.config_path;
  }
  spec.base.seed = opts.seed;
  spec.base.measure_time = opts.measure_time;
  spec.base.warmup_time =
      opts.warmup_time >= 0.0
          ? opts.warmup_time
          : dcf::default_warmup(opts.measure_time, spec.base.mac_phy);
  spec.replications = opts.reps;
  spec.confidence = opts.confidence;
  spec.output_path = opts.out;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"802.11 DCF delay and throughput toolkit"};
  app.require_subcommand(1);

  CommonOpts thr_opts;
  int n_min = 1;
  int n_max = 50;
  CLI::App* thr = app.add_subcommand(
      "throughput", "saturation throughput curve, analytic vs simulated");
  thr->add_option("--n-min", n_min, "smallest node count")->required();
  thr->add_option("--n-max", n_max, "largest node count")->required();
  add_common(thr, &thr_opts);

  CommonOpts ds_opts;
  int ds_n = 5;
  std::vector<double> lambda_grid;
  CLI::App* ds = app.add_subcommand(
      "delay-sweep", "mean delay vs per-node rate at fixed node count");
  ds->add_option("--n", ds_n, "node count")->required();
  ds->add_option("--lambda-grid", lambda_grid, "per-node rates, pkts/s")
      ->required()
      ->delimiter(',');
  add_common(ds, &ds_opts);

  CommonOpts ns_opts;
  double ns_lambda = 5.0;
  std::vector<int> n_grid;
  CLI::App* nsw = app.add_subcommand(
      "n-sweep", "mean delay vs node count at fixed per-node rate");
  nsw->add_option("--lambda", ns_lambda, "per-node rate, pkts/s")->required();
  nsw->add_option("--n-grid", n_grid, "node counts")->required()->delimiter(',');
  add_common(nsw, &ns_opts);

  CommonOpts tc_opts;
  CLI::App* tc = app.add_subcommand(
      "table-check", "analytic vs simulated delay at the reference points");
  add_common(tc, &tc_opts);

  CommonOpts nh_opts;
  std::vector<double> rates;
  CLI::App* nh = app.add_subcommand(
      "nonhom", "per-node delay bounds for unequal arrival rates");
  nh->add_option("--rates", rates, "per-node rates, pkts/s")
      ->required()
      ->delimiter(',');
  add_common(nh, &nh_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (thr->parsed()) {
      if (n_min < 1 || n_max < n_min) {
        throw dcf::InvalidArgumentError("throughput: need 1 <= n-min <= n-max");
      }
      dcf::ExperimentSpec spec =
          make_spec(thr_opts, dcf::ExperimentMode::throughput_vs_n);
      for (int n = n_min; n <= n_max; ++n) spec.n_grid.push_back(n);
      dcf::throughput_curve(spec);
    } else if (ds->parsed()) {
      dcf::ExperimentSpec spec =
          make_spec(ds_opts, dcf::ExperimentMode::delay_vs_lambda);
      spec.base.n_nodes = ds_n;
      spec.lambda_grid = lambda_grid;
      dcf::sweep_delay_vs_lambda(spec);
    } else if (nsw->parsed()) {
      dcf::ExperimentSpec spec =
          make_spec(ns_opts, dcf::ExperimentMode::delay_vs_n);
      spec.lambda_fixed = ns_lambda;
      spec.n_grid = n_grid;
      dcf::sweep_delay_vs_n(spec);
    } else if (tc->parsed()) {
      dcf::ExperimentSpec spec =
          make_spec(tc_opts, dcf::ExperimentMode::table_check);
      dcf::table_check(spec);
    } else if (nh->parsed()) {
      dcf::ExperimentSpec spec =
          make_spec(nh_opts, dcf::ExperimentMode::nonhomogeneous);
      spec.rates = rates;
      dcf::nonhomogeneous_check(spec);
    }
  } catch (const dcf::UnstableLoadError& e) {
    std::cerr << "error (unstable load): " << e.what() << "\n";
    return 2;
  } catch (const dcf::NoConvergenceError& e) {
    std::cerr << "error (no convergence): " << e.what() << "\n";
    return 3;
  } catch (const dcf::AllRunsUnstableError& e) {
    std::cerr << "error (all runs unstable): " << e.what() << "\n";
    return 2;
  } catch (const dcf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
