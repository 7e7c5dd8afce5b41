#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlsurv/agent.hpp"
#include "rlsurv/ann.hpp"
#include "rlsurv/metrics.hpp"

namespace rlsurv {

/// One (device, algorithm, test-fraction, seed) cell of the comparison.
struct RunSpec {
  std::string device;     // preset name, or a path to a dataset CSV
  std::string algorithm;  // "ddqn", "dqn", or "ann"
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
};

std::string run_label(const RunSpec& run);

struct ExperimentConfig {
  std::vector<std::string> devices = {"device1", "device2", "device3"};
  std::vector<std::string> algorithms = {"ddqn", "dqn", "ann"};
  std::vector<double> test_fractions = {0.2, 0.5, 0.8};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  // Share of the non-test remainder held out for validation.
  double val_fraction = 0.2;
  ScalerMode scaler = ScalerMode::minmax;
  // Templates for per-run configs; algorithm and seed fields are overridden
  // per run, everything else is taken as-is.
  AgentConfig agent;
  AnnConfig ann;
  EnvConfig env;
  // Worker threads for fanning out independent runs.
  int jobs = 1;
  // Report train_seconds as 0 so repeated runs emit identical bytes.
  bool zero_timing = false;
};

/// All runs of the grid in deterministic order: device-major, then
/// algorithm, fraction, seed.
std::vector<RunSpec> enumerate_runs(const ExperimentConfig& cfg);

/// Loads the device data (preset generator or CSV). Preset data depends only
/// on the preset, not on run seeds.
Dataset device_data(const std::string& device);

/// Executes one cell: stratified split -> scaler fit on train -> training
/// with nested validation -> greedy evaluation on the held-out test rows.
/// The split and scaler depend on (device, fraction, seed) but not on the
/// algorithm, so algorithms are compared on identical data. Training only
/// ever sees the train and validation splits; the test rows enter in the
/// evaluation stage below, after the model is frozen.
EvalReport run_single(const ExperimentConfig& cfg, const RunSpec& run,
                      const Dataset& data);

/// Convenience overload that loads the device data itself.
EvalReport run_single(const ExperimentConfig& cfg, const RunSpec& run);

/// Runs the whole grid, fanning out across cfg.jobs threads. Results are in
/// enumerate_runs order regardless of scheduling. The first failing run
/// aborts the batch with its label attached.
std::vector<EvalReport> run_comparison(const ExperimentConfig& cfg);

}  // namespace rlsurv
