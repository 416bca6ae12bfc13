#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlpinit/data.hpp"
#include "mlpinit/errors.hpp"
#include "mlpinit/evaluation.hpp"
#include "mlpinit/initializers.hpp"
#include "mlpinit/network.hpp"
#include "mlpinit/optimizer.hpp"

namespace mlpinit {

struct DataSource {
  std::optional<std::filesystem::path> csv;  // synthetic when empty
  SyntheticSpec synthetic;

  bool operator==(const DataSource&) const = default;
};

struct ExperimentConfig {
  Topology topology = Topology::ThreeLayer;
  InitScheme init;
  std::optional<Hyperparams> hyperparams;  // preset for (topology, family) when empty
  std::size_t epochs = 200;
  std::uint64_t seed = 0;        // weights and batch order
  std::uint64_t split_seed = 0;  // stratified holdout shuffle
  DataSource data;
  bool loo_enabled = true;
  double holdout_fraction = 0.2;
  unsigned threads = 1;  // LOO fold workers; 0 means hardware concurrency

  Hyperparams resolved_hyperparams() const;
  // "3-layer+kaiming-normal"
  std::string name() const;
};

struct FoldOutcome {
  std::size_t sample_index = 0;  // Sample::index of the held-out record
  int label = 0;
  int predicted = 0;

  bool operator==(const FoldOutcome&) const = default;
};

struct LooSummary {
  double mean_accuracy = 0.0;
  Report report;
  std::vector<FoldOutcome> folds;

  bool operator==(const LooSummary&) const = default;
};

struct ExperimentResult {
  ExperimentConfig config;
  Hyperparams hyperparams;
  std::size_t trainval_size = 0;
  std::size_t test_size = 0;
  Report holdout;
  std::optional<LooSummary> loo;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;  // not serialized
};

// Called with the Sample::index of every record in every training mini-batch.
using BatchObserver = std::function<void(std::span<const std::size_t> sample_indices)>;

struct TrainOptions {
  Hyperparams hp;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  std::string label;  // used in divergence errors
  BatchObserver observer;
};

// Builds a model from `seed`, then runs `epochs` passes of mini-batch SGD with
// momentum over a reshuffled order each epoch. The final short batch is kept.
MlpModel train_model(const Dataset& train, Topology topology, InitScheme scheme,
                     const TrainOptions& options);

Dataset load_dataset(const DataSource& source);

ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& dataset,
                                const BatchObserver& observer = {});

// Training seed for a suite cell: base + 10 * depth + (1 for Kaiming).
std::uint64_t suite_cell_seed(std::uint64_t base, Topology topology, InitFamily family);

struct SuiteCell {
  Topology topology;
  InitFamily family;
  std::optional<ExperimentResult> result;
  std::string error;  // set when the cell failed
  int error_code = 0;
};

// The six {1,2,3}-layer x {Xavier, Kaiming} cells, each with its preset
// hyperparameters. Every cell shares base's data source and split seed and
// trains with suite_cell_seed(base.seed, ...). Cell failures are recorded, not
// rethrown.
std::vector<SuiteCell> run_suite(const ExperimentConfig& base);

nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const ExperimentResult& result);
nlohmann::json to_json(std::span<const SuiteCell> cells);

// Tables grouped by topology with Xavier and Kaiming side by side, values to
// two decimals.
std::string render_text(std::span<const ExperimentResult> results);

// One row per class per configuration.
std::string render_csv(std::span<const ExperimentResult> results);

// Writes result.json, report.txt and result.csv into `dir`.
void write_outputs(const std::filesystem::path& dir, const nlohmann::json& result_json,
                   std::span<const ExperimentResult> results);

}  // namespace mlpinit
