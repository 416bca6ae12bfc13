// mlpinit command-line tool: run experiments, the six-cell suite, gradient
// checks, initializer statistics, and synthetic cohort generation.
//
// Exit codes: 0 success, 1 check failed, 2 config error, 3 data error,
// 4 diverged training.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlpinit/data.hpp"
#include "mlpinit/errors.hpp"
#include "mlpinit/harness.hpp"
#include "mlpinit/initializers.hpp"
#include "mlpinit/matrix.hpp"
#include "mlpinit/network.hpp"

namespace {

using namespace mlpinit;

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDiverged = 4;

struct CommonOptions {
  std::string init = "kaiming";
  std::string dist = "normal";
  int topology = 3;
  std::string data_path;
  bool synthetic = false;
  std::uint64_t seed = 0;
  std::size_t epochs = 200;
  std::string out = "out";
  bool no_loo = false;
  unsigned threads = 1;
  std::size_t participants = 16;
  std::size_t records = 12;
  double separation = 2.0;
  double holdout = 0.2;
};

void add_data_options(CLI::App* cmd, CommonOptions& o) {
  auto* data = cmd->add_option("--data", o.data_path, "CSV dataset path");
  auto* synth = cmd->add_flag("--synthetic", o.synthetic, "Use a synthetic cohort");
  data->excludes(synth);
  cmd->add_option("--participants", o.participants, "Synthetic participants")->capture_default_str();
  cmd->add_option("--records", o.records, "Synthetic records per participant")
      ->capture_default_str();
  cmd->add_option("--separation", o.separation, "Synthetic class separation")
      ->capture_default_str();
}

void add_run_options(CLI::App* cmd, CommonOptions& o) {
  add_data_options(cmd, o);
  cmd->add_option("--dist", o.dist, "Initializer distribution")
      ->check(CLI::IsMember({"normal", "uniform"}))
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Experiment seed")->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--holdout", o.holdout, "Holdout fraction")->capture_default_str();
  cmd->add_flag("--no-loo", o.no_loo, "Skip leave-one-out validation");
  cmd->add_option("--threads", o.threads, "LOO worker threads (0 = all cores)")
      ->capture_default_str();
}

ExperimentConfig make_config(const CommonOptions& o) {
  if (o.data_path.empty() && !o.synthetic) {
    throw ValidationError("choose a dataset with --data <csv> or --synthetic");
  }
  ExperimentConfig cfg;
  cfg.topology = topology_from_depth(o.topology);
  cfg.init = {parse_init_family(o.init), parse_init_dist(o.dist)};
  cfg.epochs = o.epochs;
  cfg.seed = o.seed;
  cfg.split_seed = o.seed;
  cfg.loo_enabled = !o.no_loo;
  cfg.threads = o.threads;
  cfg.holdout_fraction = o.holdout;
  if (!o.data_path.empty()) {
    cfg.data.csv = o.data_path;
  } else {
    cfg.data.synthetic = {o.seed, o.participants, o.records, o.separation};
  }
  return cfg;
}

int cmd_run(const CommonOptions& o) {
  const auto cfg = make_config(o);
  const auto result = run_experiment(cfg);
  const std::vector<ExperimentResult> results{result};
  write_outputs(o.out, to_json(result), results);
  std::cout << render_text(results);
  std::cerr << "wall time " << result.wall_seconds << " s; outputs in " << o.out << "\n";
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_suite(const CommonOptions& o) {
  const auto cfg = make_config(o);
  const auto cells = run_suite(cfg);
  std::vector<ExperimentResult> results;
  int status = 0;
  for (const auto& cell : cells) {
    if (cell.result) {
      results.push_back(*cell.result);
    } else {
      std::cerr << "cell " << to_string(cell.topology) << "+" << to_string(cell.family)
                << " failed: " << cell.error << "\n";
      status = std::max(status, cell.error_code);
    }
  }
  write_outputs(o.out, to_json(cells), results);
  std::cout << render_text(results);
  return status;
}

struct GradCheckOptions {
  std::vector<int> topologies{1, 2, 3};
  std::vector<std::string> inits{"xavier", "kaiming"};
  std::string dist = "normal";
  std::size_t batch = 8;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
};

int cmd_grad_check(const GradCheckOptions& o) {
  bool ok = true;
  std::printf("%-10s %-8s %-8s %12s %16s\n", "topology", "init", "dist", "parameters",
              "max rel error");
  for (int depth : o.topologies) {
    for (const auto& init : o.inits) {
      const InitScheme scheme{parse_init_family(init), parse_init_dist(o.dist)};
      const Topology topology = topology_from_depth(depth);
      Rng rng(derive_seed(o.seed, static_cast<std::uint64_t>(depth * 2 + (init == "kaiming"))));
      const MlpModel model = build_model(rng, topology, scheme);
      Matrix batch(o.batch, kFeatureCount, sample(rng, NormalDist{0.0, 1.0}, o.batch * kFeatureCount));
      std::vector<int> labels(o.batch);
      for (auto& l : labels) l = static_cast<int>(rng.below(kClassCount));
      const double err = grad_check(model, batch, labels, o.epsilon);
      ok = ok && err < o.tolerance;
      std::printf("%-10s %-8s %-8s %12zu %16.3e\n", std::string(to_string(topology)).c_str(),
                  init.c_str(), o.dist.c_str(), model.parameter_count(), err);
    }
  }
  std::printf("%s (tolerance %.1e)\n", ok ? "PASS" : "FAIL", o.tolerance);
  return ok ? 0 : kExitCheckFailed;
}

struct InitStatsOptions {
  std::vector<std::size_t> fan_ins{20, 50, 85, 256};
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t depth = 10;
  std::size_t width = 256;
  std::size_t rows = 10000;
  bool propagation = false;
};

int cmd_init_stats(const InitStatsOptions& o) {
  std::printf("%-8s %-8s %6s %14s %14s %10s %14s %12s\n", "family", "dist", "fan_in", "target var",
              "empirical var", "rel err", "max |w|", "bound");
  Rng rng(o.seed);
  for (InitFamily family : {InitFamily::Xavier, InitFamily::Kaiming}) {
    for (InitDist dist : {InitDist::Normal, InitDist::Uniform}) {
      const InitScheme scheme{family, dist};
      for (std::size_t d : o.fan_ins) {
        const std::size_t rows = (o.samples + d - 1) / d;
        const Matrix w = initialize(rng, scheme, d, rows, d);
        const double target = target_variance(scheme, d);
        const double var = variance(w.data());
        double peak = 0.0;
        for (double v : w.data()) peak = std::max(peak, std::abs(v));
        const std::string bound =
            dist == InitDist::Uniform ? std::to_string(uniform_bound(scheme, d)) : "-";
        std::printf("%-8s %-8s %6zu %14.6g %14.6g %9.2f%% %14.6g %12s\n",
                    std::string(to_string(family)).c_str(), std::string(to_string(dist)).c_str(),
                    d, target, var, 100.0 * (var - target) / target, peak, bound.c_str());
      }
    }
  }
  if (o.propagation) {
    std::printf("\nvariance ratio Var(layer k pre-activation) / Var(input), width %zu, %zu rows\n",
                o.width, o.rows);
    for (InitFamily family : {InitFamily::Xavier, InitFamily::Kaiming}) {
      const auto ratios = propagate_variance(rng, {family, InitDist::Normal}, o.width, o.depth, o.rows);
      std::printf("%-8s", std::string(to_string(family)).c_str());
      for (double r : ratios) std::printf(" %8.4f", r);
      std::printf("\n");
    }
  }
  return 0;
}

int cmd_synth(const CommonOptions& o) {
  const auto ds = synthesize_dataset({o.seed, o.participants, o.records, o.separation});
  save_csv(ds, o.out);
  std::cerr << "wrote " << ds.size() << " samples to " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MLP weight-initialization experiments"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "Train and evaluate one configuration");
  run->add_option("--topology", run_opts.topology, "Number of weight layers")
      ->check(CLI::IsMember({1, 2, 3}))
      ->capture_default_str();
  run->add_option("--init", run_opts.init, "Initializer family")
      ->check(CLI::IsMember({"xavier", "kaiming"}))
      ->capture_default_str();
  add_run_options(run, run_opts);

  CommonOptions suite_opts;
  auto* suite = app.add_subcommand("suite", "Run all six topology x initializer cells");
  add_run_options(suite, suite_opts);

  GradCheckOptions gc_opts;
  auto* gc = app.add_subcommand("grad-check", "Compare backprop against central differences");
  gc->add_option("--topology", gc_opts.topologies, "Topologies to check")
      ->check(CLI::IsMember({1, 2, 3}));
  gc->add_option("--init", gc_opts.inits, "Initializer families")
      ->check(CLI::IsMember({"xavier", "kaiming"}));
  gc->add_option("--dist", gc_opts.dist, "Initializer distribution")
      ->check(CLI::IsMember({"normal", "uniform"}))
      ->capture_default_str();
  gc->add_option("--batch", gc_opts.batch, "Batch rows")->capture_default_str();
  gc->add_option("--epsilon", gc_opts.epsilon, "Finite-difference step")->capture_default_str();
  gc->add_option("--tolerance", gc_opts.tolerance, "Maximum relative error")->capture_default_str();
  gc->add_option("--seed", gc_opts.seed, "Seed")->capture_default_str();

  InitStatsOptions is_opts;
  auto* is = app.add_subcommand("init-stats", "Empirical initializer variances");
  is->add_option("--fan-in", is_opts.fan_ins, "Fan-in values")->delimiter(',');
  is->add_option("--samples", is_opts.samples, "Entries drawn per cell")->capture_default_str();
  is->add_option("--seed", is_opts.seed, "Seed")->capture_default_str();
  is->add_flag("--propagation", is_opts.propagation, "Also run the deep-stack variance test");
  is->add_option("--depth", is_opts.depth, "Propagation depth")->capture_default_str();
  is->add_option("--width", is_opts.width, "Propagation width")->capture_default_str();
  is->add_option("--rows", is_opts.rows, "Propagation batch rows")->capture_default_str();

  CommonOptions synth_opts;
  synth_opts.out = "synthetic.csv";
  auto* synth = app.add_subcommand("synth", "Write a synthetic cohort as CSV");
  synth->add_option("--seed", synth_opts.seed, "Seed")->capture_default_str();
  synth->add_option("--participants", synth_opts.participants, "Participants")
      ->capture_default_str();
  synth->add_option("--records", synth_opts.records, "Records per participant")
      ->capture_default_str();
  synth->add_option("--separation", synth_opts.separation, "Class separation")
      ->capture_default_str();
  synth->add_option("--out", synth_opts.out, "Output CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*suite) return cmd_suite(suite_opts);
    if (*gc) return cmd_grad_check(gc_opts);
    if (*is) return cmd_init_stats(is_opts);
    if (*synth) return cmd_synth(synth_opts);
  } catch (const DivergedTrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const mlpinit::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
