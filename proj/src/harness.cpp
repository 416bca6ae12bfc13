#include "mlpinit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <thread>

#include "mlpinit/errors.hpp"

namespace mlpinit {

Hyperparams ExperimentConfig::resolved_hyperparams() const {
  return hyperparams.value_or(preset_hyperparams(topology, init.family));
}

std::string ExperimentConfig::name() const {
  return std::string(to_string(topology)) + "+" + std::string(to_string(init.family)) + "-" +
         std::string(to_string(init.dist));
}

namespace {

bool all_finite(const MlpModel& model) {
  for (const auto& layer : model.layers()) {
    for (double v : layer.weights.data()) {
      if (!std::isfinite(v)) return false;
    }
    for (double v : layer.bias) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

}  // namespace

MlpModel train_model(const Dataset& train, Topology topology, InitScheme scheme,
                     const TrainOptions& options) {
  validate(options.hp);
  if (train.empty()) {
    throw ValidationError("train_model: empty training set");
  }
  Rng rng(options.seed);
  MlpModel model = build_model(rng, topology, scheme);
  SgdMomentum optimizer(model);

  const std::size_t n = train.size();
  const std::size_t bs = options.hp.batch_size;
  std::vector<std::size_t> ids;
  std::vector<int> labels;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const auto order = permutation(rng, n);
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t count = std::min(bs, n - start);
      Matrix batch(count, kFeatureCount);
      ids.resize(count);
      labels.resize(count);
      for (std::size_t r = 0; r < count; ++r) {
        const Sample& s = train.samples[order[start + r]];
        std::copy(s.features.begin(), s.features.end(), batch.row(r).begin());
        labels[r] = s.label;
        ids[r] = s.index;
      }
      if (options.observer) options.observer(ids);

      const ForwardCache cache = forward(model, batch);
      const double batch_loss = cross_entropy(cache.probs, labels);
      if (!std::isfinite(batch_loss)) {
        throw DivergedTrainingError("training diverged at epoch " + std::to_string(epoch) +
                                    " for " + options.label + " (loss " +
                                    std::to_string(batch_loss) + ")");
      }
      optimizer.step(model, backward(model, cache, labels), options.hp);
    }
    if (!all_finite(model)) {
      throw DivergedTrainingError("training diverged at epoch " + std::to_string(epoch) +
                                  " for " + options.label + " (non-finite parameters)");
    }
  }
  return model;
}

Dataset load_dataset(const DataSource& source) {
  try {
    if (source.csv) return load_csv(*source.csv);
    return synthesize_dataset(source.synthetic);
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw DataError(e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, load_dataset(config.data));
}

namespace {

Report evaluate(const MlpModel& model, const Dataset& data) {
  const auto preds = predict(model, data.features());
  const auto labels = data.labels();
  return summarize(accumulate_confusion(preds, labels));
}

LooSummary run_loo(const ExperimentConfig& config, const Hyperparams& hp, const Dataset& trainval,
                   const BatchObserver& observer) {
  const auto folds = loo_splits(trainval);
  std::vector<FoldOutcome> outcomes(folds.size());
  std::vector<std::exception_ptr> failures(folds.size());

  auto run_fold = [&](std::size_t k) {
    try {
      TrainOptions opts{hp, config.epochs, derive_seed(config.seed, k + 1),
                        config.name() + " fold " + std::to_string(k), observer};
      const MlpModel model = train_model(folds[k].train, config.topology, config.init, opts);
      const Sample& v = folds[k].validation;
      Matrix x(1, kFeatureCount, v.features);
      outcomes[k] = {v.index, v.label, predict(model, x)[0]};
    } catch (...) {
      failures[k] = std::current_exception();
    }
  };

  unsigned workers = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(folds.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < folds.size(); ++k) run_fold(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < folds.size();) run_fold(k);
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::vector<int> preds, labels;
  for (const auto& o : outcomes) {
    preds.push_back(o.predicted);
    labels.push_back(o.label);
  }
  LooSummary summary;
  summary.report = summarize(accumulate_confusion(preds, labels));
  summary.mean_accuracy = summary.report.accuracy;
  summary.folds = std::move(outcomes);
  return summary;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& dataset,
                                const BatchObserver& observer) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.config = config;
  result.hyperparams = config.resolved_hyperparams();
  validate(result.hyperparams);
  if (config.epochs == 0) {
    throw ValidationError("epochs must be at least 1");
  }

  HoldoutSplit split;
  Standardized standardized;
  try {
    split = holdout_split(dataset, config.holdout_fraction, config.split_seed);
    if (split.test.empty()) {
      throw DataError("holdout test set is empty; nothing to evaluate");
    }
    if (config.loo_enabled && split.trainval.size() < 2) {
      throw DataError("leave-one-out needs at least 2 training samples");
    }
    standardized = standardize(split.trainval, {split.test});
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw DataError(e.what());
  }
  result.warnings = split.warnings;
  const Dataset& trainval = standardized.train;
  const Dataset& test = standardized.others.front();
  result.trainval_size = trainval.size();
  result.test_size = test.size();

  if (config.loo_enabled) {
    result.loo = run_loo(config, result.hyperparams, trainval, observer);
  }

  TrainOptions opts{result.hyperparams, config.epochs, derive_seed(config.seed, 0), config.name(),
                    observer};
  const MlpModel model = train_model(trainval, config.topology, config.init, opts);
  result.holdout = evaluate(model, test);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::uint64_t suite_cell_seed(std::uint64_t base, Topology topology, InitFamily family) {
  return base + 10 * static_cast<std::uint64_t>(topology) +
         (family == InitFamily::Kaiming ? 1 : 0);
}

std::vector<SuiteCell> run_suite(const ExperimentConfig& base) {
  const Dataset dataset = load_dataset(base.data);
  std::vector<SuiteCell> cells;
  for (Topology topology : {Topology::OneLayer, Topology::TwoLayer, Topology::ThreeLayer}) {
    for (InitFamily family : {InitFamily::Xavier, InitFamily::Kaiming}) {
      ExperimentConfig cfg = base;
      cfg.topology = topology;
      cfg.init.family = family;
      cfg.hyperparams.reset();
      cfg.seed = suite_cell_seed(base.seed, topology, family);
      SuiteCell cell{topology, family, std::nullopt, {}, 0};
      try {
        cell.result = run_experiment(cfg, dataset);
      } catch (const DivergedTrainingError& e) {
        cell.error = e.what();
        cell.error_code = 4;
      } catch (const DataError& e) {
        cell.error = e.what();
        cell.error_code = 3;
      } catch (const Error& e) {
        cell.error = e.what();
        cell.error_code = 2;
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const Report& report) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    const auto& m = report.per_class[c];
    classes.push_back({{"class", to_string(static_cast<DepressionLevel>(c))},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support}});
  }
  nlohmann::json confusion = nlohmann::json::array();
  for (const auto& row : report.confusion.counts) {
    confusion.push_back(row);
  }
  return {{"classes", classes},
          {"macro", {{"precision", report.macro_precision},
                     {"recall", report.macro_recall},
                     {"f1", report.macro_f1}}},
          {"accuracy", report.accuracy},
          {"confusion", confusion}};
}

Report report_from_json(const nlohmann::json& j) {
  Report r;
  const auto& classes = j.at("classes");
  if (classes.size() != kClassCount) {
    throw FormatError("report needs " + std::to_string(kClassCount) + " classes");
  }
  for (std::size_t c = 0; c < kClassCount; ++c) {
    const auto& e = classes[c];
    r.per_class[c] = {e.at("precision").get<double>(), e.at("recall").get<double>(),
                      e.at("f1").get<double>(), e.at("support").get<std::uint64_t>()};
  }
  const auto& macro = j.at("macro");
  r.macro_precision = macro.at("precision").get<double>();
  r.macro_recall = macro.at("recall").get<double>();
  r.macro_f1 = macro.at("f1").get<double>();
  r.accuracy = j.at("accuracy").get<double>();
  const auto& confusion = j.at("confusion");
  for (std::size_t t = 0; t < kClassCount; ++t) {
    for (std::size_t p = 0; p < kClassCount; ++p) {
      r.confusion.counts[t][p] = confusion.at(t).at(p).get<std::uint64_t>();
    }
  }
  return r;
}

namespace {

nlohmann::json to_json(const Hyperparams& hp) {
  return {{"batch_size", hp.batch_size},
          {"learning_rate", hp.learning_rate},
          {"momentum", hp.momentum}};
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json data;
  if (config.data.csv) {
    data = {{"source", "csv"}, {"path", config.data.csv->generic_string()}};
  } else {
    const auto& s = config.data.synthetic;
    data = {{"source", "synthetic"},
            {"seed", s.seed},
            {"participants", s.participants},
            {"records_per_participant", s.records_per_participant},
            {"separation", s.separation}};
  }
  return {{"name", config.name()},
          {"topology", static_cast<int>(config.topology)},
          {"init", to_string(config.init.family)},
          {"dist", to_string(config.init.dist)},
          {"hyperparams", to_json(config.resolved_hyperparams())},
          {"epochs", config.epochs},
          {"seed", config.seed},
          {"split_seed", config.split_seed},
          {"holdout_fraction", config.holdout_fraction},
          {"loo_enabled", config.loo_enabled},
          {"data", data}};
}

nlohmann::json to_json(const ExperimentResult& result) {
  nlohmann::json loo = nullptr;
  if (result.loo) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : result.loo->folds) {
      folds.push_back({{"sample", f.sample_index}, {"label", f.label}, {"predicted", f.predicted}});
    }
    loo = {{"mean_accuracy", result.loo->mean_accuracy},
           {"report", to_json(result.loo->report)},
           {"folds", folds}};
  }
  return {{"config", to_json(result.config)},
          {"trainval_size", result.trainval_size},
          {"test_size", result.test_size},
          {"holdout", to_json(result.holdout)},
          {"loo", loo},
          {"warnings", result.warnings}};
}

nlohmann::json to_json(std::span<const SuiteCell> cells) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& cell : cells) {
    nlohmann::json entry = {{"topology", static_cast<int>(cell.topology)},
                            {"init", to_string(cell.family)}};
    if (cell.result) {
      entry["status"] = "ok";
      entry["result"] = to_json(*cell.result);
    } else {
      entry["status"] = "error";
      entry["error"] = cell.error;
      entry["exit_code"] = cell.error_code;
    }
    out.push_back(std::move(entry));
  }
  return {{"suite", out}};
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

constexpr int kLabelWidth = 18;
constexpr int kBlockWidth = 32;

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pad_right(std::string s, int width) {
  if (static_cast<int>(s.size()) < width) s.append(static_cast<std::size_t>(width) - s.size(), ' ');
  return s;
}

std::string centered(const std::string& s, int width) {
  const int left = std::max(0, (width - static_cast<int>(s.size())) / 2);
  return pad_right(std::string(static_cast<std::size_t>(left), ' ') + s, width);
}

std::string metric_cells(double p, double r, double f) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " %9s %8s %9s    ", fixed2(p).c_str(), fixed2(r).c_str(),
                fixed2(f).c_str());
  return pad_right(buf, kBlockWidth);
}

std::string column_title(const ExperimentConfig& c) {
  std::string family = c.init.family == InitFamily::Xavier ? "Xavier" : "Kaiming";
  std::string title = std::string(to_string(c.topology)) + "+" + family;
  if (c.init.dist == InitDist::Uniform) title += " (uniform)";
  return title;
}

std::string rule(std::size_t blocks) {
  std::string line(kLabelWidth, '-');
  for (std::size_t b = 0; b < blocks; ++b) line += "+" + std::string(kBlockWidth, '-');
  return line + "\n";
}

std::string render_group(Topology topology, const std::vector<const ExperimentResult*>& group) {
  std::string out = "Results for " + std::string(to_string(topology)) +
                    " depression recognition models (holdout test set)\n";
  std::string line = pad_right("Depression Level", kLabelWidth);
  for (const auto* r : group) line += "|" + centered(column_title(r->config), kBlockWidth);
  out += line + "\n";
  line = pad_right("", kLabelWidth);
  for (std::size_t b = 0; b < group.size(); ++b) {
    line += "|" + pad_right("  Precision   Recall  F1 score", kBlockWidth);
  }
  out += line + "\n" + rule(group.size());

  for (std::size_t c = 0; c < kClassCount; ++c) {
    line = pad_right(std::string(to_string(static_cast<DepressionLevel>(c))), kLabelWidth);
    for (const auto* r : group) {
      const auto& m = r->holdout.per_class[c];
      line += "|" + metric_cells(m.precision, m.recall, m.f1);
    }
    out += line + "\n";
  }
  out += rule(group.size());
  line = pad_right("Average", kLabelWidth);
  for (const auto* r : group) {
    line += "|" + metric_cells(r->holdout.macro_precision, r->holdout.macro_recall,
                               r->holdout.macro_f1);
  }
  out += line + "\n";
  line = pad_right("Overall Accuracy", kLabelWidth);
  for (const auto* r : group) line += "|" + centered(fixed2(r->holdout.accuracy), kBlockWidth);
  out += line + "\n";
  line = pad_right("LOO Accuracy", kLabelWidth);
  for (const auto* r : group) {
    line += "|" + centered(r->loo ? fixed2(r->loo->mean_accuracy) : "n/a", kBlockWidth);
  }
  out += line + "\n";
  return out;
}

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string render_text(std::span<const ExperimentResult> results) {
  std::map<Topology, std::vector<const ExperimentResult*>> groups;
  for (const auto& r : results) groups[r.config.topology].push_back(&r);
  std::string text;
  for (const auto& [topology, group] : groups) {
    if (!text.empty()) text += "\n";
    text += render_group(topology, group);
  }
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line(text.data() + start, end - start);
    while (!line.empty() && line.back() == ' ') line.remove_suffix(1);
    out.append(line);
    out += '\n';
    start = end + 1;
  }
  return out;
}

std::string render_csv(std::span<const ExperimentResult> results) {
  std::string out = "config,topology,init,dist,class,precision,recall,f1,support\n";
  for (const auto& r : results) {
    for (std::size_t c = 0; c < kClassCount; ++c) {
      const auto& m = r.holdout.per_class[c];
      out += r.config.name() + "," + std::to_string(static_cast<int>(r.config.topology)) + "," +
             std::string(to_string(r.config.init.family)) + "," +
             std::string(to_string(r.config.init.dist)) + "," +
             std::string(to_string(static_cast<DepressionLevel>(c))) + "," +
             shortest(m.precision) + "," + shortest(m.recall) + "," + shortest(m.f1) + "," +
             std::to_string(m.support) + "\n";
    }
  }
  return out;
}

void write_outputs(const std::filesystem::path& dir, const nlohmann::json& result_json,
                   std::span<const ExperimentResult> results) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write '" + (dir / name).string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + (dir / name).string() + "'");
  };
  write("result.json", result_json.dump(2) + "\n");
  write("report.txt", render_text(results));
  write("result.csv", render_csv(results));
}

}  // namespace mlpinit
