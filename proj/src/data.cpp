#include "mlpinit/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mlpinit/errors.hpp"
#include "mlpinit/network.hpp"
#include "mlpinit/rng.hpp"

namespace mlpinit {

static_assert(kGsrFeatures + kPdFeatures + kStFeatures == kFeatureCount);

std::string_view to_string(DepressionLevel level) {
  switch (level) {
    case DepressionLevel::None:
      return "None";
    case DepressionLevel::Mild:
      return "Mild";
    case DepressionLevel::Moderate:
      return "Moderate";
    case DepressionLevel::Severe:
      return "Severe";
  }
  return "?";
}

DepressionLevel parse_label(std::string_view token) {
  for (int c = 0; c < static_cast<int>(kClassCount); ++c) {
    const auto level = static_cast<DepressionLevel>(c);
    if (token == to_string(level)) return level;
    if (token.size() == 1 && token[0] == '0' + c) return level;
  }
  throw ParseError("unknown label token '" + std::string(token) + "'");
}

Matrix Dataset::features() const {
  Matrix m(samples.size(), kFeatureCount);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::copy(samples[i].features.begin(), samples[i].features.end(), m.row(i).begin());
  }
  return m;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(kClassCount, 0);
  for (const auto& s : samples) ++counts.at(static_cast<std::size_t>(s.label));
  return counts;
}

std::vector<std::string> csv_header() {
  std::vector<std::string> cols = {"participant", "label"};
  auto add_group = [&](const char* prefix, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%s_%02zu", prefix, i);
      cols.emplace_back(buf);
    }
  };
  add_group("gsr", kGsrFeatures);
  add_group("pd", kPdFeatures);
  add_group("st", kStFeatures);
  return cols;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string location(std::size_t line_no, std::size_t column) {
  return "line " + std::to_string(line_no) + ", column " + std::to_string(column + 1);
}

std::string column_count_message(std::size_t got) {
  const std::size_t expected = kFeatureCount + 2;
  std::string msg = "expected " + std::to_string(expected) + " columns (" +
                    std::to_string(kFeatureCount) + " features), got " + std::to_string(got);
  if (got >= 2) msg += " (" + std::to_string(got - 2) + " features)";
  return msg;
}

}  // namespace

Dataset parse_csv(std::istream& in, std::string provenance) {
  Dataset ds;
  ds.provenance = std::move(provenance);
  const auto header = csv_header();

  std::string raw;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_fields(line);

    if (!saw_header) {
      if (fields.size() != header.size()) {
        throw FormatError("header: " + column_count_message(fields.size()));
      }
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (fields[c] != header[c]) {
          throw FormatError("header " + location(line_no, c) + ": expected '" + header[c] +
                            "', got '" + std::string(fields[c]) + "'");
        }
      }
      saw_header = true;
      continue;
    }

    if (fields.size() != header.size()) {
      throw FormatError("line " + std::to_string(line_no) + ": " +
                        column_count_message(fields.size()));
    }
    Sample s;
    s.index = ds.samples.size();
    {
      const auto f = fields[0];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), s.participant);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        throw ParseError(location(line_no, 0) + ": participant id '" + std::string(f) +
                         "' is not an integer");
      }
    }
    try {
      s.label = static_cast<int>(parse_label(fields[1]));
    } catch (const ParseError& e) {
      throw ParseError(location(line_no, 1) + ": " + e.what());
    }
    s.features.resize(kFeatureCount);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const auto f = fields[j + 2];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty() || !std::isfinite(v)) {
        throw ParseError(location(line_no, j + 2) + " (" + header[j + 2] + "): '" +
                         std::string(f) + "' is not a finite number");
      }
      s.features[j] = v;
    }
    ds.samples.push_back(std::move(s));
  }
  if (!saw_header) {
    throw FormatError("missing header row");
  }
  if (ds.samples.empty()) {
    throw FormatError("no data rows");
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  return parse_csv(in, "csv:" + path.string());
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

void write_csv(const Dataset& dataset, std::ostream& out) {
  const auto header = csv_header();
  std::string line;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) line += ',';
    line += header[c];
  }
  out << line << '\n';
  for (const auto& s : dataset.samples) {
    line = std::to_string(s.participant);
    line += ',';
    line += to_string(static_cast<DepressionLevel>(s.label));
    for (double v : s.features) {
      line += ',';
      append_double(line, v);
    }
    out << line << '\n';
  }
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  write_csv(dataset, out);
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

Dataset synthesize_dataset(const SyntheticSpec& spec) {
  if (spec.participants < 2) {
    throw ValidationError("synthetic cohort needs at least 2 participants");
  }
  if (spec.records_per_participant < 1) {
    throw ValidationError("synthetic cohort needs at least 1 record per participant");
  }
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation)) {
    throw ValidationError("separation must be a finite nonnegative number");
  }
  Rng rng(spec.seed);
  constexpr double kParticipantStd = 0.3;

  // Class c is centred at separation * c * u_c, where u_c is a random direction
  // with unit RMS per feature (Euclidean norm sqrt(85)).
  std::vector<std::vector<double>> class_means(kClassCount);
  for (std::size_t c = 0; c < kClassCount; ++c) {
    std::vector<double> dir(kFeatureCount);
    double norm2 = 0.0;
    for (double& v : dir) {
      v = rng.standard_normal();
      norm2 += v * v;
    }
    const double scale = spec.separation * static_cast<double>(c) *
                         std::sqrt(static_cast<double>(kFeatureCount) / norm2);
    for (double& v : dir) v *= scale;
    class_means[c] = std::move(dir);
  }

  Dataset ds;
  ds.provenance = "synthetic:seed=" + std::to_string(spec.seed);
  ds.samples.reserve(spec.participants * spec.records_per_participant);
  std::vector<double> offset(kFeatureCount);
  for (std::size_t p = 0; p < spec.participants; ++p) {
    for (double& v : offset) v = kParticipantStd * rng.standard_normal();
    for (std::size_t r = 0; r < spec.records_per_participant; ++r) {
      Sample s;
      s.participant = static_cast<int>(p);
      s.label = static_cast<int>(r % kClassCount);
      s.index = ds.samples.size();
      s.features.resize(kFeatureCount);
      const auto& mu = class_means[static_cast<std::size_t>(s.label)];
      for (std::size_t j = 0; j < kFeatureCount; ++j) {
        s.features[j] = mu[j] + offset[j] + rng.standard_normal();
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

FeatureStats fit_feature_stats(const Dataset& train) {
  if (train.empty()) {
    throw ValidationError("standardize: training split is empty");
  }
  const double n = static_cast<double>(train.size());
  FeatureStats stats{std::vector<double>(kFeatureCount, 0.0),
                     std::vector<double>(kFeatureCount, 0.0)};
  for (const auto& s : train.samples) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) stats.mean[j] += s.features[j];
  }
  for (double& m : stats.mean) m /= n;
  for (const auto& s : train.samples) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double d = s.features[j] - stats.mean[j];
      stats.stddev[j] += d * d;
    }
  }
  for (double& v : stats.stddev) v = std::max(std::sqrt(v / n), kStdFloor);
  return stats;
}

Dataset apply_standardization(const Dataset& dataset, const FeatureStats& stats) {
  Dataset out = dataset;
  for (auto& s : out.samples) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      s.features[j] = (s.features[j] - stats.mean[j]) / stats.stddev[j];
    }
  }
  return out;
}

Standardized standardize(const Dataset& train, const std::vector<Dataset>& others) {
  Standardized out;
  out.stats = fit_feature_stats(train);
  out.train = apply_standardization(train, out.stats);
  out.others.reserve(others.size());
  for (const auto& d : others) out.others.push_back(apply_standardization(d, out.stats));
  return out;
}

HoldoutSplit holdout_split(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("holdout fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> by_class(kClassCount);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class.at(static_cast<std::size_t>(dataset.samples[i].label)).push_back(i);
  }
  Rng rng(seed);
  std::vector<bool> in_test(dataset.size(), false);
  HoldoutSplit split;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    const auto& members = by_class[c];
    if (members.empty()) {
      throw ValidationError("holdout split: class " +
                            std::string(to_string(static_cast<DepressionLevel>(c))) +
                            " has no samples");
    }
    // The 1e-9 slack keeps products such as 0.29 * 100 from flooring to 28.
    const auto take =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size()) + 1e-9));
    const auto order = permutation(rng, members.size());
    for (std::size_t t = 0; t < take; ++t) in_test[members[order[t]]] = true;
  }
  split.trainval.provenance = dataset.provenance + "/trainval";
  split.test.provenance = dataset.provenance + "/test";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (in_test[i] ? split.test : split.trainval).samples.push_back(dataset.samples[i]);
  }
  if (split.test.empty()) {
    split.warnings.push_back("holdout split produced an empty test set (fraction " +
                             std::to_string(fraction) + " of every class floors to 0)");
  }
  return split;
}

std::vector<LooFold> loo_splits(const Dataset& trainval) {
  if (trainval.size() < 2) {
    throw ValidationError("leave-one-out needs at least 2 samples, got " +
                          std::to_string(trainval.size()));
  }
  std::vector<LooFold> folds;
  folds.reserve(trainval.size());
  for (std::size_t k = 0; k < trainval.size(); ++k) {
    LooFold fold;
    fold.train.provenance = trainval.provenance + "/loo" + std::to_string(k);
    fold.train.samples.reserve(trainval.size() - 1);
    for (std::size_t i = 0; i < trainval.size(); ++i) {
      if (i != k) fold.train.samples.push_back(trainval.samples[i]);
    }
    fold.validation = trainval.samples[k];
    folds.push_back(std::move(fold));
  }
  return folds;
}

}  // namespace mlpinit
