#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mlpinit/matrix.hpp"

namespace mlpinit {

enum class DepressionLevel { None = 0, Mild = 1, Moderate = 2, Severe = 3 };

std::string_view to_string(DepressionLevel level);

// Accepts None|Mild|Moderate|Severe or 0-3; anything else throws ParseError.
DepressionLevel parse_label(std::string_view token);

// Feature layout: 23 skin-conductance, 39 pupil, 23 skin-temperature columns.
inline constexpr std::size_t kGsrFeatures = 23;
inline constexpr std::size_t kPdFeatures = 39;
inline constexpr std::size_t kStFeatures = 23;

struct Sample {
  int participant = 0;
  std::vector<double> features;  // kFeatureCount entries
  int label = 0;                 // DepressionLevel as int
  std::size_t index = 0;         // row position in the source dataset

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  Matrix features() const;
  std::vector<int> labels() const;
  // Per-class sample counts.
  std::vector<std::size_t> class_counts() const;

  bool operator==(const Dataset&) const = default;
};

// participant,label,gsr_00..gsr_22,pd_00..pd_38,st_00..st_22
std::vector<std::string> csv_header();

Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::istream& in, std::string provenance);
void write_csv(const Dataset& dataset, std::ostream& out);
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

struct SyntheticSpec {
  std::uint64_t seed = 0;
  std::size_t participants = 16;
  std::size_t records_per_participant = 12;
  double separation = 2.0;
};

// Class-conditional Gaussian cohort. Class c is centred at separation * c
// along its own random direction (unit RMS per feature), each participant adds
// a fixed offset (std 0.3 per feature), and every record carries unit
// observation noise. Record r of each participant has label r mod 4.
Dataset synthesize_dataset(const SyntheticSpec& spec);

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // already floored at kStdFloor
};

inline constexpr double kStdFloor = 1e-8;

FeatureStats fit_feature_stats(const Dataset& train);
Dataset apply_standardization(const Dataset& dataset, const FeatureStats& stats);

struct Standardized {
  Dataset train;
  std::vector<Dataset> others;
  FeatureStats stats;
};

// z-scores every split with statistics computed on `train` alone.
Standardized standardize(const Dataset& train, const std::vector<Dataset>& others = {});

struct HoldoutSplit {
  Dataset trainval;
  Dataset test;
  std::vector<std::string> warnings;
};

// Stratified: each class contributes floor(fraction * class_count) test samples,
// chosen by a seeded shuffle. Both parts keep the source order.
HoldoutSplit holdout_split(const Dataset& dataset, double fraction, std::uint64_t seed);

struct LooFold {
  Dataset train;
  Sample validation;
};

// Fold k holds out sample k.
std::vector<LooFold> loo_splits(const Dataset& trainval);

}  // namespace mlpinit
