#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "mlpinit/network.hpp"

namespace mlpinit {

// counts[t][p]: samples of true class t predicted as p.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kClassCount>, kClassCount> counts{};

  std::uint64_t total() const;
  std::uint64_t trace() const;

  // Elementwise sum, for merging per-fold matrices.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix accumulate_confusion(std::span<const int> preds, std::span<const int> labels);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;

  bool operator==(const ClassMetrics&) const = default;
};

// 2PR/(P+R), or 0 when P + R == 0.
double f1_score(double precision, double recall);

// One-vs-rest per class; any 0/0 ratio is reported as 0.
std::array<ClassMetrics, kClassCount> per_class_metrics(const ConfusionMatrix& cm);

struct Report {
  std::array<ClassMetrics, kClassCount> per_class{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;

  bool operator==(const Report&) const = default;
};

// Unweighted means over the four classes plus trace/total accuracy.
Report summarize(const ConfusionMatrix& cm);

}  // namespace mlpinit
