#include "mlpinit/evaluation.hpp"

#include <string>

#include "mlpinit/errors.hpp"

namespace mlpinit {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts) {
    for (auto v : row) n += v;
  }
  return n;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t n = 0;
  for (std::size_t c = 0; c < kClassCount; ++c) n += counts[c][c];
  return n;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t t = 0; t < kClassCount; ++t) {
    for (std::size_t p = 0; p < kClassCount; ++p) counts[t][p] += other.counts[t][p];
  }
  return *this;
}

ConfusionMatrix accumulate_confusion(std::span<const int> preds, std::span<const int> labels) {
  if (preds.size() != labels.size()) {
    throw ValidationError("accumulate_confusion: " + std::to_string(preds.size()) +
                          " predictions vs " + std::to_string(labels.size()) + " labels");
  }
  auto in_range = [](int c) { return c >= 0 && static_cast<std::size_t>(c) < kClassCount; };
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!in_range(preds[i]) || !in_range(labels[i])) {
      throw ValidationError("accumulate_confusion: class out of range at position " +
                            std::to_string(i));
    }
    ++cm.counts[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(preds[i])];
  }
  return cm;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::array<ClassMetrics, kClassCount> per_class_metrics(const ConfusionMatrix& cm) {
  std::array<ClassMetrics, kClassCount> out{};
  for (std::size_t c = 0; c < kClassCount; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t k = 0; k < kClassCount; ++k) {
      row += cm.counts[c][k];
      col += cm.counts[k][c];
    }
    const std::uint64_t tp = cm.counts[c][c];
    auto& m = out[c];
    m.precision = ratio(tp, col);  // tp + fp
    m.recall = ratio(tp, row);     // tp + fn
    m.f1 = f1_score(m.precision, m.recall);
    m.support = row;
  }
  return out;
}

Report summarize(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) {
    throw ValidationError("summarize: confusion matrix is empty");
  }
  Report r;
  r.confusion = cm;
  r.per_class = per_class_metrics(cm);
  for (const auto& m : r.per_class) {
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
  }
  const double k = static_cast<double>(kClassCount);
  r.macro_precision /= k;
  r.macro_recall /= k;
  r.macro_f1 /= k;
  r.accuracy = ratio(cm.trace(), total);
  return r;
}

}  // namespace mlpinit
