#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hbias/labelspace.hpp"
#include "hbias/types.hpp"

namespace hbias {

using Epoch = std::int64_t;

struct PredictionRecord {
  Epoch epoch = 0;
  std::string example_id;
  Label true_label = 0;
  Label pred_label = 0;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

// Per-epoch predictions of some classifier in a label space of `label_count`
// labels. Records are kept grouped by epoch (stable sort on construction).
class PredictionLog {
 public:
  PredictionLog() = default;
  PredictionLog(std::vector<PredictionRecord> records, std::size_t label_count);

  const std::vector<PredictionRecord>& records() const { return records_; }
  std::size_t label_count() const { return label_count_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Distinct epochs in increasing order.
  std::vector<Epoch> epochs() const;
  // The contiguous run of records for one epoch (empty if absent).
  std::span<const PredictionRecord> slice(Epoch epoch) const;

 private:
  std::vector<PredictionRecord> records_;
  std::size_t label_count_ = 0;
};

enum class Scale { percent, unit, signed_ };

struct SeriesPoint {
  Epoch epoch = 0;
  double value = 0.0;
};

struct MetricSeries {
  std::vector<SeriesPoint> points;
  Scale scale = Scale::percent;

  std::size_t size() const { return points.size(); }
  // Index of the maximum value; ties go to the earliest epoch.
  std::size_t argmax() const;
};

struct ConfusionMatrix {
  std::vector<Label> order;
  // counts(i, j) = #records with true == order[i] and pred == order[j]
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
};

// A(X, t) in percent, one point per epoch.
MetricSeries accuracy_series(const PredictionLog& log);

std::vector<double> uniform_priors(std::size_t class_count);
// Frequencies of the true labels in the log's first epoch.
std::vector<double> empirical_priors(const PredictionLog& log);

// Chance accuracy of a guess drawn from the superclass prior: sum_r P_r^2.
double baseline(const LabelSpace& s, std::span<const double> priors);

// A(t) / A(T), T = argmax.
MetricSeries relative_accuracy(const MetricSeries& a);
// (A(t) - 100 b) / (A(T) - 100 b), T = argmax; `b` is a chance probability.
MetricSeries relative_gain(const MetricSeries& a, double b);
// (100 - A(t)) / (100 - A(T)) - 1 with T the final epoch.
MetricSeries residual_error(const MetricSeries& a);

// Expected superclass accuracy of a greedy classifier with hyponym accuracy
// p_h whose errors land on superclasses independently of the truth:
// p_h + (1 - p_h) * sum_r P_r^2.
double theoretical_superclass_accuracy(double p_h, const LabelSpace& s,
                                       std::span<const double> priors);

// First epoch whose value reaches `fraction` of the series maximum.
Epoch convergence_epoch(const MetricSeries& a, double fraction = 0.95);

// Confusion counts for one epoch, rows and columns arranged by `order`, which
// must be a permutation of the log's labels.
ConfusionMatrix confusion_matrix(const PredictionLog& log, Epoch epoch, std::span<const Label> order);

}  // namespace hbias
