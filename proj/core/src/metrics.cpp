#include "hbias/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hbias/error.hpp"

namespace hbias {

PredictionLog::PredictionLog(std::vector<PredictionRecord> records, std::size_t label_count)
    : records_(std::move(records)), label_count_(label_count) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.true_label >= label_count_ || r.pred_label >= label_count_) {
      throw Error("prediction log: record " + std::to_string(i) + " has label out of range (" +
                  std::to_string(std::max(r.true_label, r.pred_label)) +
                  " >= " + std::to_string(label_count_) + ")");
    }
    if (r.epoch < 0) throw Error("prediction log: record " + std::to_string(i) + " has negative epoch");
  }
  std::stable_sort(records_.begin(), records_.end(),
                   [](const auto& a, const auto& b) { return a.epoch < b.epoch; });
}

std::vector<Epoch> PredictionLog::epochs() const {
  std::vector<Epoch> out;
  for (const auto& r : records_) {
    if (out.empty() || out.back() != r.epoch) out.push_back(r.epoch);
  }
  return out;
}

std::span<const PredictionRecord> PredictionLog::slice(Epoch epoch) const {
  auto cmp = [](const PredictionRecord& r, Epoch e) { return r.epoch < e; };
  auto first = std::lower_bound(records_.begin(), records_.end(), epoch, cmp);
  auto last = first;
  while (last != records_.end() && last->epoch == epoch) ++last;
  return {first, last};
}

std::size_t MetricSeries::argmax() const {
  if (points.empty()) throw Error("metric series is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].value > points[best].value) best = i;
  }
  return best;
}

MetricSeries accuracy_series(const PredictionLog& log) {
  if (log.empty()) throw Error("accuracy: empty prediction log");
  MetricSeries out{{}, Scale::percent};
  std::size_t hits = 0;
  std::size_t total = 0;
  const auto& recs = log.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    hits += recs[i].true_label == recs[i].pred_label;
    ++total;
    if (i + 1 == recs.size() || recs[i + 1].epoch != recs[i].epoch) {
      out.points.push_back({recs[i].epoch, 100.0 * static_cast<double>(hits) / static_cast<double>(total)});
      hits = total = 0;
    }
  }
  return out;
}

std::vector<double> uniform_priors(std::size_t class_count) {
  return std::vector<double>(class_count, 1.0 / static_cast<double>(class_count));
}

std::vector<double> empirical_priors(const PredictionLog& log) {
  if (log.empty()) throw Error("empirical priors: empty prediction log");
  const auto first = log.slice(log.records().front().epoch);
  std::vector<double> out(log.label_count(), 0.0);
  for (const auto& r : first) out[r.true_label] += 1.0;
  for (double& p : out) p /= static_cast<double>(first.size());
  return out;
}

namespace {

void check_priors(std::span<const double> priors, std::size_t class_count) {
  if (priors.size() != class_count) {
    throw Error("priors: expected " + std::to_string(class_count) + " entries, got " +
                std::to_string(priors.size()));
  }
  double sum = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error("priors: negative or non-finite entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("priors: entries sum to " + std::to_string(sum));
}

}  // namespace

double baseline(const LabelSpace& s, std::span<const double> priors) {
  check_priors(priors, s.class_count());
  double total = 0.0;
  for (const auto& sc : s.superclasses()) {
    double p = 0.0;
    for (Label c : sc.members) p += priors[c];
    total += p * p;
  }
  return total;
}

MetricSeries relative_accuracy(const MetricSeries& a) {
  const double peak = a.points[a.argmax()].value;
  if (peak == 0.0) throw Error("relative accuracy: maximum accuracy is zero");
  MetricSeries out{a.points, Scale::unit};
  for (auto& p : out.points) p.value /= peak;
  return out;
}

MetricSeries relative_gain(const MetricSeries& a, double b) {
  const double chance = 100.0 * b;
  const double denom = a.points[a.argmax()].value - chance;
  if (!(denom > 0.0)) throw Error("relative gain: maximum accuracy does not exceed chance level");
  MetricSeries out{a.points, Scale::unit};
  for (auto& p : out.points) p.value = (p.value - chance) / denom;
  return out;
}

MetricSeries residual_error(const MetricSeries& a) {
  if (a.points.empty()) throw Error("residual error: empty series");
  const double final_error = 100.0 - a.points.back().value;
  if (!(final_error > 0.0)) throw Error("residual error: final accuracy is 100");
  MetricSeries out{a.points, Scale::signed_};
  for (auto& p : out.points) p.value = (100.0 - p.value) / final_error - 1.0;
  return out;
}

double theoretical_superclass_accuracy(double p_h, const LabelSpace& s,
                                       std::span<const double> priors) {
  if (!(p_h >= 0.0 && p_h <= 1.0)) throw Error("theoretical accuracy: p_h outside [0, 1]");
  return p_h + (1.0 - p_h) * baseline(s, priors);
}

Epoch convergence_epoch(const MetricSeries& a, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("convergence: fraction outside (0, 1]");
  const double threshold = fraction * a.points[a.argmax()].value;
  for (const auto& p : a.points) {
    if (p.value >= threshold) return p.epoch;
  }
  return a.points[a.argmax()].epoch;
}

ConfusionMatrix confusion_matrix(const PredictionLog& log, Epoch epoch, std::span<const Label> order) {
  const std::size_t n = log.label_count();
  if (order.size() != n) throw Error("confusion matrix: order is not a permutation of the labels");
  std::vector<std::size_t> position(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (order[i] >= n || position[order[i]] != n) {
      throw Error("confusion matrix: order is not a permutation of the labels");
    }
    position[order[i]] = i;
  }
  ConfusionMatrix out{{order.begin(), order.end()}, {}};
  out.counts.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& r : log.slice(epoch)) {
    ++out.counts(static_cast<Eigen::Index>(position[r.true_label]),
                 static_cast<Eigen::Index>(position[r.pred_label]));
  }
  return out;
}

}  // namespace hbias
