#include "causal_resample/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "causal_resample/csv.hpp"
#include "causal_resample/errors.hpp"

namespace causal_resample::metrics {

EdgeFrequencyTable::EdgeFrequencyTable(int num_vertices, int ensemble_size, std::vector<int> counts)
    : num_vertices_(num_vertices), ensemble_size_(ensemble_size), counts_(std::move(counts)) {
  if (num_vertices < 1) throw UsageError("frequency table needs at least one vertex");
  if (ensemble_size < 1) throw UsageError("frequency table needs a nonempty ensemble");
  if (counts_.size() != graphs::num_pairs(num_vertices)) {
    throw UsageError("frequency table has the wrong number of pairs");
  }
  for (int c : counts_) {
    if (c < 0 || c > ensemble_size) throw UsageError("pair count outside [0, ensemble_size]");
  }
}

double EdgeFrequencyTable::frequency(int u, int v) const {
  if (u == v || u < 0 || v < 0 || u >= num_vertices_ || v >= num_vertices_) {
    throw UsageError("invalid vertex pair");
  }
  if (u > v) std::swap(u, v);
  return static_cast<double>(counts_[graphs::pair_index(u, v, num_vertices_)]) / ensemble_size_;
}

std::vector<double> EdgeFrequencyTable::frequencies() const {
  std::vector<double> out(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    out[i] = static_cast<double>(counts_[i]) / ensemble_size_;
  }
  return out;
}

EdgeFrequencyTable edge_frequencies(std::span<const graphs::Dag> ensemble) {
  if (ensemble.empty()) throw UsageError("edge frequencies of an empty ensemble");
  const int n = ensemble.front().num_vertices();
  std::vector<int> counts(graphs::num_pairs(n), 0);
  for (const auto& g : ensemble) {
    if (g.num_vertices() != n) throw UsageError("ensemble graphs differ in vertex count");
    for (const auto& e : g.edges()) {
      const int u = std::min(e.parent, e.child);
      const int v = std::max(e.parent, e.child);
      ++counts[graphs::pair_index(u, v, n)];
    }
  }
  return EdgeFrequencyTable(n, static_cast<int>(ensemble.size()), std::move(counts));
}

void write_csv(std::ostream& out, const EdgeFrequencyTable& table) {
  out << "u,v,freq\n";
  const int n = table.num_vertices();
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      out << u << ',' << v << ',' << csv::format_double(table.frequency(u, v)) << '\n';
    }
  }
}

namespace {

void check_lengths(std::span<const double> forecast, std::span<const int> outcome) {
  if (forecast.size() != outcome.size()) throw UsageError("forecast/outcome size mismatch");
}

std::vector<int> truth_outcomes(const EdgeFrequencyTable& table, const graphs::Dag& truth) {
  if (truth.num_vertices() != table.num_vertices()) {
    throw UsageError("frequency table and truth differ in vertex count");
  }
  return graphs::adjacency_indicator(truth);
}

}  // namespace

double brier_score(std::span<const double> forecast, std::span<const int> outcome) {
  check_lengths(forecast, outcome);
  if (forecast.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const double d = forecast[i] - outcome[i];
    sum += d * d;
  }
  return sum / static_cast<double>(forecast.size());
}

double expected_calibration_error(std::span<const double> forecast, std::span<const int> outcome,
                                  int bins) {
  check_lengths(forecast, outcome);
  if (bins < 1) throw UsageError("ECE needs at least one bin");
  if (forecast.empty()) return 0.0;
  std::vector<double> sum_forecast(bins, 0.0);
  std::vector<double> sum_outcome(bins, 0.0);
  std::vector<long long> count(bins, 0);
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    // Small slack so k/K computed in floating point lands in bin k.
    auto b = static_cast<int>(std::floor(forecast[i] * bins + 1e-9));
    b = std::clamp(b, 0, bins - 1);
    sum_forecast[b] += forecast[i];
    sum_outcome[b] += outcome[i];
    ++count[b];
  }
  const auto total = static_cast<double>(forecast.size());
  double ece = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    const auto c = static_cast<double>(count[b]);
    ece += (c / total) * std::abs(sum_outcome[b] / c - sum_forecast[b] / c);
  }
  return ece;
}

MetricsRecord prf_from_counts(long long tp, long long fp, long long fn, long long tn) {
  MetricsRecord r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  if (tp + fp == 0) {
    r.precision = fn == 0 ? 1.0 : 0.0;
  } else {
    r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  r.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double denom = r.precision + r.recall;
  r.f1 = denom == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / denom;
  return r;
}

MetricsRecord classify(std::span<const double> forecast, std::span<const int> outcome,
                       double threshold) {
  check_lengths(forecast, outcome);
  if (!(threshold > 0.0 && threshold < 1.0)) throw UsageError("threshold must lie in (0, 1)");
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const bool predicted = forecast[i] >= threshold;
    const bool actual = outcome[i] != 0;
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
    else ++tn;
  }
  return prf_from_counts(tp, fp, fn, tn);
}

double brier(const EdgeFrequencyTable& table, const graphs::Dag& truth) {
  const auto outcome = truth_outcomes(table, truth);
  return brier_score(table.frequencies(), outcome);
}

double ece(const EdgeFrequencyTable& table, const graphs::Dag& truth, int bins) {
  const auto outcome = truth_outcomes(table, truth);
  return expected_calibration_error(table.frequencies(), outcome, bins);
}

MetricsRecord prf(const EdgeFrequencyTable& table, const graphs::Dag& truth, double threshold) {
  const auto outcome = truth_outcomes(table, truth);
  return classify(table.frequencies(), outcome, threshold);
}

MetricsRecord evaluate(const EdgeFrequencyTable& table, const graphs::Dag& truth, int bins,
                       double threshold) {
  const auto outcome = truth_outcomes(table, truth);
  const auto forecast = table.frequencies();
  MetricsRecord r = classify(forecast, outcome, threshold);
  r.brier = brier_score(forecast, outcome);
  r.ece = expected_calibration_error(forecast, outcome, bins);
  return r;
}

}  // namespace causal_resample::metrics
