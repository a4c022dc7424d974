#ifndef CAUSAL_RESAMPLE_METRICS_HPP
#define CAUSAL_RESAMPLE_METRICS_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "causal_resample/graphs.hpp"

namespace causal_resample::metrics {

inline constexpr int kDefaultEceBins = 10;
inline constexpr double kDefaultThreshold = 0.5;

// Per-pair adjacency counts across an ensemble of graphs. Frequencies are
// count / ensemble_size, laid out by graphs::pair_index.
class EdgeFrequencyTable {
 public:
  EdgeFrequencyTable(int num_vertices, int ensemble_size, std::vector<int> counts);

  int num_vertices() const { return num_vertices_; }
  int ensemble_size() const { return ensemble_size_; }
  std::size_t num_pairs() const { return counts_.size(); }

  double frequency(int u, int v) const;
  std::vector<double> frequencies() const;
  const std::vector<int>& counts() const { return counts_; }

 private:
  int num_vertices_;
  int ensemble_size_;
  std::vector<int> counts_;
};

struct MetricsRecord {
  double brier = 0.0;
  double ece = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;
};

EdgeFrequencyTable edge_frequencies(std::span<const graphs::Dag> graphs);

// Columns u,v,freq for every pair u < v.
void write_csv(std::ostream& out, const EdgeFrequencyTable& table);

// Mean squared error between forecasts and 0/1 outcomes.
double brier_score(std::span<const double> forecast, std::span<const int> outcome);

// Equal-width bins over [0, 1]; bin i holds [i/K, (i+1)/K), the last bin is
// closed at 1. Empty bins contribute nothing.
double expected_calibration_error(std::span<const double> forecast, std::span<const int> outcome,
                                  int bins);

// Precision/recall/F1 from confusion counts. Degenerate denominators:
// precision is 1 when nothing is predicted and nothing is missed (else 0),
// recall is 1 when there are no positives, F1 is 0 when P + R = 0.
MetricsRecord prf_from_counts(long long tp, long long fp, long long fn, long long tn);

// Pair predicted adjacent iff forecast >= threshold.
MetricsRecord classify(std::span<const double> forecast, std::span<const int> outcome,
                       double threshold);

double brier(const EdgeFrequencyTable& table, const graphs::Dag& truth);
double ece(const EdgeFrequencyTable& table, const graphs::Dag& truth, int bins = kDefaultEceBins);
MetricsRecord prf(const EdgeFrequencyTable& table, const graphs::Dag& truth,
                  double threshold = kDefaultThreshold);

// All five metrics plus the confusion counts.
MetricsRecord evaluate(const EdgeFrequencyTable& table, const graphs::Dag& truth,
                       int bins = kDefaultEceBins, double threshold = kDefaultThreshold);

}  // namespace causal_resample::metrics

#endif  // CAUSAL_RESAMPLE_METRICS_HPP
