#include <doctest.h>

#include <sstream>

#include "causal_resample/errors.hpp"
#include "causal_resample/metrics.hpp"

using namespace causal_resample;
using namespace causal_resample::metrics;

namespace {

graphs::Dag chain(int p) {
  graphs::Dag dag(p);
  for (int v = 1; v < p; ++v) dag.add_edge(v - 1, v);
  return dag;
}

}  // namespace

TEST_CASE("hand-computed Brier score") {
  const std::vector<double> f{1.0, 0.0, 0.5};
  const std::vector<int> o{1, 0, 1};
  CHECK(std::abs(brier_score(f, o) - 0.25 / 3.0) < 1e-12);
  const std::vector<double> half(6, 0.5);
  CHECK(brier_score(half, std::vector<int>{1, 0, 0, 1, 1, 1}) == 0.25);
  CHECK_THROWS_AS(brier_score(f, std::vector<int>{1, 0}), UsageError);
}

TEST_CASE("hand-computed calibration error") {
  const std::vector<double> f{0.2, 0.2, 0.8, 0.8};
  const std::vector<int> o{0, 0, 1, 1};
  CHECK(std::abs(expected_calibration_error(f, o, 2) - 0.2) < 1e-12);

  const std::vector<double> g{0.1, 0.35, 0.35, 0.9, 1.0};
  const std::vector<int> y{0, 1, 0, 1, 0};
  const double mean_f = (0.1 + 0.35 + 0.35 + 0.9 + 1.0) / 5.0;
  CHECK(std::abs(expected_calibration_error(g, y, 1) - std::abs(mean_f - 0.4)) < 1e-12);

  // Bin edges: 0.5 falls in the upper bin of two, 1.0 in the last bin.
  const std::vector<double> edge{0.5, 1.0};
  CHECK(std::abs(expected_calibration_error(edge, std::vector<int>{1, 1}, 2) - 0.25) < 1e-12);
  CHECK(std::abs(expected_calibration_error(edge, std::vector<int>{1, 1}, 4) - 0.25) < 1e-12);
  CHECK(expected_calibration_error(std::vector<double>{0, 1, 1}, std::vector<int>{0, 1, 1}, 10) == 0.0);
  CHECK_THROWS_AS(expected_calibration_error(f, o, 0), UsageError);
}

TEST_CASE("precision, recall and F1 conventions") {
  const auto r = prf_from_counts(8, 2, 8, 100);
  CHECK(std::abs(r.precision - 0.8) < 1e-12);
  CHECK(std::abs(r.recall - 0.5) < 1e-12);
  CHECK(std::abs(r.f1 - 8.0 / 13.0) < 1e-12);

  const auto empty = prf_from_counts(0, 0, 0, 10);
  CHECK(empty.precision == 1.0);
  CHECK(empty.recall == 1.0);
  CHECK(empty.f1 == 1.0);

  const auto missed = prf_from_counts(0, 0, 3, 7);
  CHECK(missed.precision == 0.0);
  CHECK(missed.recall == 0.0);
  CHECK(missed.f1 == 0.0);

  const auto noise = prf_from_counts(0, 4, 0, 6);
  CHECK(noise.precision == 0.0);
  CHECK(noise.recall == 1.0);
  CHECK(noise.f1 == 0.0);
}

TEST_CASE("threshold ties predict an edge") {
  const auto r = classify(std::vector<double>{0.5, 0.49, 1.0}, std::vector<int>{1, 1, 0}, 0.5);
  CHECK(r.tp == 1);
  CHECK(r.fn == 1);
  CHECK(r.fp == 1);
  CHECK(r.tn == 0);
}

TEST_CASE("edge frequency tables") {
  const auto single = edge_frequencies(std::vector<graphs::Dag>{graphs::Dag(4)});
  for (double f : single.frequencies()) CHECK(f == 0.0);
  CHECK(single.num_pairs() == 6);

  graphs::Dag a(3);
  a.add_edge(0, 2);
  graphs::Dag b(3);
  b.add_edge(2, 0);
  b.add_edge(1, 2);
  const auto two = edge_frequencies(std::vector<graphs::Dag>{a, b, graphs::Dag(3), b});
  CHECK(two.frequency(0, 2) == 0.75);
  CHECK(two.frequency(2, 0) == 0.75);
  CHECK(two.frequency(1, 2) == 0.5);
  CHECK(two.frequency(0, 1) == 0.0);
  const auto freqs = two.frequencies();
  for (std::size_t i = 0; i < freqs.size(); ++i) CHECK(freqs[i] == two.counts()[i] * 0.25);

  const std::vector<graphs::Dag> same(100, chain(5));
  for (double f : edge_frequencies(same).frequencies()) CHECK((f == 0.0 || f == 1.0));

  CHECK_THROWS_AS(edge_frequencies(std::vector<graphs::Dag>{graphs::Dag(3), graphs::Dag(4)}), UsageError);
  CHECK_THROWS_AS(edge_frequencies(std::vector<graphs::Dag>{}), UsageError);
  CHECK_THROWS_AS(EdgeFrequencyTable(3, 2, {0, 3, 1}), UsageError);

  std::stringstream csv;
  write_csv(csv, two);
  CHECK(csv.str() == "u,v,freq\n0,1,0\n0,2,0.75\n1,2,0.5\n");
}

TEST_CASE("table-level metrics") {
  const auto truth = chain(5);
  const auto perfect = edge_frequencies(std::vector<graphs::Dag>{truth});
  const auto r = evaluate(perfect, truth);
  CHECK(r.brier == 0.0);
  CHECK(r.ece == 0.0);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK(r.tp + r.fp + r.fn + r.tn == 10);

  graphs::Dag other(5);
  other.add_edge(0, 1);
  other.add_edge(0, 4);
  const auto half = edge_frequencies(std::vector<graphs::Dag>{truth, other});
  // Pairs (0,1): 1, (1,2),(2,3),(3,4): 0.5 truth 1, (0,4): 0.5 truth 0.
  CHECK(std::abs(brier(half, truth) - 4 * 0.25 / 10.0) < 1e-12);
  const auto single = prf(edge_frequencies(std::vector<graphs::Dag>{other}), truth);
  const auto direct = prf_from_counts(1, 1, 3, 5);
  CHECK(single.precision == direct.precision);
  CHECK(single.recall == direct.recall);
  CHECK(single.f1 == direct.f1);

  CHECK_THROWS_AS(brier(half, chain(4)), UsageError);
}
