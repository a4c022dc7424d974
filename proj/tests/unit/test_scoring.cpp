#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "causal_resample/errors.hpp"
#include "causal_resample/resample.hpp"
#include "causal_resample/scoring.hpp"
#include "causal_resample/simulate.hpp"
#include "oracles.hpp"

using namespace causal_resample;
using namespace causal_resample::scoring;

namespace {

SufficientStats manual_stats(Eigen::MatrixXd cov, double n) { return {std::move(cov), n, n}; }

Dataset sem_sample(int n, int p, Rng& rng) {
  const auto dag = graphs::generate_dag({graphs::GraphType::ScaleFree, p, 2.0}, rng);
  return simulate::simulate(simulate::parameterize(dag, rng), static_cast<std::size_t>(n), rng);
}

}  // namespace

TEST_CASE("covariance uses the MLE denominator") {
  Dataset data{Eigen::MatrixXd(2, 2), std::nullopt};
  data.values << 0, 0, 2, 2;
  const auto stats = sufficient_stats(data, false);
  CHECK(stats.cov.isApprox(Eigen::MatrixXd::Ones(2, 2)));
  CHECK(stats.n_raw == 2.0);
  CHECK(stats.score_n() == 2.0);
}

TEST_CASE("weighted covariance equals the expanded-row covariance") {
  Rng rng(1);
  Dataset data = sem_sample(4, 3, rng);
  data.weights = std::vector<int>{2, 1, 1, 0};
  const auto stats = sufficient_stats(data, false);
  const auto expanded = oracle::mle_covariance(expand_weights(data).values);
  CHECK((stats.cov - expanded).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(stats.n_raw == 4.0);
  CHECK(stats.n_eff == 4.0);
  CHECK(sufficient_stats(data, true).score_n() == doctest::Approx(16.0 / 6.0));

  for (int r = 0; r < 20; ++r) {
    const Dataset base = sem_sample(60, 5, rng);
    const auto boot = resample::bootstrap(base, rng);
    const auto s = sufficient_stats(boot, true);
    CHECK((s.cov - oracle::mle_covariance(expand_weights(boot).values)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.n_eff < s.n_raw);
  }
}

TEST_CASE("ESS adjustment with equal weights is a no-op") {
  Rng rng(2);
  Dataset data = sem_sample(10, 2, rng);
  data.weights = std::vector<int>(10, 1);
  const auto stats = sufficient_stats(data, true);
  CHECK(stats.score_n() == doctest::Approx(stats.n_raw));
  // Kish ESS counts distinct rows when weights are uniform.
  data.weights = std::vector<int>(10, 3);
  CHECK(sufficient_stats(data, true).score_n() == doctest::Approx(10.0));
  CHECK(sufficient_stats(data, true).n_raw == 30.0);
  CHECK(sufficient_stats(sem_sample(10, 2, rng), true).score_n() == 10.0);
}

TEST_CASE("too few effective rows") {
  Dataset one{Eigen::MatrixXd::Zero(1, 2), std::nullopt};
  CHECK_THROWS_AS(sufficient_stats(one, false), DataError);
  Dataset weighted{Eigen::MatrixXd::Zero(3, 2), std::vector<int>{0, 3, 0}};
  CHECK_THROWS_AS(sufficient_stats(weighted, false), DataError);
}

TEST_CASE("residual variance closed forms") {
  const double r = 0.6;
  Eigen::MatrixXd cov(2, 2);
  cov << 1, r, r, 1;
  const auto stats = manual_stats(cov, 100);
  CHECK(residual_variance(stats, 1, std::vector<int>{}) == 1.0);
  CHECK(residual_variance(stats, 1, std::vector<int>{0}, 0.0) == doctest::Approx(1 - r * r).epsilon(1e-14));
  CHECK(residual_variance(stats, 1, std::vector<int>{0}) == doctest::Approx(1 - r * r).epsilon(1e-7));
}

TEST_CASE("duplicate parent columns stay finite under the ridge") {
  Rng rng(3);
  Dataset data = sem_sample(200, 2, rng);
  Eigen::MatrixXd x(200, 3);
  x << data.values.col(0), data.values.col(0), data.values.col(1);
  const auto stats = sufficient_stats({x, std::nullopt}, false);
  const double s2 = residual_variance(stats, 2, std::vector<int>{0, 1});
  CHECK(std::isfinite(s2));
  CHECK(s2 > 0.0);
  CHECK(s2 == doctest::Approx(residual_variance(stats, 2, std::vector<int>{0})).epsilon(1e-6));
}

TEST_CASE("oversized parent sets are rejected") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(4, 4);
  const auto stats = manual_stats(cov, 3.0);
  CHECK_THROWS_AS(residual_variance(stats, 0, std::vector<int>{1, 2}), ScoringError);
  CHECK_NOTHROW(residual_variance(stats, 0, std::vector<int>{1}));
  CHECK_THROWS_AS(residual_variance(stats, 0, std::vector<int>{0}), UsageError);
}

TEST_CASE("local BIC reference values") {
  const auto stats = manual_stats(Eigen::MatrixXd::Identity(2, 2), 100);
  const ScoreConfig cfg{1.0, 0.0};
  CHECK(local_bic(stats, 0, std::vector<int>{}, cfg) == doctest::Approx(-141.8939).epsilon(1e-6));
  // An uncorrelated parent costs exactly the penalty.
  for (double c : {0.5, 1.0, 2.0}) {
    const ScoreConfig k{c, 0.0};
    const double diff = local_bic(stats, 0, std::vector<int>{1}, k) - local_bic(stats, 0, std::vector<int>{}, k);
    CHECK(diff == doctest::Approx(-0.5 * c * std::log(100.0)).epsilon(1e-12));
  }
}

TEST_CASE("uncorrelated parent costs the penalty on large samples") {
  Rng rng(4);
  Eigen::MatrixXd x(100'000, 2);
  std::normal_distribution<double> z;
  for (int i = 0; i < 100'000; ++i) x.row(i) << z(rng), z(rng);
  const auto stats = sufficient_stats({x, std::nullopt}, false);
  const ScoreConfig cfg;
  const double diff = local_bic(stats, 0, std::vector<int>{1}, cfg) - local_bic(stats, 0, std::vector<int>{}, cfg);
  // The likelihood gain is chi-square(1)/2, below 5 with probability 0.998.
  CHECK(std::abs(diff + 0.5 * std::log(100'000.0)) < 5.0);
}

TEST_CASE("graph BIC decomposes and matches a from-scratch fit") {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto dag = graphs::generate_dag({graphs::GraphType::ErdosRenyi, 7, 3.0}, rng);
    const auto data = simulate::simulate(simulate::parameterize(dag, rng), 500, rng);
    const auto stats = sufficient_stats(data, false);
    const ScoreConfig cfg{2.0, 0.0};
    double sum = 0.0;
    for (int v = 0; v < 7; ++v) sum += local_bic(stats, v, dag.parents(v), cfg);
    CHECK(graph_bic(stats, dag, cfg) == sum);
    CHECK(graph_bic(stats, dag, cfg) == doctest::Approx(oracle::bic_from_scratch(data.values, dag, 2.0)).epsilon(1e-10));
  }
}

TEST_CASE("residual variance is monotone in the parent set") {
  Rng rng(6);
  const auto stats = sufficient_stats(sem_sample(80, 6, rng), false);
  std::vector<int> parents;
  double prev = residual_variance(stats, 5, parents);
  for (int p : {0, 3, 1, 4, 2}) {
    parents.push_back(p);
    const double next = residual_variance(stats, 5, parents);
    CHECK(next <= prev + 1e-9);
    prev = next;
  }
}

TEST_CASE("edge decision reference values") {
  CHECK(delta_bic(100.0, 1.0, 1.0, 1.0) == doctest::Approx(-0.5 * std::log(100.0)));
  CHECK(delta_bic(100.0, 1.0, 0.9, 1.0) == doctest::Approx(8.2335).epsilon(1e-5));
  CHECK(delta_bic(100.0, 1.0, 0.9, 1.0) - delta_bic(100.0, 1.0, 0.9, 2.0) ==
        doctest::Approx(0.5 * std::log(100.0)).epsilon(1e-14));
  CHECK_THROWS_AS(delta_bic(100.0, 0.0, 0.9, 1.0), UsageError);
  CHECK_THROWS_AS(lrt_statistic(100.0, 1.0, -1.0), UsageError);

  const auto stats = manual_stats(Eigen::MatrixXd::Identity(2, 2), 100);
  CHECK(delta_bic(stats, 1.0, 0.9, ScoreConfig{}) == delta_bic(100.0, 1.0, 0.9, 1.0));
  CHECK(lrt_statistic(100.0, 1.0, 0.9) == doctest::Approx(200.0 * std::log(1.0 / 0.9)));
  CHECK(lrt_pvalue(stats, 1.0, 1.0) == 1.0);
}

TEST_CASE("chi-square(1) tail matches quadrature") {
  CHECK(chi2_1_survival(0.0) == 1.0);
  for (double lambda : {0.1, 1.0, 3.8415, 6.6349, 10.0}) {
    CHECK(std::abs(chi2_1_survival(lambda) - oracle::chi2_1_tail(lambda)) < 1e-10);
  }
  CHECK(chi2_1_survival(3.8415) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi2_1_survival(6.6349) == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("ESS/penalty-doubling identity") {
  Rng rng(7);
  std::uniform_real_distribution<double> n_dist(2.0, 1e5);
  std::uniform_real_distribution<double> dl_dist(0.0, 1.0);
  std::uniform_real_distribution<double> c_dist(0.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const double n = n_dist(rng);
    const double c = c_dist(rng);
    const auto r = ess_doubling_identity_check(n, dl_dist(rng), c);
    CHECK(std::abs(r.twice_delta_ess - r.delta_raw_doubled - c * std::numbers::ln2) < 1e-9);
    if (std::abs(r.delta_raw_doubled) > c * std::numbers::ln2) {
      CHECK((r.twice_delta_ess > 0) == (r.delta_raw_doubled > 0));
    }
  }
  const auto zero = ess_doubling_identity_check(500.0, 0.01, 0.0);
  CHECK(zero.twice_delta_ess == doctest::Approx(zero.delta_raw_doubled).epsilon(1e-15));
}

TEST_CASE("null p-values are uniform without resampling") {
  Rng rng(8);
  std::normal_distribution<double> z;
  std::vector<double> p;
  for (int r = 0; r < 5000; ++r) {
    Eigen::MatrixXd x(1000, 2);
    for (int i = 0; i < 1000; ++i) x.row(i) << z(rng), z(rng);
    const auto stats = sufficient_stats({x, std::nullopt}, false);
    const double no = std::sqrt(residual_variance(stats, 1, std::vector<int>{}));
    const double yes = std::sqrt(residual_variance(stats, 1, std::vector<int>{0}));
    p.push_back(lrt_pvalue(stats, no, yes));
  }
  // Critical KS distance at alpha = 0.001 for 5000 draws.
  CHECK(oracle::ks_uniform(p) < 1.9495 / std::sqrt(5000.0));
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS((ScoreConfig{0.0, 1e-8}.validate()), ConfigError);
  CHECK_THROWS_AS((ScoreConfig{1.0, -1.0}.validate()), ConfigError);
  CHECK_NOTHROW(ScoreConfig{}.validate());
}
