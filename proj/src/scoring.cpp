#include "causal_resample/scoring.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "causal_resample/errors.hpp"
#include "causal_resample/resample.hpp"

namespace causal_resample::scoring {

void ScoreConfig::validate() const {
  if (!(penalty_discount > 0.0) || !std::isfinite(penalty_discount)) {
    throw ConfigError("penalty discount must be positive");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ConfigError("ridge must be nonnegative");
}

SufficientStats sufficient_stats(const Dataset& data, bool ess_adjust) {
  const auto n = static_cast<Eigen::Index>(data.rows());
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (data.weighted()) {
    const auto& weights = *data.weights;
    if (static_cast<Eigen::Index>(weights.size()) != n) {
      throw UsageError("weight count does not match row count");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (weights[i] < 0) throw UsageError("frequency weights must be nonnegative");
      w(i) = weights[i];
    }
  }
  if ((w.array() > 0.0).count() < 2) {
    throw DataError("sufficient statistics need at least 2 effective rows");
  }

  const double total = w.sum();
  const Eigen::RowVectorXd mean = (w.transpose() * data.values) / total;
  const Eigen::MatrixXd centered = data.values.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * (centered.array().colwise() * w.array()).matrix();
  cov /= total;
  cov = 0.5 * (cov + cov.transpose());

  SufficientStats stats;
  stats.cov = std::move(cov);
  stats.n_raw = total;
  stats.n_eff = total;
  if (ess_adjust && data.weighted()) stats.n_eff = resample::effective_sample_size(*data.weights);
  return stats;
}

double residual_variance(const SufficientStats& stats, int v, std::span<const int> parents,
                         double ridge) {
  const int p = stats.num_vars();
  if (v < 0 || v >= p) throw UsageError("vertex out of range");
  const auto k = static_cast<Eigen::Index>(parents.size());
  if (static_cast<double>(k) >= stats.score_n() - 1.0 && k > 0) {
    throw ScoringError("parent set of size " + std::to_string(k) + " too large for n = " +
                       std::to_string(stats.score_n()));
  }
  const double svv = stats.cov(v, v);
  if (k == 0) {
    if (!(svv > 0.0)) throw ScoringError("variable has zero variance");
    return svv;
  }

  Eigen::MatrixXd spp(k, k);
  Eigen::VectorXd spv(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const int pa = parents[a];
    if (pa == v || pa < 0 || pa >= p) throw UsageError("invalid parent index");
    spv(a) = stats.cov(pa, v);
    for (Eigen::Index b = 0; b < k; ++b) spp(a, b) = stats.cov(pa, parents[b]);
    spp(a, a) += ridge;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(spp);
  if (llt.info() != Eigen::Success) throw ScoringError("parent covariance block is not PD");
  const double resid = svv - spv.dot(llt.solve(spv));
  if (!(resid > 0.0) || !std::isfinite(resid)) {
    throw ScoringError("nonpositive residual variance");
  }
  return resid;
}

double gaussian_loglik(double score_n, double residual_var) {
  return -0.5 * score_n * (std::log(2.0 * std::numbers::pi) + std::log(residual_var) + 1.0);
}

double local_bic(const SufficientStats& stats, int v, std::span<const int> parents,
                 const ScoreConfig& cfg) {
  const double n = stats.score_n();
  const double resid = residual_variance(stats, v, parents, cfg.ridge);
  return gaussian_loglik(n, resid) -
         cfg.penalty_discount * 0.5 * static_cast<double>(parents.size()) * std::log(n);
}

double graph_bic(const SufficientStats& stats, const graphs::Dag& dag, const ScoreConfig& cfg) {
  if (dag.num_vertices() != stats.num_vars()) throw UsageError("graph/statistics size mismatch");
  double total = 0.0;
  for (int v = 0; v < dag.num_vertices(); ++v) total += local_bic(stats, v, dag.parents(v), cfg);
  return total;
}

namespace {

void check_sigmas(double sigma_no, double sigma_yes) {
  if (!(sigma_no > 0.0) || !(sigma_yes > 0.0)) {
    throw UsageError("residual standard deviations must be positive");
  }
}

}  // namespace

double delta_bic(double score_n, double sigma_no, double sigma_yes, double penalty_discount) {
  check_sigmas(sigma_no, sigma_yes);
  return score_n * (std::log(sigma_no) - std::log(sigma_yes)) -
         0.5 * penalty_discount * std::log(score_n);
}

double delta_bic(const SufficientStats& stats, double sigma_no, double sigma_yes,
                 const ScoreConfig& cfg) {
  return delta_bic(stats.score_n(), sigma_no, sigma_yes, cfg.penalty_discount);
}

double lrt_statistic(double score_n, double sigma_no, double sigma_yes) {
  check_sigmas(sigma_no, sigma_yes);
  const double lambda = 2.0 * score_n * (std::log(sigma_no) - std::log(sigma_yes));
  return lambda > 0.0 ? lambda : 0.0;
}

double lrt_pvalue(const SufficientStats& stats, double sigma_no, double sigma_yes) {
  return chi2_1_survival(lrt_statistic(stats.score_n(), sigma_no, sigma_yes));
}

double chi2_1_survival(double lambda) {
  if (std::isnan(lambda)) throw UsageError("chi-square statistic is NaN");
  if (lambda <= 0.0) return 1.0;
  return std::erfc(std::sqrt(0.5 * lambda));
}

PenaltyDoublingCheck ess_doubling_identity_check(double n, double log_sigma_ratio, double c) {
  const double half_n = 0.5 * n;
  const double delta_ess = half_n * log_sigma_ratio - 0.5 * c * std::log(half_n);
  const double delta_raw = n * log_sigma_ratio - 0.5 * (2.0 * c) * std::log(n);
  return {2.0 * delta_ess, delta_raw};
}

}  // namespace causal_resample::scoring
