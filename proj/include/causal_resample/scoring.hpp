#ifndef CAUSAL_RESAMPLE_SCORING_HPP
#define CAUSAL_RESAMPLE_SCORING_HPP

#include <span>

#include <Eigen/Dense>

#include "causal_resample/graphs.hpp"
#include "causal_resample/simulate.hpp"

namespace causal_resample::scoring {

inline constexpr double kDefaultRidge = 1e-8;

struct SufficientStats {
  Eigen::MatrixXd cov;  // weighted MLE covariance (1 / sum w denominator)
  double n_raw = 0.0;   // sum of weights, or row count
  double n_eff = 0.0;   // ESS when scored with ESS adjustment, else n_raw

  // The sample count that enters both likelihood and penalty.
  double score_n() const { return n_eff; }
  int num_vars() const { return static_cast<int>(cov.rows()); }
};

struct ScoreConfig {
  double penalty_discount = 1.0;
  double ridge = kDefaultRidge;

  void validate() const;
};

// Weighted mean-centered covariance. With ess_adjust and frequency weights,
// score_n is the Kish effective sample size; otherwise the weight total.
SufficientStats sufficient_stats(const Dataset& data, bool ess_adjust);

// S_vv - S_vP (S_PP + ridge I)^-1 S_Pv. Throws ScoringError when the parent
// set cannot be scored (|P| >= score_n - 1, non-PD block, nonpositive result).
double residual_variance(const SufficientStats& stats, int v, std::span<const int> parents,
                         double ridge = kDefaultRidge);

// Gaussian log-likelihood of one vertex given its parents at the MLE:
// -(n/2) (log 2 pi + log sigma^2 + 1).
double gaussian_loglik(double score_n, double residual_var);

// Penalty-discounted local BIC: loglik - c (|P| / 2) log n.
double local_bic(const SufficientStats& stats, int v, std::span<const int> parents,
                 const ScoreConfig& cfg);

// Sum of local scores over all vertices (in index order).
double graph_bic(const SufficientStats& stats, const graphs::Dag& dag, const ScoreConfig& cfg);

// BIC difference in favor of adding a single edge, from residual standard
// deviations without (sigma_no) and with (sigma_yes) the edge:
//   n (log sigma_no - log sigma_yes) - (c / 2) log n.
// Positive means the edge is preferred.
double delta_bic(double score_n, double sigma_no, double sigma_yes, double penalty_discount);
double delta_bic(const SufficientStats& stats, double sigma_no, double sigma_yes,
                 const ScoreConfig& cfg);

// Likelihood ratio statistic 2 n (log sigma_no - log sigma_yes), clamped at 0.
double lrt_statistic(double score_n, double sigma_no, double sigma_yes);
double lrt_pvalue(const SufficientStats& stats, double sigma_no, double sigma_yes);

// Upper tail of the chi-square distribution with one degree of freedom.
double chi2_1_survival(double lambda);

struct PenaltyDoublingCheck {
  double twice_delta_ess;    // 2 * delta with n_eff = n / 2 and penalty c
  double delta_raw_doubled;  // delta with the full n and penalty 2c
};

// Scores one nested edge comparison both ways. The two results always differ
// by exactly c log 2, the bootstrap/ESS-to-penalty-doubling correspondence.
PenaltyDoublingCheck ess_doubling_identity_check(double n, double log_sigma_ratio, double c);

}  // namespace causal_resample::scoring

#endif  // CAUSAL_RESAMPLE_SCORING_HPP
