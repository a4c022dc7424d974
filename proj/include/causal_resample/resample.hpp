#ifndef CAUSAL_RESAMPLE_RESAMPLE_HPP
#define CAUSAL_RESAMPLE_RESAMPLE_HPP

#include <span>
#include <string>

#include "causal_resample/rng.hpp"
#include "causal_resample/simulate.hpp"

namespace causal_resample::resample {

enum class PlanKind { NoResampling, Bootstrap, Subsample };

struct ResamplePlan {
  PlanKind kind = PlanKind::NoResampling;
  bool ess_adjust = false;  // Bootstrap only: score with the effective sample size.
  double fraction = 0.0;    // Subsample only, in (0, 1).
  int replicates = 1;

  static ResamplePlan none() { return {}; }
  static ResamplePlan bootstrap(bool ess_adjust, int replicates) {
    return {PlanKind::Bootstrap, ess_adjust, 0.0, replicates};
  }
  static ResamplePlan subsample(double fraction, int replicates) {
    return {PlanKind::Subsample, false, fraction, replicates};
  }

  void validate() const;
  // NoResampling always runs exactly one replicate.
  int effective_replicates() const { return kind == PlanKind::NoResampling ? 1 : replicates; }
  bool scores_with_ess() const { return kind == PlanKind::Bootstrap && ess_adjust; }
  // "none", "bootstrap", "bootstrap_ess", "subsample_50", ...
  std::string label() const;
};

// Original rows with Multinomial(n, uniform) frequency weights.
Dataset bootstrap(const Dataset& data, Rng& rng);

// round-half-up(fraction * n) distinct rows, uniformly without replacement,
// kept in their original row order.
Dataset subsample(const Dataset& data, double fraction, Rng& rng);

// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const int> weights);

// One replicate of `plan` (the input itself for NoResampling).
Dataset draw(const Dataset& data, const ResamplePlan& plan, Rng& rng);

}  // namespace causal_resample::resample

#endif  // CAUSAL_RESAMPLE_RESAMPLE_HPP
