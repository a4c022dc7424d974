#include "causal_resample/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causal_resample/errors.hpp"

namespace causal_resample::resample {

void ResamplePlan::validate() const {
  if (replicates < 1) throw ConfigError("replicates must be positive");
  if (kind == PlanKind::Subsample && !(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("subsample fraction must lie in (0, 1)");
  }
}

std::string ResamplePlan::label() const {
  switch (kind) {
    case PlanKind::NoResampling:
      return "none";
    case PlanKind::Bootstrap:
      return ess_adjust ? "bootstrap_ess" : "bootstrap";
    case PlanKind::Subsample: {
      const double pct = fraction * 100.0;
      const double rounded = std::round(pct);
      if (std::abs(pct - rounded) < 1e-9) {
        return "subsample_" + std::to_string(static_cast<long long>(rounded));
      }
      std::string s = std::to_string(pct);
      s.erase(s.find_last_not_of('0') + 1);
      return "subsample_" + s;
    }
  }
  return "unknown";
}

Dataset bootstrap(const Dataset& data, Rng& rng) {
  if (data.weighted()) throw UsageError("bootstrap expects an unweighted dataset");
  const std::size_t n = data.rows();
  if (n == 0) throw UsageError("bootstrap of an empty dataset");
  std::vector<int> weights(n, 0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t i = 0; i < n; ++i) ++weights[pick(rng)];
  return Dataset{data.values, std::move(weights)};
}

Dataset subsample(const Dataset& data, double fraction, Rng& rng) {
  if (data.weighted()) throw UsageError("subsample expects an unweighted dataset");
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("subsample fraction must lie in (0, 1)");
  const std::size_t n = data.rows();
  const auto m = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
  if (m == 0) throw ConfigError("subsample size rounds to zero rows");
  if (m >= n) throw ConfigError("subsample size must be smaller than the dataset");

  // Partial Fisher-Yates: the first m slots become a uniform m-subset.
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());

  Dataset out;
  out.values.resize(static_cast<Eigen::Index>(m), data.values.cols());
  for (std::size_t r = 0; r < m; ++r) out.values.row(static_cast<Eigen::Index>(r)) = data.values.row(idx[r]);
  return out;
}

double effective_sample_size(std::span<const int> weights) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int w : weights) {
    if (w < 0) throw UsageError("frequency weights must be nonnegative");
    sum += w;
    sum_sq += static_cast<double>(w) * w;
  }
  if (sum <= 0.0) throw UsageError("effective sample size of all-zero weights");
  return sum * sum / sum_sq;
}

Dataset draw(const Dataset& data, const ResamplePlan& plan, Rng& rng) {
  plan.validate();
  switch (plan.kind) {
    case PlanKind::NoResampling:
      return data;
    case PlanKind::Bootstrap:
      return bootstrap(data, rng);
    case PlanKind::Subsample:
      return subsample(data, plan.fraction, rng);
  }
  throw UsageError("unknown resampling plan");
}

}  // namespace causal_resample::resample
