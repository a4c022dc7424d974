#ifndef CAUSAL_RESAMPLE_SIMULATE_HPP
#define CAUSAL_RESAMPLE_SIMULATE_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "causal_resample/graphs.hpp"
#include "causal_resample/rng.hpp"

namespace causal_resample {

// n x v sample matrix. When `weights` is set, row i stands for weights[i]
// copies of itself (bootstrap frequency weights).
struct Dataset {
  Eigen::MatrixXd values;
  std::optional<std::vector<int>> weights;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  int num_vars() const { return static_cast<int>(values.cols()); }
  bool weighted() const { return weights.has_value(); }
};

// Row-expanded copy of a weighted dataset (row i repeated weights[i] times).
Dataset expand_weights(const Dataset& data);

// CSV with header x0,x1,...; weights are not persisted.
void write_csv(std::ostream& out, const Dataset& data);
Dataset read_csv(std::istream& in);

namespace simulate {

// Linear-Gaussian SEM. beta(j, i) is the coefficient of parent j on child i.
struct SemModel {
  graphs::Dag dag;
  Eigen::MatrixXd beta;
  Eigen::VectorXd error_var;

  int num_vars() const { return dag.num_vertices(); }
};

inline constexpr double kMinAbsCoefficient = 0.2;
inline constexpr double kMaxAbsCoefficient = 1.0;

// Coefficients uniform on +-[0.2, 1.0], unit error variances, then standardized.
SemModel parameterize(const graphs::Dag& dag, Rng& rng);

// Rescales each variable, in topological order, to unit implied variance.
// The implied covariance of the result is a correlation matrix.
SemModel standardize(SemModel model);

// (I - B)^-T Omega (I - B)^-1, accumulated forward along a topological order.
Eigen::MatrixXd implied_covariance(const SemModel& model);

Dataset simulate(const SemModel& model, std::size_t n, Rng& rng);

}  // namespace simulate
}  // namespace causal_resample

#endif  // CAUSAL_RESAMPLE_SIMULATE_HPP
