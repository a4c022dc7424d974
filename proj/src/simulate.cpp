#include "causal_resample/simulate.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "causal_resample/csv.hpp"
#include "causal_resample/errors.hpp"

namespace causal_resample {

Dataset expand_weights(const Dataset& data) {
  if (!data.weighted()) return data;
  const auto& w = *data.weights;
  Eigen::Index total = 0;
  for (int wi : w) total += wi;
  Dataset out;
  out.values.resize(total, data.values.cols());
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (int k = 0; k < w[i]; ++k) out.values.row(r++) = data.values.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

void write_csv(std::ostream& out, const Dataset& data) {
  const int v = data.num_vars();
  for (int j = 0; j < v; ++j) out << (j ? "," : "") << 'x' << j;
  out << '\n';
  for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
    for (int j = 0; j < v; ++j) out << (j ? "," : "") << csv::format_double(data.values(i, j));
    out << '\n';
  }
}

Dataset read_csv(std::istream& in) {
  const csv::Table table = csv::read(in);
  const auto v = static_cast<Eigen::Index>(table.header.size());
  Dataset out;
  out.values.resize(static_cast<Eigen::Index>(table.rows.size()), v);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (static_cast<Eigen::Index>(row.size()) != v) {
      throw DataError("dataset csv: row " + std::to_string(i + 1) + " has wrong field count");
    }
    for (Eigen::Index j = 0; j < v; ++j) {
      out.values(static_cast<Eigen::Index>(i), j) = csv::parse_double(row[j]);
    }
  }
  return out;
}

namespace simulate {

namespace {

void check_support(const SemModel& model) {
  const int v = model.num_vars();
  if (model.beta.rows() != v || model.beta.cols() != v || model.error_var.size() != v) {
    throw StructuralError("SEM dimensions do not match the DAG");
  }
  for (int j = 0; j < v; ++j) {
    for (int i = 0; i < v; ++i) {
      if (model.beta(j, i) != 0.0 && !model.dag.has_edge(j, i)) {
        throw StructuralError("nonzero coefficient " + std::to_string(j) + " -> " +
                              std::to_string(i) + " without a DAG edge");
      }
    }
    if (!(model.error_var(j) > 0.0)) throw StructuralError("error variances must be positive");
  }
}

// Covariance of vertex v with every vertex placed before it in `order`, plus
// its own variance, from coefficients and already-filled rows of sigma.
void accumulate_vertex(const SemModel& model, int v, const std::vector<int>& done,
                       Eigen::MatrixXd& sigma) {
  const auto& parents = model.dag.parents(v);
  for (int u : done) {
    double s = 0.0;
    for (int p : parents) s += model.beta(p, v) * sigma(p, u);
    sigma(v, u) = s;
    sigma(u, v) = s;
  }
  double var = model.error_var(v);
  for (int p : parents) {
    for (int q : parents) var += model.beta(p, v) * model.beta(q, v) * sigma(p, q);
  }
  sigma(v, v) = var;
}

}  // namespace

SemModel parameterize(const graphs::Dag& dag, Rng& rng) {
  const int v = dag.num_vertices();
  SemModel model{dag, Eigen::MatrixXd::Zero(v, v), Eigen::VectorXd::Ones(v)};
  std::uniform_real_distribution<double> magnitude(kMinAbsCoefficient, kMaxAbsCoefficient);
  std::bernoulli_distribution negative(0.5);
  for (const auto& e : dag.edges()) {
    const double b = magnitude(rng);
    model.beta(e.parent, e.child) = negative(rng) ? -b : b;
  }
  return standardize(std::move(model));
}

SemModel standardize(SemModel model) {
  check_support(model);
  const int v = model.num_vars();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(v, v);
  std::vector<int> done;
  for (int x : graphs::topological_order(model.dag)) {
    accumulate_vertex(model, x, done, sigma);
    const double var = sigma(x, x);
    const double scale = 1.0 / std::sqrt(var);
    for (int p : model.dag.parents(x)) model.beta(p, x) *= scale;
    model.error_var(x) /= var;
    // Covariances with earlier vertices scale linearly; variance becomes 1.
    for (int u : done) {
      sigma(x, u) *= scale;
      sigma(u, x) *= scale;
    }
    sigma(x, x) = 1.0;
    done.push_back(x);
  }
  return model;
}

Eigen::MatrixXd implied_covariance(const SemModel& model) {
  check_support(model);
  const int v = model.num_vars();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(v, v);
  std::vector<int> done;
  for (int x : graphs::topological_order(model.dag)) {
    accumulate_vertex(model, x, done, sigma);
    done.push_back(x);
  }
  if (!sigma.allFinite()) throw StructuralError("implied covariance is not finite");
  return sigma;
}

Dataset simulate(const SemModel& model, std::size_t n, Rng& rng) {
  if (n == 0) throw ConfigError("sample count must be at least 1");
  check_support(model);
  const int v = model.num_vars();
  const auto order = graphs::topological_order(model.dag);
  Eigen::VectorXd noise_sd = model.error_var.array().sqrt();
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset out;
  out.values.resize(static_cast<Eigen::Index>(n), v);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (int x : order) {
      double value = noise_sd(x) * normal(rng);
      for (int p : model.dag.parents(x)) value += model.beta(p, x) * out.values(i, p);
      out.values(i, x) = value;
    }
  }
  return out;
}

}  // namespace simulate
}  // namespace causal_resample
