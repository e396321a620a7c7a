#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sparsereg/core.hpp"

namespace sparsereg {

/// Regularization level and the features exempt from the L1 penalty.
/// An empty unpenalized set gives the ordinary Lasso.
struct PenaltySpec {
  double lambda = 0.0;
  IndexSet unpenalized;

  PenaltySpec() = default;
  PenaltySpec(double lambda_, IndexSet unpenalized_ = {})
      : lambda(lambda_), unpenalized(detail::normalized_index_set(std::move(unpenalized_))) {}

  void validate(std::size_t d) const {
    detail::require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::DomainError, "lambda must be >= 0");
    for (auto j : unpenalized) {
      detail::require(j < d, ErrorKind::DomainError,
                      "unpenalized index " + std::to_string(j + 1) + " exceeds d = " + std::to_string(d));
    }
  }

  /// Per-feature flag, true where the penalty applies.
  std::vector<bool> penalized_mask(std::size_t d) const {
    std::vector<bool> mask(d, true);
    for (auto j : unpenalized) mask[j] = false;
    return mask;
  }
};

struct SolverConfig {
  double kkt_tolerance = 1e-8;
  std::size_t max_sweeps = 100000;
  /// Inner active-set passes stop once no coefficient moves more than this (scaled by sqrt(A_jj)).
  double coefficient_change_tolerance = 1e-12;

  void validate() const {
    detail::require(kkt_tolerance > 0.0 && max_sweeps > 0 && coefficient_change_tolerance > 0.0,
                    ErrorKind::DomainError, "solver tolerances and sweep budget must be positive");
  }
};

struct LassoFit {
  CoefVector beta;
  double kkt_residual = 0.0;
  std::size_t sweeps_used = 0;
  double objective_value = 0.0;
  bool converged = false;
  /// Objective after each sweep, starting with the value at the initial point.
  std::vector<double> objective_trace;
};

/// (1/n) sum_i (beta^T x_i - y_i)^2 + lambda * sum_{j not in F} |beta_j|.
inline double objective(const DesignMatrix& x, const ResponseVector& y, const CoefVector& beta,
                        const PenaltySpec& penalty) {
  detail::check_dims(x, y);
  detail::check_dims(x, beta);
  penalty.validate(x.d());
  const auto mask = penalty.penalized_mask(x.d());
  double l1 = 0.0;
  for (std::size_t j = 0; j < x.d(); ++j) {
    if (mask[j]) l1 += std::abs(beta[j]);
  }
  return mean_squared_error(x, y, beta) + penalty.lambda * l1;
}

namespace detail {

/// Violation of the first-order condition given the smooth gradient g.
inline double kkt_violation(const Vector& g, const Vector& beta, const std::vector<bool>& penalized, double lambda) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    double v = 0.0;
    if (!penalized[static_cast<std::size_t>(j)]) {
      v = std::abs(g(j));
    } else if (beta(j) != 0.0) {
      v = std::abs(g(j) + lambda * (beta(j) > 0.0 ? 1.0 : -1.0));
    } else {
      v = std::max(0.0, std::abs(g(j)) - lambda);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

inline double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

}  // namespace detail

/// Maximum violation of the subgradient stationarity condition
///   (2/n) sum_i (beta^T x_i - y_i) x_i + lambda * g(beta) = 0,
/// where g_j = sign(beta_j) on penalized coordinates and 0 on unpenalized ones.
inline double kkt_residual(const DesignMatrix& x, const ResponseVector& y, const CoefVector& beta,
                           const PenaltySpec& penalty) {
  detail::check_dims(x, y);
  detail::check_dims(x, beta);
  penalty.validate(x.d());
  const Vector g = 2.0 * residual_correlation(x, y, beta).values();
  return detail::kkt_violation(g, beta.values(), penalty.penalized_mask(x.d()), penalty.lambda);
}

/// Cyclic coordinate descent for the selectively penalized least-squares objective.
///
/// Each coordinate is minimized exactly: with c_j = (1/n) x_j^T r + A_jj beta_j the update is
/// soft_threshold(c_j, lambda/2) / A_jj on penalized coordinates and c_j / A_jj otherwise.
/// Full sweeps alternate with passes over the current active set; convergence is declared only
/// when the full KKT residual drops below the tolerance.
inline LassoFit fit_lasso(const DesignMatrix& x, const ResponseVector& y, const PenaltySpec& penalty,
                          const SolverConfig& config = {}, const std::optional<CoefVector>& warm_start = std::nullopt) {
  detail::check_dims(x, y);
  penalty.validate(x.d());
  config.validate();
  const std::size_t d = x.d();
  const double n = static_cast<double>(x.n());
  const Matrix& xv = x.values();

  if (penalty.lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(xv);
    qr.setThreshold(1e-10);
    detail::require(qr.rank() == static_cast<Eigen::Index>(d), ErrorKind::IllPosed,
                    "lambda = 0 with a rank-deficient design has no unique minimizer");
  }

  Vector beta = Vector::Zero(static_cast<Eigen::Index>(d));
  if (warm_start) {
    detail::check_dims(x, *warm_start);
    beta = warm_start->values();
  }

  const auto penalized = penalty.penalized_mask(d);
  const double half_lambda = 0.5 * penalty.lambda;
  const Vector col_sq = xv.colwise().squaredNorm().transpose() / n;
  for (std::size_t j = 0; j < d; ++j) {
    if (col_sq(static_cast<Eigen::Index>(j)) == 0.0) beta(static_cast<Eigen::Index>(j)) = 0.0;
  }

  Vector residual = y.values() - xv * beta;
  auto current_objective = [&]() {
    double l1 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (penalized[j]) l1 += std::abs(beta(static_cast<Eigen::Index>(j)));
    }
    return residual.squaredNorm() / n + penalty.lambda * l1;
  };
  auto full_kkt = [&]() {
    const Vector g = -2.0 * xv.transpose() * residual / n;
    return detail::kkt_violation(g, beta, penalized, penalty.lambda);
  };

  // Returns the largest scaled coefficient change of the pass.
  auto update = [&](std::size_t j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double ajj = col_sq(jj);
    if (ajj == 0.0) return 0.0;
    const double old = beta(jj);
    const double c = xv.col(jj).dot(residual) / n + ajj * old;
    const double next = penalized[j] ? detail::soft_threshold(c, half_lambda) / ajj : c / ajj;
    if (next != old) {
      residual.noalias() -= (next - old) * xv.col(jj);
      beta(jj) = next;
    }
    return std::abs(next - old) * std::sqrt(ajj);
  };

  LassoFit fit;
  fit.objective_trace.push_back(current_objective());
  double kkt = full_kkt();
  std::size_t sweeps = 0;
  std::vector<std::size_t> active;
  active.reserve(d);

  while (kkt > config.kkt_tolerance && sweeps < config.max_sweeps) {
    for (std::size_t j = 0; j < d; ++j) update(j);
    ++sweeps;
    fit.objective_trace.push_back(current_objective());

    active.clear();
    for (std::size_t j = 0; j < d; ++j) {
      if (beta(static_cast<Eigen::Index>(j)) != 0.0 || !penalized[j]) active.push_back(j);
    }
    while (sweeps < config.max_sweeps && !active.empty()) {
      double change = 0.0;
      for (auto j : active) change = std::max(change, update(j));
      ++sweeps;
      fit.objective_trace.push_back(current_objective());
      if (change <= config.coefficient_change_tolerance) break;
    }

    // Drop accumulated drift in the running residual before measuring optimality.
    residual = y.values() - xv * beta;
    kkt = full_kkt();
  }

  fit.beta = CoefVector(beta);
  fit.sweeps_used = sweeps;
  fit.kkt_residual = kkt_residual(x, y, fit.beta, penalty);
  fit.objective_value = objective(x, y, fit.beta, penalty);
  fit.converged = fit.kkt_residual <= config.kkt_tolerance;
  return fit;
}

}  // namespace sparsereg
