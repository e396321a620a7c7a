#pragma once

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "sparsereg/core.hpp"
#include "sparsereg/lasso.hpp"
#include "sparsereg/random.hpp"

namespace sparsereg {

/// Select every coefficient with |beta_j| > alpha.
struct ThresholdRule {
  double alpha = 0.0;
};

/// Select exactly q coefficients of largest magnitude.
struct TopQRule {
  std::size_t q = 0;
};

using SelectionRule = std::variant<ThresholdRule, TopQRule>;

struct TwoStageResult {
  LassoFit stage1;
  IndexSet selected;
  LassoFit stage2;
};

struct CvRecord {
  int stage = 1;  // 1: lambda scan of the plain Lasso, 2: q scan of the two-stage fit
  double lambda = 0.0;
  std::size_t q = 0;
  double mean_error = 0.0;
  std::size_t folds = 0;
};

struct TuningResult {
  double lambda_star = 0.0;
  std::size_t q_star = 0;
  std::vector<CvRecord> cv_table;
};

/// Features picked for the unpenalized set of stage two.
///
/// Top-q always returns exactly min(q, d) indices: magnitude ties go to the lower index, and zero
/// coefficients are taken (lowest index first) when fewer than q are nonzero.
inline IndexSet select_features(const CoefVector& beta, const SelectionRule& rule) {
  if (const auto* threshold = std::get_if<ThresholdRule>(&rule)) {
    detail::require(threshold->alpha > 0.0, ErrorKind::DomainError, "threshold rule requires alpha > 0");
    return support_threshold(beta, threshold->alpha);
  }
  const auto q = std::get<TopQRule>(rule).q;
  detail::require(q <= beta.size(), ErrorKind::DomainError, "top-q rule requires q <= d");
  auto order = magnitude_order(beta.values());
  order.resize(q);
  return detail::normalized_index_set(std::move(order));
}

/// Stage two only: refit with the selected features unpenalized, warm-started at stage one.
inline TwoStageResult finish_two_stage(const DesignMatrix& x, const ResponseVector& y, double lambda,
                                       LassoFit stage1, const SelectionRule& rule, const SolverConfig& config) {
  TwoStageResult result;
  result.selected = select_features(stage1.beta, rule);
  result.stage2 = fit_lasso(x, y, PenaltySpec(lambda, result.selected), config, stage1.beta);
  result.stage1 = std::move(stage1);
  return result;
}

/// Lasso, then the same lambda again with the selected features exempt from the penalty.
inline TwoStageResult run_two_stage(const DesignMatrix& x, const ResponseVector& y, double lambda,
                                    const SelectionRule& rule, const SolverConfig& config = {}) {
  auto stage1 = fit_lasso(x, y, PenaltySpec(lambda), config);
  return finish_two_stage(x, y, lambda, std::move(stage1), rule, config);
}

namespace detail {

inline Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

inline Vector take_rows(const Vector& v, const std::vector<std::size_t>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(rows[i]));
  return out;
}

struct FoldSplit {
  DesignMatrix x_train;
  ResponseVector y_train;
  DesignMatrix x_valid;
  ResponseVector y_valid;
};

inline std::vector<FoldSplit> make_fold_splits(const DesignMatrix& x, const ResponseVector& y,
                                               const std::vector<std::size_t>& fold_of) {
  std::size_t folds = 0;
  for (auto f : fold_of) folds = std::max(folds, f + 1);
  std::vector<FoldSplit> splits;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < fold_of.size(); ++i) (fold_of[i] == f ? valid : train).push_back(i);
    require(!valid.empty() && !train.empty(), ErrorKind::EmptyFold,
            "fold " + std::to_string(f + 1) + " leaves an empty training or validation set");
    splits.push_back(FoldSplit{DesignMatrix(take_rows(x.values(), train)), ResponseVector(take_rows(y.values(), train)),
                               DesignMatrix(take_rows(x.values(), valid)), ResponseVector(take_rows(y.values(), valid))});
  }
  return splits;
}

}  // namespace detail

/// Fold label per sample: a seeded shuffle of 0..n-1 cut into `folds` contiguous blocks.
inline std::vector<std::size_t> cv_fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed) {
  detail::require(folds >= 2, ErrorKind::DomainError, "cross-validation needs at least two folds");
  detail::require(folds <= n, ErrorKind::EmptyFold, "more folds than samples");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RandomStream rng(seed, 0xCF);
  rng.shuffle(order);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = pos * folds / n;
  return fold_of;
}

/// Sequential tuning: lambda on stage-one validation error, then q on stage-two validation error
/// at that lambda. Ties prefer the larger lambda and the smaller q.
inline TuningResult tune_sequential(const DesignMatrix& x, const ResponseVector& y,
                                    const std::vector<double>& lambda_grid, const std::vector<std::size_t>& q_grid,
                                    const std::vector<std::size_t>& fold_of, const SolverConfig& config = {}) {
  detail::check_dims(x, y);
  detail::require(!lambda_grid.empty() && !q_grid.empty(), ErrorKind::DomainError, "tuning grids must be non-empty");
  detail::require(fold_of.size() == x.n(), ErrorKind::DimensionMismatch, "fold assignment length must equal n");
  for (double lambda : lambda_grid) {
    detail::require(lambda > 0.0, ErrorKind::DomainError, "lambda grid must be positive");
  }
  for (auto q : q_grid) detail::require(q <= x.d(), ErrorKind::DomainError, "q grid entries must be <= d");

  const auto splits = detail::make_fold_splits(x, y, fold_of);
  TuningResult result;

  double best = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    double total = 0.0;
    for (const auto& split : splits) {
      const auto fit = fit_lasso(split.x_train, split.y_train, PenaltySpec(lambda), config);
      total += mean_squared_error(split.x_valid, split.y_valid, fit.beta);
    }
    const double error = total / static_cast<double>(splits.size());
    result.cv_table.push_back(CvRecord{1, lambda, 0, error, splits.size()});
    if (error < best || (error == best && lambda > result.lambda_star)) {
      best = error;
      result.lambda_star = lambda;
    }
  }

  std::vector<double> q_error(q_grid.size(), 0.0);
  for (const auto& split : splits) {
    const auto stage1 = fit_lasso(split.x_train, split.y_train, PenaltySpec(result.lambda_star), config);
    for (std::size_t iq = 0; iq < q_grid.size(); ++iq) {
      const auto two = finish_two_stage(split.x_train, split.y_train, result.lambda_star, stage1,
                                        TopQRule{q_grid[iq]}, config);
      q_error[iq] += mean_squared_error(split.x_valid, split.y_valid, two.stage2.beta);
    }
  }
  best = std::numeric_limits<double>::infinity();
  for (std::size_t iq = 0; iq < q_grid.size(); ++iq) {
    const double error = q_error[iq] / static_cast<double>(splits.size());
    result.cv_table.push_back(CvRecord{2, result.lambda_star, q_grid[iq], error, splits.size()});
    if (error < best || (error == best && q_grid[iq] < result.q_star)) {
      best = error;
      result.q_star = q_grid[iq];
    }
  }
  return result;
}

inline TuningResult tune_sequential(const DesignMatrix& x, const ResponseVector& y,
                                    const std::vector<double>& lambda_grid, const std::vector<std::size_t>& q_grid,
                                    std::size_t folds, std::uint64_t seed, const SolverConfig& config = {}) {
  return tune_sequential(x, y, lambda_grid, q_grid, cv_fold_assignment(x.n(), folds, seed), config);
}

}  // namespace sparsereg
