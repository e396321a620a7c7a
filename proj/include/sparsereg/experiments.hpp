#pragma once

// Synthetic and hold-out experiment harnesses, bound-validation Monte Carlo and table output.
// Every trial draws from its own substream derive_seed(seed, trial), so results do not depend on
// the order in which trials run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparsereg/bounds.hpp"
#include "sparsereg/core.hpp"
#include "sparsereg/diagnostics.hpp"
#include "sparsereg/io.hpp"
#include "sparsereg/lasso.hpp"
#include "sparsereg/random.hpp"
#include "sparsereg/two_stage.hpp"

namespace sparsereg {

enum class DesignKind {
  /// i.i.d. standard Gaussian entries.
  Gaussian,
  /// Orthonormal columns plus a small Gaussian perturbation (requires n >= d).
  NearOrthogonal,
};

struct SimConfig {
  std::size_t n = 25;
  std::size_t d = 100;
  std::size_t k_true = 5;
  double sigma = 1.0;
  double coef_low = -10.0;
  double coef_high = 10.0;
  std::size_t trials = 100;
  std::vector<double> lambda_grid;
  std::vector<std::size_t> q_grid{0, 1, 2, 3, 4, 5, 6};
  std::uint64_t seed = 1;
  DesignKind design = DesignKind::Gaussian;
  double perturbation = 0.02;
  SolverConfig solver;

  void validate(bool need_grids = true) const {
    detail::require(n >= 1 && d >= 1, ErrorKind::DomainError, "n and d must be >= 1");
    detail::require(k_true <= d, ErrorKind::DomainError, "k_true must be <= d");
    detail::require(trials >= 1, ErrorKind::DomainError, "trials must be >= 1");
    detail::require(coef_low < coef_high, ErrorKind::DomainError, "coef_low must be < coef_high");
    detail::require(sigma >= 0.0, ErrorKind::DomainError, "sigma must be nonnegative");
    detail::require(design != DesignKind::NearOrthogonal || n >= d, ErrorKind::DomainError,
                    "near-orthogonal designs need n >= d");
    if (need_grids) {
      detail::require(!lambda_grid.empty() && !q_grid.empty(), ErrorKind::DomainError, "grids must be non-empty");
      for (double l : lambda_grid) detail::require(l > 0.0, ErrorKind::DomainError, "lambda grid must be positive");
      for (auto q : q_grid) detail::require(q <= d, ErrorKind::DomainError, "q grid entries must be <= d");
    }
  }
};

struct SyntheticInstance {
  DesignMatrix x;
  ResponseVector y;
  CoefVector beta_true;
  ResponseVector mean_response;
};

struct TrialRecord {
  std::size_t trial = 0;
  double lambda = 0.0;
  std::size_t q = 0;
  double train_error = 0.0;
  std::optional<double> test_error;
  std::optional<double> estimation_error;
  std::size_t selected_size = 0;
  std::uint64_t seed = 0;
};

struct AggregateRow {
  double lambda = 0.0;
  std::size_t q = 0;
  std::string metric;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t trials = 0;
  std::size_t failed = 0;
};

struct AggregateTable {
  std::vector<AggregateRow> rows;
  /// Free-form run description written next to the CSV.
  std::map<std::string, std::string> metadata;

  const AggregateRow* find(double lambda, std::size_t q, const std::string& metric) const {
    for (const auto& r : rows) {
      if (r.lambda == lambda && r.q == q && r.metric == metric) return &r;
    }
    return nullptr;
  }
};

namespace detail {

inline Matrix gaussian_matrix(RandomStream& rng, std::size_t rows, std::size_t cols) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
  }
  return m;
}

}  // namespace detail

/// Column-normalized design (sum_i x_ij^2 = n) and, for NearOrthogonal, an orthonormal basis
/// perturbed by `perturbation` before normalization.
inline Matrix generate_design(const SimConfig& config, RandomStream& rng) {
  Matrix x = detail::gaussian_matrix(rng, config.n, config.d);
  if (config.design == DesignKind::NearOrthogonal) {
    Eigen::HouseholderQR<Matrix> qr(x);
    Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
    x = q * std::sqrt(static_cast<double>(config.n)) + config.perturbation * detail::gaussian_matrix(rng, config.n, config.d);
  }
  return normalize_columns(std::move(x));
}

/// Instance `trial` of the configured model: y = X beta_true + N(0, sigma^2) noise.
inline SyntheticInstance generate_synthetic(const SimConfig& config, std::size_t trial) {
  config.validate(false);
  RandomStream rng(config.seed, trial);
  Matrix x = generate_design(config, rng);
  const auto support = rng.sample_without_replacement(config.d, config.k_true);
  Vector beta = Vector::Zero(static_cast<Eigen::Index>(config.d));
  for (auto j : support) beta(static_cast<Eigen::Index>(j)) = rng.uniform(config.coef_low, config.coef_high);
  Vector ey = x * beta;
  Vector y = ey;
  if (config.sigma > 0.0) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += config.sigma * rng.normal();
  }
  return SyntheticInstance{DesignMatrix(std::move(x)), ResponseVector(std::move(y)), CoefVector(std::move(beta)),
                           ResponseVector(std::move(ey))};
}

/// 2 ||(1/n) X^T y||_inf: the smallest lambda at which the plain Lasso returns zero.
inline double lambda_max(const DesignMatrix& x, const ResponseVector& y) {
  detail::check_dims(x, y);
  return 2.0 * (x.values().transpose() * y.values()).cwiseAbs().maxCoeff() / static_cast<double>(x.n());
}

/// `points` log-spaced values from ratio * lambda_max up to lambda_max, ascending.
inline std::vector<double> default_lambda_grid(const DesignMatrix& x, const ResponseVector& y, std::size_t points = 32,
                                               double ratio = 1e-3) {
  detail::require(points >= 2 && ratio > 0.0 && ratio < 1.0, ErrorKind::DomainError, "invalid lambda grid request");
  const double top = lambda_max(x, y);
  detail::require(top > 0.0, ErrorKind::DomainError, "lambda_max is zero; the response is orthogonal to every column");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = top * std::pow(ratio, 1.0 - frac);
  }
  grid.back() = top;
  return grid;
}

namespace detail {

/// Per-cell accumulation in trial order.
struct CellStats {
  std::vector<double> values;
  std::size_t failed = 0;
};

inline void summarize(AggregateTable& table, double lambda, std::size_t q, const std::string& metric,
                      const CellStats& cell, std::size_t trials) {
  AggregateRow row{lambda, q, metric, 0.0, 0.0, trials, cell.failed};
  const auto m = cell.values.size();
  if (m > 0) {
    double sum = 0.0;
    for (double v : cell.values) sum += v;
    row.mean = sum / static_cast<double>(m);
    if (m > 1) {
      double ss = 0.0;
      for (double v : cell.values) ss += (v - row.mean) * (v - row.mean);
      row.stderr_ = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
    }
  } else {
    row.mean = std::numeric_limits<double>::quiet_NaN();
  }
  table.rows.push_back(row);
}

/// Order in which the lambda path is traversed: largest lambda first, for warm starts.
inline std::vector<std::size_t> descending_order(const std::vector<double>& grid) {
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });
  return order;
}

struct PathCell {
  bool ok = false;
  double train_error = 0.0;
  double test_error = 0.0;
  double estimation_error = 0.0;
  std::size_t selected = 0;
};

/// Two-stage fits over the whole (lambda, q) grid on one training set. Stage one follows the
/// lambda path with warm starts. cells[il * |q_grid| + iq].
inline std::vector<PathCell> fit_grid(const DesignMatrix& x, const ResponseVector& y, const std::vector<double>& lambda_grid,
                                      const std::vector<std::size_t>& q_grid, const SolverConfig& solver,
                                      const DesignMatrix* x_test, const ResponseVector* y_test,
                                      const CoefVector* beta_true) {
  std::vector<PathCell> cells(lambda_grid.size() * q_grid.size());
  std::optional<CoefVector> warm;
  for (auto il : descending_order(lambda_grid)) {
    const double lambda = lambda_grid[il];
    std::optional<LassoFit> stage1;
    try {
      stage1 = fit_lasso(x, y, PenaltySpec(lambda), solver, warm);
    } catch (const Error&) {
      stage1.reset();
    }
    if (!stage1 || !stage1->converged) {
      warm.reset();
      continue;
    }
    warm = stage1->beta;
    for (std::size_t iq = 0; iq < q_grid.size(); ++iq) {
      PathCell& cell = cells[il * q_grid.size() + iq];
      try {
        const auto two = finish_two_stage(x, y, lambda, *stage1, TopQRule{q_grid[iq]}, solver);
        if (!two.stage2.converged) continue;
        cell.ok = true;
        cell.train_error = mean_squared_error(x, y, two.stage2.beta);
        if (x_test) cell.test_error = mean_squared_error(*x_test, *y_test, two.stage2.beta);
        if (beta_true) cell.estimation_error = (two.stage2.beta.values() - beta_true->values()).norm();
        cell.selected = two.selected.size();
      } catch (const Error&) {
        cell.ok = false;
      }
    }
  }
  return cells;
}

inline void describe_grid(AggregateTable& table, const std::vector<double>& lambda_grid,
                          const std::vector<std::size_t>& q_grid) {
  std::string ls, qs;
  for (double l : lambda_grid) ls += (ls.empty() ? "" : ",") + format_number(l);
  for (auto q : q_grid) qs += (qs.empty() ? "" : ",") + std::to_string(q);
  table.metadata["lambda_grid"] = ls;
  table.metadata["q_grid"] = qs;
  table.metadata["random_stream_version"] = std::to_string(kRandomStreamVersion);
}

}  // namespace detail

/// Two-stage top-q fits over the (lambda, q) grid for every trial. Metrics: train_error,
/// estimation_error (||beta' - beta_true||_2) and selected_size. An empty lambda grid is replaced
/// by default_lambda_grid of trial 0.
inline AggregateTable run_simulation(SimConfig config) {
  if (config.lambda_grid.empty()) {
    const auto first = generate_synthetic(config, 0);
    config.lambda_grid = default_lambda_grid(first.x, first.y);
  }
  config.validate();
  const std::size_t nl = config.lambda_grid.size();
  const std::size_t nq = config.q_grid.size();
  std::vector<detail::CellStats> train(nl * nq), est(nl * nq), sel(nl * nq);
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const auto inst = generate_synthetic(config, trial);
    const auto cells = detail::fit_grid(inst.x, inst.y, config.lambda_grid, config.q_grid, config.solver, nullptr,
                                        nullptr, &inst.beta_true);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!cells[c].ok) {
        ++train[c].failed, ++est[c].failed, ++sel[c].failed;
        continue;
      }
      train[c].values.push_back(cells[c].train_error);
      est[c].values.push_back(cells[c].estimation_error);
      sel[c].values.push_back(static_cast<double>(cells[c].selected));
    }
  }
  AggregateTable table;
  for (std::size_t il = 0; il < nl; ++il) {
    for (std::size_t iq = 0; iq < nq; ++iq) {
      const std::size_t c = il * nq + iq;
      detail::summarize(table, config.lambda_grid[il], config.q_grid[iq], "train_error", train[c], config.trials);
      detail::summarize(table, config.lambda_grid[il], config.q_grid[iq], "estimation_error", est[c], config.trials);
      detail::summarize(table, config.lambda_grid[il], config.q_grid[iq], "selected_size", sel[c], config.trials);
    }
  }
  detail::describe_grid(table, config.lambda_grid, config.q_grid);
  table.metadata["experiment"] = "simulation";
  table.metadata["n"] = std::to_string(config.n);
  table.metadata["d"] = std::to_string(config.d);
  table.metadata["k_true"] = std::to_string(config.k_true);
  table.metadata["sigma"] = format_number(config.sigma);
  table.metadata["trials"] = std::to_string(config.trials);
  table.metadata["seed"] = std::to_string(config.seed);
  return table;
}

struct TabularData {
  DesignMatrix x;
  ResponseVector y;
};

/// Numeric CSV or whitespace table; a non-numeric first row is treated as a header.
/// target_column is 0-based. The intercept column of ones is appended last.
inline TabularData load_tabular_dataset(const std::string& path, std::size_t target_column, bool add_intercept) {
  const Matrix raw = read_numeric_table(path, true);
  detail::require(raw.rows() >= 1, ErrorKind::EmptyDataset, "'" + path + "' has no rows");
  detail::require(target_column < static_cast<std::size_t>(raw.cols()), ErrorKind::DomainError,
                  "target column " + std::to_string(target_column + 1) + " exceeds the " +
                      std::to_string(raw.cols()) + " columns of '" + path + "'");
  const Eigen::Index features = raw.cols() - 1 + (add_intercept ? 1 : 0);
  detail::require(features >= 1, ErrorKind::EmptyDataset, "'" + path + "' has no feature columns");
  Matrix x(raw.rows(), features);
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    if (static_cast<std::size_t>(j) != target_column) x.col(c++) = raw.col(j);
  }
  if (add_intercept) x.col(c) = Vector::Ones(raw.rows());
  return TabularData{DesignMatrix(std::move(x)), ResponseVector(raw.col(static_cast<Eigen::Index>(target_column)))};
}

/// Appends m standard Gaussian columns, each scaled to sum_i x_ij^2 = n.
inline DesignMatrix augment_random_features(const DesignMatrix& x, std::size_t m, std::uint64_t seed) {
  if (m == 0) return x;
  RandomStream rng(seed, 0xA0617E);
  const Matrix extra = normalize_columns(detail::gaussian_matrix(rng, x.n(), m));
  Matrix out(x.values().rows(), x.values().cols() + static_cast<Eigen::Index>(m));
  out << x.values(), extra;
  return DesignMatrix(std::move(out));
}

/// Random train/test splits: train_size rows train, every other row tests. Metrics: train_error,
/// test_error and selected_size per (lambda, q).
inline AggregateTable run_holdout(const DesignMatrix& x, const ResponseVector& y, std::size_t train_size,
                                  std::size_t trials, const std::vector<double>& lambda_grid,
                                  const std::vector<std::size_t>& q_grid, std::uint64_t seed,
                                  const SolverConfig& solver = {}) {
  detail::check_dims(x, y);
  detail::require(train_size >= 1 && train_size < x.n(), ErrorKind::DomainError, "train_size must lie in [1, n)");
  detail::require(trials >= 1, ErrorKind::DomainError, "trials must be >= 1");
  detail::require(!lambda_grid.empty() && !q_grid.empty(), ErrorKind::DomainError, "grids must be non-empty");
  for (auto q : q_grid) detail::require(q <= x.d(), ErrorKind::DomainError, "q grid entries must be <= d");
  const std::size_t nl = lambda_grid.size();
  const std::size_t nq = q_grid.size();
  std::vector<detail::CellStats> train(nl * nq), test(nl * nq), sel(nl * nq);
  const std::uint64_t split_seed = derive_seed(seed, 0x5B117);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    RandomStream rng(split_seed, trial);
    std::vector<std::size_t> order(x.n());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const std::vector<std::size_t> tr(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
    const std::vector<std::size_t> te(order.begin() + static_cast<std::ptrdiff_t>(train_size), order.end());
    const DesignMatrix x_tr(detail::take_rows(x.values(), tr));
    const ResponseVector y_tr(detail::take_rows(y.values(), tr));
    const DesignMatrix x_te(detail::take_rows(x.values(), te));
    const ResponseVector y_te(detail::take_rows(y.values(), te));
    const auto cells = detail::fit_grid(x_tr, y_tr, lambda_grid, q_grid, solver, &x_te, &y_te, nullptr);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!cells[c].ok) {
        ++train[c].failed, ++test[c].failed, ++sel[c].failed;
        continue;
      }
      train[c].values.push_back(cells[c].train_error);
      test[c].values.push_back(cells[c].test_error);
      sel[c].values.push_back(static_cast<double>(cells[c].selected));
    }
  }
  AggregateTable table;
  for (std::size_t il = 0; il < nl; ++il) {
    for (std::size_t iq = 0; iq < nq; ++iq) {
      const std::size_t c = il * nq + iq;
      detail::summarize(table, lambda_grid[il], q_grid[iq], "train_error", train[c], trials);
      detail::summarize(table, lambda_grid[il], q_grid[iq], "test_error", test[c], trials);
      detail::summarize(table, lambda_grid[il], q_grid[iq], "selected_size", sel[c], trials);
    }
  }
  detail::describe_grid(table, lambda_grid, q_grid);
  table.metadata["experiment"] = "holdout";
  table.metadata["n"] = std::to_string(x.n());
  table.metadata["d"] = std::to_string(x.d());
  table.metadata["train_size"] = std::to_string(train_size);
  table.metadata["trials"] = std::to_string(trials);
  table.metadata["seed"] = std::to_string(seed);
  return table;
}

/// Knobs of the bound Monte Carlo beyond the data model in SimConfig.
struct BoundMcOptions {
  std::size_t k = 2;
  std::size_t ell = 3;
  double t = 0.5;
  NormIndex p = NormIndex::two();
  /// Two-stage runs: alpha = alpha_factor * lambda; the planted target has k_true - 1 coefficients
  /// of magnitude in [2 alpha, 3 alpha] and one below lambda.
  double alpha_factor = 80.0;
  DiagnosticsConfig diagnostics{200000, false, 0, 0x5eed};
};

struct BoundTrial {
  std::size_t trial = 0;
  bool conditions_hold = false;
  std::optional<double> rhs;
  double measured = 0.0;
  bool violated = false;
};

struct BoundMcResult {
  std::string bound_name;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t evaluable = 0;
  std::size_t violations = 0;
  /// violations / evaluable, or 0 when no trial passed the conditions.
  double violation_rate = 0.0;
  std::vector<BoundTrial> rows;
};

namespace detail {

/// A target with `big` coefficients in [2 alpha, 3 alpha] (random signs) and the rest in
/// (0, lambda / 2], on a random support of size k_true.
inline Vector planted_two_scale(RandomStream& rng, std::size_t d, std::size_t k_true, std::size_t big, double alpha,
                                double lambda) {
  Vector beta = Vector::Zero(static_cast<Eigen::Index>(d));
  const auto support = rng.sample_without_replacement(d, k_true);
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double mag = i < big ? rng.uniform(2.0 * alpha, 3.0 * alpha) : rng.uniform(0.05, 0.5) * lambda;
    beta(static_cast<Eigen::Index>(support[i])) = sign * mag;
  }
  return beta;
}

}  // namespace detail

/// Fraction of condition-passing trials whose measured error exceeds the bound.
/// Supported bounds: corollary41 (p-norm of the one-stage error), corollary61 (2-norm, one stage)
/// and theorem81 (2-norm of the two-stage error with threshold alpha). Lambda sits at the
/// bound's own floor in every trial.
inline BoundMcResult validate_bound_montecarlo(const SimConfig& config, const std::string& bound_name, double delta,
                                               const BoundMcOptions& options = {}) {
  config.validate(false);
  detail::require(delta > 0.0 && delta < 1.0, ErrorKind::DomainError, "delta must lie in (0, 1)");
  detail::require(bound_name == "corollary41" || bound_name == "corollary61" || bound_name == "theorem81",
                  ErrorKind::DomainError, "Monte Carlo supports corollary41, corollary61 and theorem81");
  BoundMcResult result;
  result.bound_name = bound_name;
  result.delta = delta;
  result.trials = config.trials;
  const double nd = static_cast<double>(config.n);
  const double rate = std::sqrt(2.0 * std::log(2.0 * static_cast<double>(config.d) / delta) / nd);

  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    RandomStream rng(config.seed, trial);
    Matrix xm = generate_design(config, rng);
    const DesignMatrix x(xm);
    const GramMatrix a = gram(x);

    BoundInputs in;
    in.n = config.n;
    in.d = config.d;
    in.k = options.k;
    in.ell = options.ell;
    in.p = options.p;
    in.t = options.t;
    in.sigma = config.sigma;
    in.a = a.column_scale();
    in.delta = delta;

    Vector beta_bar;
    double lambda = 0.0;
    if (bound_name == "theorem81") {
      lambda = 4.0 * (2.0 - in.t) / in.t * config.sigma * in.a * rate;
      in.alpha = options.alpha_factor * lambda;
      beta_bar = detail::planted_two_scale(rng, config.d, config.k_true, config.k_true - 1, in.alpha, lambda);
    } else {
      beta_bar = Vector::Zero(static_cast<Eigen::Index>(config.d));
      for (auto j : rng.sample_without_replacement(config.d, config.k_true)) {
        beta_bar(static_cast<Eigen::Index>(j)) = rng.uniform(config.coef_low, config.coef_high);
      }
    }
    Vector y = xm * beta_bar;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += config.sigma * rng.normal();
    const CoefVector target(beta_bar);
    in.tail1 = tail_norm(target, in.k, NormIndex::one());
    in.tailp = tail_norm(target, in.k, in.p);
    in.tail2 = tail_norm(target, in.k, NormIndex::two());

    BoundTrial row;
    row.trial = trial;
    BoundReport report;
    std::optional<CoefVector> estimate;
    if (bound_name == "corollary41") {
      in.coherence = mutual_coherence(a);
      lambda = 4.0 * (2.0 - in.t) / in.t * config.sigma * rate;
      in.lambda = lambda;
      report = corollary41_rhs(in);
      if (report.rhs) estimate = fit_lasso(x, ResponseVector(y), PenaltySpec(lambda), config.solver).beta;
    } else if (bound_name == "corollary61") {
      const auto q = compute_quantities(a, in.k + in.ell, in.ell, NormIndex::two(), options.diagnostics);
      in.quantities.add(q);
      const double t = 1.0 - q.pi.value * std::sqrt(static_cast<double>(in.k)) / static_cast<double>(in.ell);
      lambda = t > 0.0 ? 4.0 * (2.0 - t) / t * config.sigma * in.a * rate : 0.0;
      in.lambda = lambda;
      report = corollary61_rhs(in);
      if (report.rhs) estimate = fit_lasso(x, ResponseVector(y), PenaltySpec(lambda), config.solver).beta;
    } else {
      in.s = config.k_true;
      in.k = support_threshold(target, lambda).size();
      in.q = support_threshold(target, 1.5 * in.alpha).size();
      in.tail1 = tail_norm(target, in.k, NormIndex::one());
      in.tailp = tail_norm(target, in.k, in.p);
      in.tail2 = tail_norm(target, in.k, NormIndex::two());
      in.lambda = lambda;
      if (in.k + 2 * in.ell <= config.d && in.s + 2 * in.ell <= config.d) {
        in.quantities.add(compute_quantities(a, in.k + in.ell, in.ell, NormIndex::two(), options.diagnostics));
        in.quantities.add(compute_quantities(a, in.s + in.ell, in.ell, in.p, options.diagnostics));
      }
      try {
        report = theorem81_rhs(in);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::MissingQuantity) throw;
        report = BoundReport{};
      }
      if (report.rhs) {
        estimate = run_two_stage(x, ResponseVector(y), lambda, ThresholdRule{in.alpha}, config.solver).stage2.beta;
      }
    }

    row.conditions_hold = report.rhs.has_value();
    if (row.conditions_hold && estimate) {
      const NormIndex measure = bound_name == "corollary41" ? in.p : NormIndex::two();
      row.rhs = report.rhs;
      row.measured = p_norm(estimate->values() - beta_bar, measure);
      // solver tolerance slack, so a zero bound with an exact fit is not a violation
      row.violated = row.measured > *report.rhs * (1.0 + 1e-9) + 1e-9;
      ++result.evaluable;
      if (row.violated) ++result.violations;
    }
    result.rows.push_back(row);
  }
  result.violation_rate =
      result.evaluable == 0 ? 0.0 : static_cast<double>(result.violations) / static_cast<double>(result.evaluable);
  return result;
}

/// CSV with header lambda,q,metric,mean,stderr,trials,failed; optional SVG chart of `chart_metric`
/// against lambda, one curve per q. Metadata goes to csv_path + ".meta.json".
inline void emit_outputs(const AggregateTable& table, const std::string& csv_path,
                         const std::optional<std::string>& chart_path = std::nullopt,
                         const std::string& chart_metric = "estimation_error") {
  detail::require(!table.rows.empty(), ErrorKind::DomainError, "aggregate table is empty");
  {
    auto out = detail::open_output(csv_path);
    out << "lambda,q,metric,mean,stderr,trials,failed\n";
    for (const auto& r : table.rows) {
      out << format_number(r.lambda) << ',' << r.q << ',' << r.metric << ',' << format_number(r.mean) << ','
          << format_number(r.stderr_) << ',' << r.trials << ',' << r.failed << '\n';
    }
  }
  if (!table.metadata.empty()) {
    nlohmann::json meta(table.metadata);
    auto out = detail::open_output(csv_path + ".meta.json");
    out << meta.dump(2) << '\n';
  }
  if (chart_path) {
    std::map<std::size_t, ChartSeries> by_q;
    for (const auto& r : table.rows) {
      if (r.metric != chart_metric) continue;
      auto& s = by_q[r.q];
      s.label = "q = " + std::to_string(r.q);
      s.x.push_back(r.lambda);
      s.y.push_back(r.mean);
    }
    std::vector<ChartSeries> series;
    for (auto& [q, s] : by_q) {
      std::vector<std::size_t> idx(s.x.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.x[a] < s.x[b]; });
      ChartSeries sorted{s.label, {}, {}};
      for (auto i : idx) sorted.x.push_back(s.x[i]), sorted.y.push_back(s.y[i]);
      series.push_back(std::move(sorted));
    }
    detail::require(!series.empty(), ErrorKind::DomainError, "no rows for chart metric '" + chart_metric + "'");
    auto out = detail::open_output(*chart_path);
    out << render_line_chart(chart_metric + " vs lambda", "lambda", chart_metric, series, true);
  }
}

/// Parses a CSV written by emit_outputs.
inline AggregateTable read_aggregate_csv(const std::string& path) {
  const auto rows = read_fields(path);
  detail::require(!rows.empty() && rows[0].size() == 7 && rows[0][0] == "lambda", ErrorKind::ParseError,
                  path + ": missing aggregate header");
  AggregateTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    detail::require(rows[r].size() == 7, ErrorKind::ParseError, path + ": row " + std::to_string(r + 1) + " malformed");
    AggregateRow row;
    double v = 0.0;
    detail::require(detail::parse_double(rows[r][0], row.lambda) && detail::parse_double(rows[r][3], row.mean) &&
                        (detail::parse_double(rows[r][4], row.stderr_) || rows[r][4] == "nan"),
                    ErrorKind::ParseError, path + ": row " + std::to_string(r + 1) + " has a bad number");
    if (rows[r][3] == "nan") row.mean = std::numeric_limits<double>::quiet_NaN();
    detail::require(detail::parse_double(rows[r][1], v), ErrorKind::ParseError, path + ": bad q");
    row.q = static_cast<std::size_t>(v);
    row.metric = rows[r][2];
    detail::require(detail::parse_double(rows[r][5], v), ErrorKind::ParseError, path + ": bad trials");
    row.trials = static_cast<std::size_t>(v);
    detail::require(detail::parse_double(rows[r][6], v), ErrorKind::ParseError, path + ": bad failed count");
    row.failed = static_cast<std::size_t>(v);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace sparsereg
