#pragma once

// Right-hand sides and precondition checklists of the parameter-estimation bounds.
//
// Sub-block quantities are looked up in a QuantityTable keyed by (block size, ell, p, name).
// A value used where a larger number makes the check easier (or the bound smaller) must be exact
// or a certified bound in the safe direction; otherwise the lookup fails with MissingQuantity.

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "sparsereg/core.hpp"
#include "sparsereg/diagnostics.hpp"

namespace sparsereg {

/// Direction in which a quantity may be loose without invalidating the check it feeds.
enum class Need { Upper, Lower };

class QuantityTable {
 public:
  void set(std::size_t block, std::size_t ell, NormIndex p, const std::string& name, Quantity q) {
    entries_[key(block, ell, p, name)] = q;
  }

  void add(const SubsetQuantities& q) {
    set(q.k, q.ell, q.p, "rho", q.rho);
    set(q.k, q.ell, q.p, "mu", q.mu);
    set(q.k, q.ell, q.p, "omega", q.omega);
    set(q.k, q.ell, q.p, "theta", q.theta);
    set(q.k, q.ell, q.p, "gamma", q.gamma);
    set(q.k, q.ell, q.p, "pi", q.pi);
    if (q.pi_heuristic) set(q.k, q.ell, q.p, "pi_lower", Quantity{*q.pi_heuristic, Exactness::HeuristicLower, false});
    set(q.k, q.ell, q.p, "theta_bar", q.theta_bar);
  }

  bool contains(std::size_t block, std::size_t ell, NormIndex p, const std::string& name) const {
    return entries_.count(key(block, ell, p, name)) > 0;
  }

  /// Value of a quantity usable in the given direction.
  double get(std::size_t block, std::size_t ell, NormIndex p, const std::string& name, Need need) const {
    const auto it = entries_.find(key(block, ell, p, name));
    const std::string where = name + " at (" + std::to_string(block) + ", " + std::to_string(ell) + ", " + p.label() + ")";
    detail::require(it != entries_.end(), ErrorKind::MissingQuantity, "quantity " + where + " not supplied");
    const Quantity& q = it->second;
    const bool usable = q.exactness == Exactness::Exact ||
                        (need == Need::Upper && q.exactness == Exactness::UpperBound) ||
                        (need == Need::Lower && q.exactness == Exactness::LowerBound);
    detail::require(usable, ErrorKind::MissingQuantity,
                    "quantity " + where + " is a " + to_string(q.exactness) + ", but an " +
                        (need == Need::Upper ? "upper" : "lower") + " bound or exact value is required");
    return q.value;
  }

  const auto& entries() const { return entries_; }

 private:
  using Key = std::tuple<std::size_t, std::size_t, std::string, std::string>;
  static Key key(std::size_t block, std::size_t ell, NormIndex p, const std::string& name) {
    return Key{block, ell, p.label(), name};
  }
  std::map<Key, Quantity> entries_;
};

struct BoundInputs {
  std::size_t n = 1;
  std::size_t d = 1;
  std::size_t k = 0;
  std::size_t ell = 1;
  std::size_t s = 0;  // nonzeros of the target
  std::size_t q = 0;  // |supp_{1.5 alpha}(target)|
  NormIndex p = NormIndex::two();
  double t = 0.5;
  double t_d = 0.1;
  double lambda = 0.0;
  double alpha = 1.0;
  double epsilon_fs = 0.5;
  double sigma = 0.0;
  double a = 1.0;
  double delta = 0.05;
  double tail1 = 0.0;
  double tailp = 0.0;
  /// r_k^(2); defaults to tailp when p = 2.
  std::optional<double> tail2;
  double approx_noise = 0.0;
  double approx_err = 0.0;
  std::optional<double> coherence;
  QuantityTable quantities;

  double r2() const {
    if (tail2) return *tail2;
    detail::require(p.value() == 2.0, ErrorKind::MissingQuantity, "r_k^(2) not supplied and p != 2");
    return tailp;
  }

  double mutual_coherence() const {
    detail::require(coherence.has_value(), ErrorKind::MissingQuantity, "mutual coherence not supplied");
    return *coherence;
  }

  void validate() const {
    detail::require(n >= 1 && d >= 1, ErrorKind::DomainError, "n and d must be >= 1");
    detail::require(t > 0.0 && t <= 1.0, ErrorKind::DomainError, "t must lie in (0, 1]");
    detail::require(delta > 0.0 && delta < 1.0, ErrorKind::DomainError, "delta must lie in (0, 1)");
    detail::require(lambda >= 0.0 && sigma >= 0.0 && a >= 0.0, ErrorKind::DomainError,
                    "lambda, sigma and a must be nonnegative");
    detail::require(tail1 >= 0.0 && tailp >= 0.0 && approx_noise >= 0.0 && approx_err >= 0.0, ErrorKind::DomainError,
                    "tail norms and approximation terms must be nonnegative");
    detail::require(alpha > 0.0, ErrorKind::DomainError, "alpha must be positive");
  }
};

struct BoundCondition {
  std::string text;
  bool holds = false;
  /// Signed distance to the boundary; nonnegative exactly when the condition holds.
  double margin = 0.0;
};

struct BoundReport {
  std::string bound_name;
  std::vector<BoundCondition> conditions;
  /// Non-gating detail rows, e.g. the individual routes of an either/or condition.
  std::vector<BoundCondition> alternatives;
  std::optional<double> rhs;

  bool conditions_hold() const {
    for (const auto& c : conditions) {
      if (!c.holds) return false;
    }
    return true;
  }
};

namespace detail {

inline BoundCondition at_most(std::string text, double lhs, double rhs) {
  if (std::isnan(lhs) || std::isnan(rhs)) return BoundCondition{std::move(text), false, -std::numeric_limits<double>::infinity()};
  const double margin = (std::isinf(lhs) && std::isinf(rhs) && lhs == rhs) ? 0.0 : rhs - lhs;
  return BoundCondition{std::move(text), lhs <= rhs, margin};
}

inline BoundCondition strictly_less(std::string text, double lhs, double rhs) {
  auto c = at_most(std::move(text), lhs, rhs);
  c.holds = lhs < rhs;
  return c;
}

inline void finish(BoundReport& report, double rhs) {
  if (report.conditions_hold()) report.rhs = rhs;
}

inline double pw(double base, double exponent) { return std::pow(base, exponent); }

inline double dsz(std::size_t v) { return static_cast<double>(v); }

/// k^(1/q - 1/p) with the convention 0^0 = 1 and 0^x = 0 for x > 0.
inline double k_factor(std::size_t k, NormIndex q, NormIndex p) {
  return k == 0 ? (q.inverse() == p.inverse() ? 1.0 : 0.0) : pw(dsz(k), q.inverse() - p.inverse());
}

inline double noise_rate(const BoundInputs& in) {
  return std::sqrt(2.0 * std::log(2.0 * dsz(in.d) / in.delta) / dsz(in.n));
}

inline double window_lower(double constant, double size_power, double lambda, double alpha_scale, double denom) {
  const double num = constant * size_power * lambda;
  if (num == 0.0) return 0.0;
  if (alpha_scale * denom <= 0.0) return std::numeric_limits<double>::infinity();
  return num / (alpha_scale * denom);
}

inline double ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace detail

/// (4(2 - t)/t) (sigma a sqrt((2/n) ln(2d/delta)) + approx_noise).
inline double lambda_floor(const BoundInputs& in) {
  detail::require(in.t > 0.0 && in.t <= 1.0, ErrorKind::DomainError, "t must lie in (0, 1]");
  detail::require(in.delta > 0.0 && in.delta < 1.0, ErrorKind::DomainError, "delta must lie in (0, 1)");
  return 4.0 * (2.0 - in.t) / in.t * (in.sigma * in.a * detail::noise_rate(in) + in.approx_noise);
}

/// Theorem-level p-norm bound. claim 1 uses (omega, rho, pi); claim 2 uses (gamma, mu).
/// Quantities are read at block size k + ell. q_norm must be 1 or p.
inline BoundReport theorem41_rhs(const BoundInputs& in, int claim, NormIndex q_norm) {
  in.validate();
  detail::require(claim == 1 || claim == 2, ErrorKind::DomainError, "claim must be 1 or 2");
  detail::require(q_norm.value() == 1.0 || q_norm == in.p, ErrorKind::DomainError, "q_norm must be 1 or p");
  using detail::dsz;
  BoundReport r;
  r.bound_name = "theorem41_claim" + std::to_string(claim) + "_q" + q_norm.label();
  const std::size_t block = in.k + in.ell;
  const double kd = dsz(in.k);
  const double ld = dsz(in.ell);
  const double ip = in.p.inverse();
  const double iq = q_norm.inverse();
  const double kf = detail::k_factor(in.k, q_norm, in.p);
  const double kpow = in.k == 0 ? 0.0 : detail::pw(kd, 1.0 - ip);

  r.conditions.push_back(detail::at_most("k <= ell", kd, ld));
  r.conditions.push_back(detail::at_most("ell <= (d - k)/2", ld, (dsz(in.d) - kd) / 2.0));
  r.conditions.push_back(detail::at_most("lambda >= lambda_floor", lambda_floor(in), in.lambda));
  if (!r.conditions[1].holds) return r;

  const double ell_term = 4.0 * in.tail1 * detail::pw(ld, iq - 1.0);
  if (claim == 1) {
    const double pi_v = in.quantities.get(block, in.ell, in.p, "pi", Need::Upper);
    const double omega_v = in.quantities.get(block, in.ell, in.p, "omega", Need::Lower);
    const double rho_v = in.quantities.get(block, in.ell, in.p, "rho", Need::Upper);
    r.conditions.push_back(detail::at_most("t <= 1 - pi k^(1-1/p)/ell", in.t, 1.0 - pi_v * kpow / ld));
    r.conditions.push_back(detail::strictly_less("omega > 0", 0.0, omega_v));
    if (!r.conditions.back().holds) return r;
    const double rhs = 8.0 * kf / (in.t * omega_v) * (rho_v * in.tailp + detail::pw(kd, ip) * in.lambda) +
                       32.0 * kf / in.t * pi_v * in.tail1 / ld + 4.0 * kf * in.tailp + ell_term;
    detail::finish(r, rhs);
  } else {
    const double gamma_v = in.quantities.get(block, in.ell, in.p, "gamma", Need::Upper);
    const double mu_v = in.quantities.get(block, in.ell, in.p, "mu", Need::Lower);
    r.conditions.push_back(detail::at_most("t <= 1 - gamma k^(1-1/p)/ell", in.t, 1.0 - gamma_v * kpow / ld));
    r.conditions.push_back(detail::strictly_less("mu > 0", 0.0, mu_v));
    if (!r.conditions.back().holds) return r;
    const double rhs =
        8.0 * kf / in.t * (4.0 * gamma_v * in.tail1 / ld + in.lambda * detail::pw(dsz(block), ip) / mu_v) + ell_term;
    detail::finish(r, rhs);
  }
  return r;
}

/// Mutual-incoherence form of claim 1 with q = p (and a = 1 in the noise floor).
inline BoundReport corollary41_rhs(const BoundInputs& in) {
  in.validate();
  using detail::dsz;
  BoundReport r;
  r.bound_name = "corollary41";
  const double m = in.mutual_coherence();
  const double kd = dsz(in.k);
  const double ld = dsz(in.ell);
  const double c = 8.0 * (2.0 - in.t) / in.t;
  const double floor = 4.0 * (2.0 - in.t) / in.t * (in.sigma * detail::noise_rate(in) + in.approx_noise);
  r.conditions.push_back(detail::at_most("k <= ell", kd, ld));
  r.conditions.push_back(detail::at_most("ell <= (d - k)/2", ld, (dsz(in.d) - kd) / 2.0));
  r.conditions.push_back(detail::at_most("M (k + ell) <= (1 - t)/(2 - t)", m * (kd + ld), (1.0 - in.t) / (2.0 - in.t)));
  r.conditions.push_back(detail::at_most("lambda >= lambda_floor", floor, in.lambda));
  const double ip = in.p.inverse();
  const double rhs = c * (1.5 * in.tailp + (in.k == 0 ? 0.0 : detail::pw(kd, ip)) * in.lambda) + 4.0 * in.tailp +
                     4.0 * (8.0 - 7.0 * in.t) / in.t * in.tail1 * detail::pw(ld, ip - 1.0);
  detail::finish(r, rhs);
  return r;
}

/// 2-norm bound in terms of the least-squares approximation error epsilon = approx_err.
inline BoundReport corollary51_rhs(const BoundInputs& in) {
  in.validate();
  using detail::dsz;
  BoundReport r;
  r.bound_name = "corollary51";
  const double m = in.mutual_coherence();
  const double kd = dsz(in.k);
  const double ld = dsz(in.ell);
  const double r2 = in.r2();
  const double floor = 4.0 * (2.0 - in.t) / in.t * (in.sigma * detail::noise_rate(in) + in.approx_err / std::sqrt(kd + 1.0));
  r.conditions.push_back(detail::at_most("2k <= ell", 2.0 * kd, ld));
  r.conditions.push_back(detail::at_most("ell <= (d - 2k)/2", ld, (dsz(in.d) - 2.0 * kd) / 2.0));
  r.conditions.push_back(detail::at_most("M (2k + ell) <= (1 - t)/(2 - t)", m * (2.0 * kd + ld), (1.0 - in.t) / (2.0 - in.t)));
  r.conditions.push_back(detail::at_most("lambda >= lambda_floor", floor, in.lambda));
  const double rhs = 8.0 * (2.0 - in.t) / in.t * (1.5 * r2 + std::sqrt(2.0 * kd) * in.lambda) + 4.0 * r2 +
                     4.0 * (8.0 - 7.0 * in.t) / in.t * in.tail1 / std::sqrt(ld) + 4.0 * in.approx_err;
  detail::finish(r, rhs);
  return r;
}

/// 2-norm bound with t derived from pi^(2) at (k + ell, ell). The supplied in.t is ignored.
inline BoundReport corollary61_rhs(const BoundInputs& in) {
  using detail::dsz;
  BoundReport r;
  r.bound_name = "corollary61";
  const double kd = dsz(in.k);
  const double ld = dsz(in.ell);
  r.conditions.push_back(detail::at_most("k <= ell", kd, ld));
  r.conditions.push_back(detail::at_most("ell <= (d - k)/2", ld, (dsz(in.d) - kd) / 2.0));
  if (!r.conditions[1].holds) return r;
  const std::size_t block = in.k + in.ell;
  const NormIndex two = NormIndex::two();
  const double pi_v = in.quantities.get(block, in.ell, two, "pi", Need::Upper);
  const double rho_v = in.quantities.get(block, in.ell, two, "rho", Need::Upper);
  const double mu_v = in.quantities.get(block, in.ell, two, "mu", Need::Lower);
  const double t = 1.0 - pi_v * std::sqrt(kd) / ld;
  r.conditions.push_back(detail::strictly_less("t = 1 - pi sqrt(k)/ell > 0", 0.0, t));
  r.conditions.push_back(detail::strictly_less("mu > 0", 0.0, mu_v));
  if (!r.conditions[2].holds || !r.conditions[3].holds) return r;
  BoundInputs at_t = in;
  at_t.t = std::min(1.0, t);
  at_t.approx_noise = 0.0;
  at_t.validate();
  r.conditions.push_back(detail::at_most("lambda >= lambda_floor", lambda_floor(at_t), in.lambda));
  const double ratio = rho_v / (t * mu_v);
  const double rhs = (32.0 * ratio + 4.0) * in.tail1 / std::sqrt(ld) + (8.0 * ratio + 4.0) * in.r2() +
                     8.0 / (t * mu_v) * std::sqrt(kd) * in.lambda;
  detail::finish(r, rhs);
  return r;
}

struct DantzigConstants {
  double lambda_d = 0.0;
  double c0 = 0.0;
  double c2 = 0.0;
};

inline double dantzig_c0(double a, double b) {
  const double gap = 1.0 - a - b;
  detail::require(gap > 0.0, ErrorKind::DomainError, "Dantzig constants need 1 - a - b > 0");
  return 2.0 * std::sqrt(2.0) * (1.0 + (1.0 - a * a) / gap) + (1.0 + 1.0 / std::sqrt(2.0)) * (1.0 + a) * (1.0 + a) / gap;
}

inline double dantzig_c2(double a, double b) {
  const double gap = 1.0 - a - b;
  detail::require(gap > 0.0, ErrorKind::DomainError, "Dantzig constants need 1 - a - b > 0");
  return 2.0 * dantzig_c0(a, b) / gap + 2.0 * b * (1.0 + a) / (gap * gap) + (1.0 + a) / gap;
}

inline double dantzig_lambda(std::size_t d, double delta, double t_d) {
  detail::require(d >= 2, ErrorKind::DomainError, "Dantzig lambda needs d >= 2");
  detail::require(delta > 0.0 && delta <= 1.0, ErrorKind::DomainError, "delta must lie in (0, 1]");
  detail::require(t_d > 0.0, ErrorKind::DomainError, "t_D must be positive");
  const double ln_d = std::log(static_cast<double>(d));
  const double radicand = 1.0 - (std::log(delta) + std::log(std::sqrt(std::numbers::pi * ln_d))) / ln_d;
  detail::require(radicand >= 0.0, ErrorKind::DomainError, "Dantzig lambda radicand is negative");
  return (std::sqrt(radicand) + 1.0 / t_d) * std::sqrt(2.0 * ln_d);
}

/// lambda_D, C0(a, b) and C2(a, b). Requires a + b < 1 - t_D.
inline DantzigConstants dantzig_constants(std::size_t d, double delta, double t_d, double a_in, double b_in) {
  detail::require(a_in >= 0.0 && b_in >= 0.0, ErrorKind::DomainError, "Dantzig a and b must be nonnegative");
  detail::require(a_in + b_in < 1.0 - t_d, ErrorKind::DomainError, "Dantzig constants need a + b < 1 - t_D");
  return DantzigConstants{dantzig_lambda(d, delta, t_d), dantzig_c0(a_in, b_in), dantzig_c2(a_in, b_in)};
}

/// Dantzig-selector 2-norm bound, reported as the square root of
/// C2 lambda_D^2 ((k + 1) sigma^2 / n + r_k^(2)^2). Reads rho, mu and theta_bar at (2s, s, 2).
inline BoundReport theorem61_rhs(const BoundInputs& in) {
  using detail::dsz;
  BoundReport r;
  r.bound_name = "theorem61";
  const std::size_t block = 2 * in.s;
  const NormIndex two = NormIndex::two();
  r.conditions.push_back(detail::at_most("sup_j A_jj <= 1", in.a * in.a, 1.0));
  r.conditions.push_back(detail::strictly_less("t_D > 0", 0.0, in.t_d));
  const double rip = std::max(in.quantities.get(block, in.s, two, "rho", Need::Upper) - 1.0,
                              1.0 - in.quantities.get(block, in.s, two, "mu", Need::Lower));
  const double tb = in.quantities.get(block, in.s, two, "theta_bar", Need::Upper);
  r.conditions.push_back(detail::strictly_less("theta_bar_2s + theta_bar_2s,s < 1 - t_D", rip + tb, 1.0 - in.t_d));
  if (!r.conditions_hold()) return r;
  const auto c = dantzig_constants(in.d, in.delta, in.t_d, std::max(0.0, rip), tb);
  const double r2 = in.r2();
  const double squared = c.c2 * c.lambda_d * c.lambda_d * ((dsz(in.k) + 1.0) * in.sigma * in.sigma / dsz(in.n) + r2 * r2);
  detail::finish(r, std::sqrt(squared));
  return r;
}

/// Feature-selection conditions for an exactly k-sparse target. rhs is the implied sup-norm
/// error ceiling epsilon_fs * alpha. The either/or route requirement is one gating condition;
/// the individual windows are listed as alternatives.
inline BoundReport theorem71_conditions(const BoundInputs& in) {
  in.validate();
  using detail::dsz;
  BoundReport r;
  r.bound_name = "theorem71";
  const std::size_t block = in.k + in.ell;
  const double kd = dsz(in.k);
  const double ld = dsz(in.ell);
  const double ip = in.p.inverse();
  const double kpow = in.k == 0 ? 0.0 : detail::pw(kd, 1.0 - ip);
  const double ea = in.epsilon_fs * in.alpha;
  detail::require(in.epsilon_fs > 0.0 && in.epsilon_fs < 1.0, ErrorKind::DomainError, "epsilon must lie in (0, 1)");

  BoundInputs sparse = in;
  sparse.approx_noise = 0.0;
  r.conditions.push_back(detail::at_most("k <= ell", kd, ld));
  r.conditions.push_back(detail::at_most("ell <= (d - k)/2", ld, (dsz(in.d) - kd) / 2.0));
  r.conditions.push_back(detail::at_most("lambda >= lambda_floor", lambda_floor(sparse), in.lambda));
  if (!r.conditions[1].holds) return r;

  const double pi_v = in.quantities.get(block, in.ell, in.p, "pi", Need::Upper);
  const double omega_v = in.quantities.get(block, in.ell, in.p, "omega", Need::Lower);
  const double gamma_v = in.quantities.get(block, in.ell, in.p, "gamma", Need::Upper);
  const double mu_v = in.quantities.get(block, in.ell, in.p, "mu", Need::Lower);

  const double lower_a = detail::window_lower(8.0, in.k == 0 ? 0.0 : detail::pw(kd, ip), in.lambda, ea, omega_v);
  const double upper_a = 1.0 - pi_v * kpow / ld;
  const double lower_b = detail::window_lower(8.0, detail::pw(dsz(block), ip), in.lambda, ea, mu_v);
  const double upper_b = 1.0 - gamma_v * kpow / ld;
  const auto a_lo = detail::at_most("route A: 8 k^(1/p) lambda/(eps alpha omega) <= t", lower_a, in.t);
  const auto a_hi = detail::at_most("route A: t <= 1 - pi k^(1-1/p)/ell", in.t, upper_a);
  const auto b_lo = detail::at_most("route B: 8 (k+ell)^(1/p) lambda/(eps alpha mu) <= t", lower_b, in.t);
  const auto b_hi = detail::at_most("route B: t <= 1 - gamma k^(1-1/p)/ell", in.t, upper_b);
  r.alternatives = {a_lo, a_hi, b_lo, b_hi};
  const double margin_a = std::min(a_lo.margin, a_hi.margin);
  const double margin_b = std::min(b_lo.margin, b_hi.margin);
  const bool route_a = a_lo.holds && a_hi.holds;
  const bool route_b = b_lo.holds && b_hi.holds;
  r.conditions.push_back(BoundCondition{"route A or route B", route_a || route_b, std::max(margin_a, margin_b)});
  detail::finish(r, ea);
  return r;
}

/// Mutual-incoherence specialization with p = inf, ell = k, t = 1/2 and epsilon = 32 lambda/alpha.
inline BoundReport corollary71_conditions(const BoundInputs& in) {
  in.validate();
  using detail::dsz;
  BoundReport r;
  r.bound_name = "corollary71";
  const double m = in.mutual_coherence();
  const double kd = dsz(in.k);
  r.conditions.push_back(detail::at_most("k M <= 0.25", kd * m, 0.25));
  r.conditions.push_back(detail::at_most("3k <= d", 3.0 * kd, dsz(in.d)));
  r.conditions.push_back(detail::at_most("lambda <= alpha/32", in.lambda, in.alpha / 32.0));
  r.conditions.push_back(detail::at_most("lambda >= 12 sigma sqrt(2 ln(2d/delta)/n)", 12.0 * in.sigma * detail::noise_rate(in), in.lambda));
  const double eps = 32.0 * in.lambda / in.alpha;
  r.alternatives.push_back(BoundCondition{"epsilon = 32 lambda/alpha", eps < 1.0, 1.0 - eps});
  detail::finish(r, eps * in.alpha);
  return r;
}

/// Two-stage 2-norm bound for an s-sparse target with k = |supp_lambda| and q = |supp_{1.5 alpha}|.
/// Reads pi, rho, mu at (k + ell, ell, 2) and the route quantities at (s + ell, ell, p).
/// Route A divides by omega, which lower-bounds mu and is what the selection step actually uses.
inline BoundReport theorem81_rhs(const BoundInputs& in) {
  in.validate();
  using detail::dsz;
  BoundReport r;
  r.bound_name = "theorem81";
  const double kd = dsz(in.k);
  const double sd = dsz(in.s);
  const double ld = dsz(in.ell);
  const double ip = in.p.inverse();
  const NormIndex two = NormIndex::two();

  BoundInputs sparse = in;
  sparse.approx_noise = 0.0;
  r.conditions.push_back(detail::strictly_less("delta < 0.5", in.delta, 0.5));
  r.conditions.push_back(detail::at_most("s <= ell", sd, ld));
  r.conditions.push_back(detail::at_most("ell <= (d - s)/2", ld, (dsz(in.d) - sd) / 2.0));
  r.conditions.push_back(detail::at_most("q <= k", dsz(in.q), kd));
  r.conditions.push_back(detail::at_most("k <= s", kd, sd));
  r.conditions.push_back(detail::at_most("lambda <= 0.5 alpha", in.lambda, 0.5 * in.alpha));
  r.conditions.push_back(detail::at_most("lambda >= lambda_floor", lambda_floor(sparse), in.lambda));
  if (!r.conditions[2].holds || !r.conditions[4].holds) return r;

  const std::size_t block = in.k + in.ell;
  const double pi2 = in.quantities.get(block, in.ell, two, "pi", Need::Upper);
  const double rho2 = in.quantities.get(block, in.ell, two, "rho", Need::Upper);
  const double mu2 = in.quantities.get(block, in.ell, two, "mu", Need::Lower);
  r.conditions.push_back(detail::at_most("t <= 1 - pi2 sqrt(k)/ell", in.t, 1.0 - pi2 * std::sqrt(kd) / ld));
  r.conditions.push_back(detail::strictly_less("mu2 > 0", 0.0, mu2));

  const std::size_t sblock = in.s + in.ell;
  const double spow = in.s == 0 ? 0.0 : detail::pw(sd, 1.0 - ip);
  const double pi_p = in.quantities.get(sblock, in.ell, in.p, "pi", Need::Upper);
  const double omega_p = in.quantities.get(sblock, in.ell, in.p, "omega", Need::Lower);
  const double gamma_p = in.quantities.get(sblock, in.ell, in.p, "gamma", Need::Upper);
  const double mu_p = in.quantities.get(sblock, in.ell, in.p, "mu", Need::Lower);
  const auto a_lo = detail::at_most("route A: 16 s^(1/p) lambda/(alpha omega) <= t",
                                    detail::window_lower(16.0, in.s == 0 ? 0.0 : detail::pw(sd, ip), in.lambda, in.alpha, omega_p), in.t);
  const auto a_hi = detail::at_most("route A: t <= 1 - pi s^(1-1/p)/ell", in.t, 1.0 - pi_p * spow / ld);
  const auto b_lo = detail::at_most("route B: 16 (s+ell)^(1/p) lambda/(alpha mu) <= t",
                                    detail::window_lower(16.0, detail::pw(dsz(sblock), ip), in.lambda, in.alpha, mu_p), in.t);
  const auto b_hi = detail::at_most("route B: t <= 1 - gamma s^(1-1/p)/ell", in.t, 1.0 - gamma_p * spow / ld);
  r.alternatives = {a_lo, a_hi, b_lo, b_hi};
  r.conditions.push_back(BoundCondition{"route A or route B", (a_lo.holds && a_hi.holds) || (b_lo.holds && b_hi.holds),
                                        std::max(std::min(a_lo.margin, a_hi.margin), std::min(b_lo.margin, b_hi.margin))});
  if (!r.conditions_hold()) return r;

  const double r2 = in.r2();
  const double noise = in.a * in.sigma * (1.0 + std::sqrt(20.0 * std::log(1.0 / in.delta))) * std::sqrt(dsz(in.q) / dsz(in.n));
  const double rhs = 8.0 / (in.t * mu2) * (5.0 * rho2 * r2 + std::sqrt(kd - dsz(in.q)) * in.lambda + noise) + 8.0 * r2;
  detail::finish(r, rhs);
  return r;
}

/// Mutual-incoherence specialization of the two-stage bound, evaluated as printed:
/// 24 sqrt(k - q) lambda + 24 sigma (1 + sqrt((20 q/n) ln(1/delta))) + 168 r_k^(2).
inline BoundReport corollary81_rhs(const BoundInputs& in) {
  in.validate();
  using detail::dsz;
  BoundReport r;
  r.bound_name = "corollary81";
  const double m = in.mutual_coherence();
  const double kd = dsz(in.k);
  const double sd = dsz(in.s);
  r.conditions.push_back(detail::strictly_less("delta < 0.5", in.delta, 0.5));
  r.conditions.push_back(detail::at_most("s <= d/3", sd, dsz(in.d) / 3.0));
  r.conditions.push_back(detail::at_most("M s <= 1/6", m * sd, 1.0 / 6.0));
  r.conditions.push_back(detail::at_most("lambda <= alpha/48", in.lambda, in.alpha / 48.0));
  r.conditions.push_back(detail::at_most("lambda >= 12 sigma sqrt(2 ln(2d/delta)/n)", 12.0 * in.sigma * detail::noise_rate(in), in.lambda));
  r.conditions.push_back(detail::at_most("q <= k", dsz(in.q), kd));
  if (!r.conditions.back().holds) return r;
  const double rhs = 24.0 * std::sqrt(kd - dsz(in.q)) * in.lambda +
                     24.0 * in.sigma * (1.0 + std::sqrt(20.0 * dsz(in.q) / dsz(in.n) * std::log(1.0 / in.delta))) +
                     168.0 * in.r2();
  detail::finish(r, rhs);
  return r;
}

/// Names accepted by evaluate_bound and the CLI.
inline const std::vector<std::string>& bound_names() {
  static const std::vector<std::string> names{
      "theorem41_claim1", "theorem41_claim2", "corollary41", "corollary51", "corollary61",
      "theorem61",        "theorem71",        "corollary71", "theorem81",   "corollary81"};
  return names;
}

/// Dispatch by name; theorem41 variants use q_norm = p.
inline BoundReport evaluate_bound(const std::string& name, const BoundInputs& in) {
  if (name == "theorem41_claim1") return theorem41_rhs(in, 1, in.p);
  if (name == "theorem41_claim2") return theorem41_rhs(in, 2, in.p);
  if (name == "corollary41") return corollary41_rhs(in);
  if (name == "corollary51") return corollary51_rhs(in);
  if (name == "corollary61") return corollary61_rhs(in);
  if (name == "theorem61") return theorem61_rhs(in);
  if (name == "theorem71") return theorem71_conditions(in);
  if (name == "corollary71") return corollary71_conditions(in);
  if (name == "theorem81") return theorem81_rhs(in);
  if (name == "corollary81") return corollary81_rhs(in);
  detail::fail(ErrorKind::DomainError, "unknown bound '" + name + "'");
}

}  // namespace sparsereg
