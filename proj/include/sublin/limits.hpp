#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sublin/error.hpp"
#include "sublin/gheat.hpp"
#include "sublin/lattice.hpp"
#include "sublin/measures.hpp"
#include "sublin/numeric.hpp"
#include "sublin/phi.hpp"
#include "sublin/recursion.hpp"
#include "sublin/report.hpp"

namespace sublin {

// ---------------------------------------------------------------------------
// Moment and tail diagnostics
// ---------------------------------------------------------------------------

template <Scalar T>
struct MomentRow {
  std::size_t n = 0;
  T mean_upper{0};     // (1/n) sum_i E[X_i 1{|X_i| < n}]
  T mean_lower{0};     // (1/n) sum_i -E[-X_i 1{|X_i| < n}]
  T tail_abs{0};       // n max_i V(|X_i| >= n)
  T tail_sq{0};        // n max_i V(X_i^2 >= n)
  T eq2{0};            // (1/n^2) sum_i E[X_i^2 1{|X_i| <= n}]
  T cesaro_sq_upper{0};  // (1/n) sum_i E[X_i^2]
  T cesaro_sq_lower{0};  // (1/n) sum_i -E[-X_i^2]
};

template <Scalar T>
struct MomentSummary {
  T mu_bar{0};
  T mu_lo{0};
  T sigma2_bar{0};
  T sigma2_lo{0};
  std::vector<MomentRow<T>> rows;
  bool tail_abs_decaying = false;
  bool tail_sq_decaying = false;
  bool eq2_decaying = false;
};

/// 1, 2, 5, 10, 20, 50, ... up to and including n_max.
[[nodiscard]] std::vector<std::size_t> default_schedule(std::size_t n_max);

/// Whether a sampled sequence looks like it tends to zero: the last value is
/// at most half the largest one, or numerically zero.
[[nodiscard]] bool looks_decaying(const std::vector<double>& values);

namespace detail {

template <Scalar T>
struct StepMoments {
  T mean_upper, mean_lower, tail_abs, tail_sq, eq2, sq_upper, sq_lower;
};

template <Scalar T>
StepMoments<T> step_moments(const AmbiguitySet<T>& set, std::size_t n) {
  const T nn(static_cast<long>(n));
  StepMoments<T> m;
  m.mean_upper = upper_expectation<T>(set, [&](const T& x) { return abs_value<T>(x) < nn ? x : T(0); }).value;
  m.mean_lower = lower_expectation<T>(set, [&](const T& x) { return abs_value<T>(x) < nn ? x : T(0); }).value;
  m.tail_abs = upper_probability<T>(set, [&](const T& x) { return abs_value<T>(x) >= nn; }).value;
  m.tail_sq = upper_probability<T>(set, [&](const T& x) { return T(x * x) >= nn; }).value;
  m.eq2 = upper_expectation<T>(set, [&](const T& x) { return abs_value<T>(x) <= nn ? T(x * x) : T(0); }).value;
  m.sq_upper = upper_expectation<T>(set, [](const T& x) { return T(x * x); }).value;
  m.sq_lower = lower_expectation<T>(set, [](const T& x) { return T(x * x); }).value;
  return m;
}

}  // namespace detail

/// Truncated means, tail products and second-moment averages of X_1..X_n for
/// each n in the schedule. Steps past the end of `seq` repeat the last one.
template <Scalar T>
[[nodiscard]] MomentSummary<T> moment_summary(const StepSequence<T>& seq, std::size_t n_max,
                                              std::vector<std::size_t> schedule = {}) {
  if (n_max == 0) throw Error(ErrorKind::usage, "n_max must be positive");
  if (schedule.empty()) schedule = default_schedule(n_max);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0 || (i > 0 && schedule[i] <= schedule[i - 1])) {
      throw Error(ErrorKind::usage, "schedule must be strictly increasing positive integers");
    }
  }

  MomentSummary<T> summary;
  for (std::size_t n : schedule) {
    MomentRow<T> row;
    row.n = n;
    const T nn(static_cast<long>(n));
    const std::size_t distinct = std::min(n, seq.size());
    for (std::size_t j = 0; j < distinct; ++j) {
      const auto m = detail::step_moments(seq[j], n);
      // The last provided step stands for all remaining indices up to n.
      const T count(static_cast<long>(j + 1 == distinct ? n - distinct + 1 : 1));
      row.mean_upper += count * m.mean_upper;
      row.mean_lower += count * m.mean_lower;
      row.eq2 += count * m.eq2;
      row.cesaro_sq_upper += count * m.sq_upper;
      row.cesaro_sq_lower += count * m.sq_lower;
      row.tail_abs = std::max<T>(row.tail_abs, m.tail_abs);
      row.tail_sq = std::max<T>(row.tail_sq, m.tail_sq);
    }
    row.mean_upper /= nn;
    row.mean_lower /= nn;
    row.eq2 /= T(nn * nn);
    row.cesaro_sq_upper /= nn;
    row.cesaro_sq_lower /= nn;
    row.tail_abs *= nn;
    row.tail_sq *= nn;
    summary.rows.push_back(std::move(row));
  }

  summary.mu_bar = summary.rows.back().mean_upper;
  summary.mu_lo = summary.rows.back().mean_lower;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const T hi = upper_expectation<T>(seq[j], [](const T& x) { return T(x * x); }).value;
    const T lo = lower_expectation<T>(seq[j], [](const T& x) { return T(x * x); }).value;
    summary.sigma2_bar = j == 0 ? hi : std::max<T>(summary.sigma2_bar, hi);
    summary.sigma2_lo = j == 0 ? lo : std::min<T>(summary.sigma2_lo, lo);
  }

  std::vector<double> tail_abs, tail_sq, eq2;
  for (const auto& r : summary.rows) {
    tail_abs.push_back(to_double(r.tail_abs));
    tail_sq.push_back(to_double(r.tail_sq));
    eq2.push_back(to_double(r.eq2));
  }
  summary.tail_abs_decaying = looks_decaying(tail_abs);
  summary.tail_sq_decaying = looks_decaying(tail_sq);
  summary.eq2_decaying = looks_decaying(eq2);
  return summary;
}

// ---------------------------------------------------------------------------
// Law of large numbers
// ---------------------------------------------------------------------------

struct Bounds {
  double lower;
  double upper;
};

/// min and max of phi over [mu_lo, mu_bar], by a grid fine enough that the
/// error is at most tol given the Lipschitz constant.
[[nodiscard]] Bounds lln_bounds(const std::function<double(double)>& phi, double mu_lo, double mu_bar,
                                double lipschitz, double tol = 1e-6);

namespace detail {

template <Scalar T>
std::string value_text(const T& v) {
  if constexpr (NumericTraits<T>::exact) {
    return to_string(v);
  } else {
    return {};
  }
}

inline void require_schedule(const std::vector<std::size_t>& schedule) {
  if (schedule.empty()) throw Error(ErrorKind::usage, "empty n schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0 || (i > 0 && schedule[i] <= schedule[i - 1])) {
      throw Error(ErrorKind::usage, "schedule must be strictly increasing positive integers");
    }
  }
}

template <Scalar T>
RealFunction<T> scaled(const PhiExpression& phi, T scale) {
  return [phi, scale](const T& x) { return phi.operator()<T>(T(x / scale)); };
}

}  // namespace detail

/// E[phi(S_n / n)] for each n by the backward recursion, next to the
/// predicted band of limit points max/min of phi over the mean interval.
/// A single-step sequence is treated as i.i.d. (untruncated means);
/// otherwise the truncated means at n are used.
template <Scalar T>
[[nodiscard]] ExperimentTable lln_experiment(const StepSequence<T>& seq, const PhiExpression& phi,
                                             const std::vector<std::size_t>& schedule,
                                             const EvalOptions& options = {}) {
  detail::require_schedule(schedule);
  ExperimentTable table;
  table.set("experiment", "lln");
  table.set("phi", phi.text());
  table.set("mode", NumericTraits<T>::exact ? "exact-rational" : "float64");
  table.set("steps", seq.size() == 1 ? "iid" : "heterogeneous");

  const auto phi_d = phi.as_function<double>();
  auto band_for = [&](double mu_lo, double mu_bar) {
    const double lip = phi.estimate_lipschitz(mu_lo - 1.0, mu_bar + 1.0);
    return lln_bounds(phi_d, mu_lo, mu_bar, lip);
  };
  std::optional<Bounds> iid_band;
  if (seq.size() == 1) {
    iid_band = band_for(to_double(lower_expectation<T>(seq[0], [](const T& x) { return x; }).value),
                        to_double(upper_expectation<T>(seq[0], [](const T& x) { return x; }).value));
  }
  for (std::size_t n : schedule) {
    Bounds band{};
    if (iid_band) {
      band = *iid_band;
    } else {
      const auto m = moment_summary(seq, n, {n});
      band = band_for(to_double(m.mu_lo), to_double(m.mu_bar));
    }

    const auto steps = seq.extended(n);
    const T scale(static_cast<long>(n));
    const auto result = sublinear_eval_sum<T>(steps, detail::scaled(phi, scale), options);
    ExperimentRow row;
    row.n = n;
    row.value = to_double(result.value);
    row.exact_value = detail::value_text(result.value);
    row.prediction = band.upper;
    row.lower = band.lower;
    table.add_row(std::move(row));
  }
  return table;
}

/// Lower probability of {mu_lo - eps <= S_n/n <= mu_bar + eps}, computed over
/// the enlarged set (a lower bound for the original one).
template <Scalar T>
[[nodiscard]] T weak_lln_check(const StepSequence<T>& seq, const T& eps, std::size_t n,
                               const EvalOptions& options = {}) {
  if (n == 0) throw Error(ErrorKind::usage, "n must be positive");
  if (eps < 0) throw Error(ErrorKind::usage, "eps must be nonnegative");
  const auto m = moment_summary(seq, n, {n});
  const T nn(static_cast<long>(n));
  T lo = m.mu_lo - eps;
  T hi = m.mu_bar + eps;
  if constexpr (!NumericTraits<T>::exact) {
    lo -= 1e-12;
    hi += 1e-12;
  }
  return sublinear_event_probability<T>(
      seq.extended(n),
      [lo, hi, nn](const T& x) {
        const T mean = x / nn;
        return mean >= lo && mean <= hi;
      },
      Direction::lower, options);
}

// ---------------------------------------------------------------------------
// Central limit theorem
// ---------------------------------------------------------------------------

struct CltOptions {
  bool truncate_sqrt_n = false;
  GridConfig grid{};
  EvalOptions eval{};
};

/// Exact square root of a perfect square, for exact-rational scaling.
[[nodiscard]] std::size_t exact_sqrt(std::size_t n);

namespace detail {

template <Scalar T>
T sqrt_scale(std::size_t n) {
  if constexpr (NumericTraits<T>::exact) {
    return T(static_cast<long>(exact_sqrt(n)));
  } else {
    return std::sqrt(static_cast<double>(n));
  }
}

// Clamp every atom to the largest lattice multiple inside [-sqrt(n), sqrt(n)].
template <Scalar T>
StepSequence<T> truncate_sqrt(const StepSequence<T>& seq, std::size_t n) {
  const auto lattice = lattice_embed(seq);
  const Rational& h = lattice.spacing;
  const double root = std::sqrt(static_cast<double>(n));
  const auto k = static_cast<long>(std::floor(root / h.get_d() + 1e-12));
  const T cap = NumericTraits<T>::from_rational(Rational(h * k));
  std::vector<AmbiguitySet<T>> steps;
  for (const auto& set : seq.steps()) {
    std::vector<DiscreteDistribution<T>> members;
    for (const auto& m : set.members()) {
      std::vector<T> pts;
      std::vector<T> ws;
      for (const auto& a : m.atoms()) {
        pts.push_back(std::clamp<T>(a.point, T(-cap), cap));
        ws.push_back(a.weight);
      }
      members.emplace_back(std::move(pts), std::move(ws));
    }
    steps.emplace_back(std::move(members), set.label());
  }
  return StepSequence<T>(std::move(steps));
}

}  // namespace detail

/// G-normal parameters (sigma_lo, sigma_hi) from the second moments of the
/// provided steps.
template <Scalar T>
[[nodiscard]] GParams clt_parameters(const StepSequence<T>& seq) {
  const auto m = moment_summary(seq, 1, {1});
  return GParams(std::sqrt(to_double(m.sigma2_lo)), std::sqrt(to_double(m.sigma2_bar)));
}

/// E[phi(S_n / sqrt(n))] for each n next to the G-normal prediction
/// E[phi(xi)] and its lower counterpart -E[-phi(xi)].
/// Every step must satisfy E[X] = E[-X] = 0.
template <Scalar T>
[[nodiscard]] ExperimentTable clt_experiment(const StepSequence<T>& seq, const PhiExpression& phi,
                                             const std::vector<std::size_t>& schedule,
                                             const CltOptions& options = {}) {
  detail::require_schedule(schedule);
  for (const auto& set : seq.steps()) {
    const T up = upper_expectation<T>(set, [](const T& x) { return x; }).value;
    const T down = upper_expectation<T>(set, [](const T& x) { return T(-x); }).value;
    if (abs_value<T>(up) > zero_tolerance<T>() || abs_value<T>(down) > zero_tolerance<T>()) {
      throw Error(ErrorKind::precondition, "CLT requires E[X] = E[-X] = 0 for every step");
    }
  }
  const GParams params = clt_parameters(seq);
  const auto phi_d = phi.as_function<double>();
  const double upper = g_normal_expectation(phi_d, params, options.grid);
  const double lower = -g_normal_expectation([&](double x) { return -phi_d(x); }, params, options.grid);

  ExperimentTable table;
  table.set("experiment", "clt");
  table.set("phi", phi.text());
  table.set("mode", NumericTraits<T>::exact ? "exact-rational" : "float64");
  table.set("sigma_lo", format_double(params.sigma_lo()));
  table.set("sigma_hi", format_double(params.sigma_hi()));
  table.set("truncate_sqrt_n", options.truncate_sqrt_n ? "true" : "false");

  for (std::size_t n : schedule) {
    auto steps = seq.extended(n);
    if (options.truncate_sqrt_n) steps = detail::truncate_sqrt(steps, n);
    const auto result =
        sublinear_eval_sum<T>(steps, detail::scaled(phi, detail::sqrt_scale<T>(n)), options.eval);
    ExperimentRow row;
    row.n = n;
    row.value = to_double(result.value);
    row.exact_value = detail::value_text(result.value);
    row.prediction = upper;
    row.lower = lower;
    table.add_row(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Counterexample family: P_k({0}) = 1 - 1/k^2, P_k({+-k}) = 1/(2k^2)
// ---------------------------------------------------------------------------

template <Scalar T>
[[nodiscard]] AmbiguitySet<T> counterexample_family(long K) {
  if (K < 1) throw Error(ErrorKind::usage, "K must be at least 1");
  std::vector<DiscreteDistribution<T>> members;
  members.reserve(static_cast<std::size_t>(K));
  for (long k = 1; k <= K; ++k) {
    const Rational inv_k2(1, k * k);
    const Rational half(1, 2 * k * k);
    members.emplace_back(std::vector<T>{T(-k), T(0), T(k)},
                         std::vector<T>{NumericTraits<T>::from_rational(half),
                                        NumericTraits<T>::from_rational(Rational(1 - inv_k2)),
                                        NumericTraits<T>::from_rational(half)});
  }
  AmbiguitySet<T> set(std::move(members), "counterexample K=" + std::to_string(K));

  auto id = [](const T& x) { return x; };
  auto sq = [](const T& x) { return T(x * x); };
  const T tol = NumericTraits<T>::exact ? T(0) : T(1e-12);
  const bool ok = abs_value<T>(upper_expectation<T>(set, id).value) <= tol &&
                  abs_value<T>(lower_expectation<T>(set, id).value) <= tol &&
                  abs_value<T>(T(upper_expectation<T>(set, sq).value - 1)) <= tol &&
                  abs_value<T>(T(lower_expectation<T>(set, sq).value - 1)) <= tol;
  if (!ok) throw Error(ErrorKind::numerical_failure, "counterexample family moments are off");
  return set;
}

/// Laws of X^2 under the counterexample family.
template <Scalar T>
[[nodiscard]] AmbiguitySet<T> squared_counterexample_family(long K) {
  if (K < 1) throw Error(ErrorKind::usage, "K must be at least 1");
  std::vector<DiscreteDistribution<T>> members;
  for (long k = 1; k <= K; ++k) {
    const Rational inv_k2(1, k * k);
    members.emplace_back(std::vector<T>{T(0), T(k * k)},
                         std::vector<T>{NumericTraits<T>::from_rational(Rational(1 - inv_k2)),
                                        NumericTraits<T>::from_rational(inv_k2)});
  }
  return AmbiguitySet<T>(std::move(members), "squared counterexample K=" + std::to_string(K));
}

template <Scalar T>
struct CounterexampleResult {
  T value{0};
  double bracket_lo = 0;  // analytic lower bracket
  double bracket_hi = 1;
  double classical = 0;   // the prediction of the classical theorem
  double constant = 0;    // c in 1 - c sqrt(n)/K (CLT case)
};

/// E[phi_M(mean of n squared draws)] with phi_M(x) = max(1 - x, 1 - M).
/// Bracket from the single strategy "always P_K":
///   value >= 1 - M (1 - (1 - 1/K^2)^n).
template <Scalar T>
[[nodiscard]] CounterexampleResult<T> prop62_experiment(long K, std::size_t n, const T& M,
                                                        const EvalOptions& options = {}) {
  if (n == 0) throw Error(ErrorKind::usage, "n must be positive");
  if (!(M > 1)) throw Error(ErrorKind::usage, "clamp level M must exceed 1");
  const auto set = squared_counterexample_family<T>(K);
  const T nn(static_cast<long>(n));
  const T floor_value = T(1) - M;
  const auto result = sublinear_eval_sum<T>(
      StepSequence<T>::iid(set, n),
      [nn, floor_value](const T& x) { return std::max<T>(T(1) - x / nn, floor_value); }, options);

  CounterexampleResult<T> out;
  out.value = result.value;
  const double kk = static_cast<double>(K) * static_cast<double>(K);
  const double none = std::pow(1.0 - 1.0 / kk, static_cast<double>(n));
  out.bracket_lo = 1.0 - to_double(M) * (1.0 - none);
  out.bracket_hi = 1.0;
  out.classical = std::max(0.0, 1.0 - to_double(M));
  return out;
}

/// E[1 - |S_n / sqrt(n)|] over the counterexample family. With a floor F
/// the test function is the bounded tent max(1 - |x|, F). The lower bracket
/// is the value under the single strategy "always P_K".
template <Scalar T>
[[nodiscard]] CounterexampleResult<T> prop63_experiment(long K, std::size_t n, std::optional<T> floor = std::nullopt,
                                                        const EvalOptions& options = {}) {
  if (n == 0) throw Error(ErrorKind::usage, "n must be positive");
  if (floor && !(*floor < 1)) throw Error(ErrorKind::usage, "tent floor must be below 1");
  const auto set = counterexample_family<T>(K);
  const T root = detail::sqrt_scale<T>(n);
  auto phi = [root, floor](const T& x) -> T {
    const T v = T(1) - abs_value<T>(T(x / root));
    return floor ? std::max<T>(v, *floor) : v;
  };
  const auto result = sublinear_eval_sum<T>(StepSequence<T>::iid(set, n), phi, options);
  const AmbiguitySet<T> single({set.members().back()});
  const auto single_value = sublinear_eval_sum<T>(StepSequence<T>::iid(single, n), phi, options);

  CounterexampleResult<T> out;
  out.value = result.value;
  out.bracket_lo = to_double(single_value.value);
  out.bracket_hi = 1.0;
  const double f = floor ? to_double(*floor) : -INFINITY;
  out.classical = gaussian_quadrature([f](double x) { return std::max(1.0 - std::fabs(x), f); }, 1.0);
  out.constant = (1.0 - out.bracket_lo) * static_cast<double>(K) / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace sublin
