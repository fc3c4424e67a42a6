#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "sublin/error.hpp"
#include "sublin/kernels.hpp"
#include "sublin/lattice.hpp"
#include "sublin/numeric.hpp"

namespace sublin {

enum class Direction { upper, lower };

using kernels::Exec;

struct EvalOptions {
  Direction direction = Direction::upper;
  bool record_strategy = false;
  // Upper bound on the total number of stored lattice states over all steps.
  std::size_t state_cap = 50'000'000;
  Exec exec = Exec::parallel;
};

template <Scalar T>
struct EvalResult {
  T value{0};
  Rational spacing;
  std::size_t states = 0;
  // When recorded: for step k (0-based), the lattice states before the step
  // and the index of the maximizing member at each of them.
  std::vector<std::vector<std::int64_t>> strategy_states;
  std::vector<std::vector<std::uint32_t>> strategy;
};

namespace detail {

// Sorted Minkowski sum of a sorted state set with a sorted offset set.
inline std::vector<std::int64_t> minkowski_sum(const std::vector<std::int64_t>& states,
                                               const std::vector<std::int64_t>& offsets) {
  std::vector<std::int64_t> out;
  if (states.empty() || offsets.empty()) return out;
  const std::int64_t lo = states.front() + offsets.front();
  const std::int64_t hi = states.back() + offsets.back();
  const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t pairs = static_cast<std::uint64_t>(states.size()) * offsets.size();
  if (range <= 8 * pairs + 1024 && range <= (std::uint64_t{1} << 30)) {
    std::vector<char> mark(range, 0);
    for (auto s : states) {
      for (auto o : offsets) mark[static_cast<std::size_t>(s + o - lo)] = 1;
    }
    for (std::uint64_t i = 0; i < range; ++i) {
      if (mark[i]) out.push_back(lo + static_cast<std::int64_t>(i));
    }
    return out;
  }
  out.reserve(pairs);
  for (auto s : states) {
    for (auto o : offsets) out.push_back(s + o);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <Scalar T>
EvalResult<T> eval_upper(const Lattice<T>& lattice, const RealFunction<T>& terminal,
                         const EvalOptions& options) {
  const std::size_t n = lattice.steps.size();
  if (n == 0) throw Error(ErrorKind::usage, "step sequence must have n >= 1");

  std::vector<std::vector<std::int64_t>> reach(n + 1);
  reach[0] = {0};
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) {
    reach[k + 1] = minkowski_sum(reach[k], lattice.steps[k].offsets);
    total += reach[k + 1].size();
    if (total > options.state_cap) {
      throw Error(ErrorKind::state_explosion, "reachable lattice exceeds the configured state cap");
    }
  }

  const T h = lattice.spacing_as();
  std::vector<T> next(reach[n].size());
  for (std::size_t i = 0; i < reach[n].size(); ++i) {
    next[i] = terminal(T(h * T(reach[n][i])));
    require_finite(next[i], "terminal function");
  }

  EvalResult<T> result;
  result.spacing = lattice.spacing;
  result.states = total;
  if (options.record_strategy) {
    result.strategy.resize(n);
    result.strategy_states.resize(n);
  }

  for (std::size_t k = n; k-- > 0;) {
    const kernels::Locator loc(reach[k + 1]);
    std::vector<T> current(reach[k].size());
    std::vector<std::uint32_t> arg;
    if (options.record_strategy) arg.resize(reach[k].size());
    kernels::backward_step<T>(options.exec, reach[k], lattice.steps[k], loc, next, current, arg);
    if (options.record_strategy) {
      result.strategy[k] = std::move(arg);
      result.strategy_states[k] = reach[k];
    }
    next = std::move(current);
    reach[k + 1].clear();
    reach[k + 1].shrink_to_fit();
  }
  result.value = next.front();
  require_finite(result.value, "recursion value");
  return result;
}

}  // namespace detail

/// Nested sublinear expectation of terminal(S_n) under the sequential
/// independence recursion:
///   v_n(x) = f(x),  v_{k-1}(x) = max_{Q in step k} sum_y Q(y) v_k(x + y),
/// returning v_0(0). The lower direction returns -eval(-f).
template <Scalar T>
[[nodiscard]] EvalResult<T> sublinear_eval_sum(const Lattice<T>& lattice,
                                               const RealFunction<T>& terminal,
                                               const EvalOptions& options = {}) {
  if (options.direction == Direction::upper) return detail::eval_upper(lattice, terminal, options);
  auto result = detail::eval_upper<T>(
      lattice, [&terminal](const T& x) { return T(-terminal(x)); }, options);
  result.value = -result.value;
  return result;
}

template <Scalar T>
[[nodiscard]] EvalResult<T> sublinear_eval_sum(const StepSequence<T>& seq,
                                               const RealFunction<T>& terminal,
                                               const EvalOptions& options = {},
                                               const std::optional<SnapOptions>& snap = std::nullopt) {
  return sublinear_eval_sum(lattice_embed(seq, snap), terminal, options);
}

/// Upper probability of {S_n in A} over the enlarged set (upper), or the
/// conjugate lower probability 1 - V(A^c) (lower).
template <Scalar T>
[[nodiscard]] T sublinear_event_probability(const Lattice<T>& lattice, const EventPredicate<T>& event,
                                            Direction direction, EvalOptions options = {}) {
  options.direction = Direction::upper;
  if (direction == Direction::upper) {
    return sublinear_eval_sum<T>(
               lattice, [&event](const T& x) { return event(x) ? T(1) : T(0); }, options)
        .value;
  }
  const T complement =
      sublinear_eval_sum<T>(
          lattice, [&event](const T& x) { return event(x) ? T(0) : T(1); }, options)
          .value;
  return T(1 - complement);
}

template <Scalar T>
[[nodiscard]] T sublinear_event_probability(const StepSequence<T>& seq, const EventPredicate<T>& event,
                                            Direction direction, EvalOptions options = {}) {
  return sublinear_event_probability(lattice_embed(seq), event, direction, options);
}

}  // namespace sublin
